// Copyright 2026 The catgrow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "catgrow/catgrow.hpp"
#include "catgrow/fock.hpp"
#include "test_util.hpp"

namespace catgrow {
namespace {

using testing::square_grid;
using testing::sup_diff;

ProtocolConfig coherent_cat(int N, double mu, double nbar, double alpha, double eta) {
    ProtocolConfig c = cat_config(N, mu, nbar);
    c.input = InputKind::coherent;
    c.alpha = alpha;
    c.efficiency = eta;
    return c;
}

TEST(EffectiveOperator, SubstitutesAmplitude) {
    const Phase phi = Phase::turns(1, 3);
    auto lossless = coherent_operator(0.8, 0.9, {0, 1}, phi);
    auto eff = effective_coherent_operator(0.81, 1.0, {0, 1}, phi, 0.8);
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(std::abs(eff.coefficient(k) - lossless.coefficient(k)), 0, 1e-15);
    auto same = effective_coherent_operator(1.0, 0.9, {0, 1}, phi, 0.8);
    for (int k = 0; k < 2; ++k) EXPECT_EQ(same.coefficient(k), lossless.coefficient(k));
}

TEST(EffectiveOperator, ExpandedCoefficient) {
    const Phase phi = Phase::turns(0, 1);
    auto eff = effective_coherent_operator(0.9, 1 / std::sqrt(10.0), {0, 1}, phi, 1.0);
    double c = std::exp(-0.09) * std::sqrt(0.09) / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(eff.coefficient(1) - c), 0, 1e-15);
    EXPECT_NEAR(std::abs(eff.coefficient(0) + c), 0, 1e-15);
}

TEST(LossMixture, NoLossIsIdealCat) {
    auto c = coherent_cat(3, 1.0, 0.0, 0.5, 1.0);
    auto s = loss_mixture_state(c, {1.0, InputKind::coherent, 0.5});
    EXPECT_LT(sup_diff(s, build_scs(3, 1.0, 0.0), square_grid(-5, 8, 41)), 1e-12);
}

TEST(LossMixture, ConvexMixtureOfShiftedCats) {
    auto c = coherent_cat(3, 1.0, 0.1, 1.0, 0.6);
    LossModel L{0.6, InputKind::coherent, 1.0};
    auto s = loss_mixture_state(c, L);
    EXPECT_NEAR(total_integral(s).real(), 1.0, 1e-10);
    auto w = poisson_weights(3 * L.loss_per_step(), L.truncation_tail);
    double sum = 0;
    for (double x : w) {
        EXPECT_GE(x, 0);
        sum += x;
    }
    EXPECT_NEAR(sum, 1.0, 1e-10);
    // mixture = sum_K w_K cat(p - K mu)
    auto cat = build_scs(3, 1.0, 0.1);
    for (auto [x, p] : {std::pair{0.0, 1.5}, {0.3, 2.9}, {-0.4, 4.0}}) {
        double expect = 0;
        for (size_t K = 0; K < w.size(); ++K) expect += w[K] / sum * cat(x, p - K * 1.0);
        EXPECT_NEAR(s(x, p), expect, 1e-13);
    }
}

TEST(LossMixture, PositionMarginalUnchanged) {
    auto c = coherent_cat(3, 1.0, 0.1, 1.0, 0.7);
    auto s = loss_mixture_state(c, {0.7, InputKind::coherent, 1.0});
    auto ideal = build_scs(3, 1.0, 0.1);
    auto a = marginal(s, 0), b = marginal(ideal, 0);
    for (double x = -4; x <= 4; x += 0.25) EXPECT_NEAR(a(x), b(x), 1e-10);
}

TEST(LossMixture, PoissonCollapseMatchesProductSum) {
    // Direct sum over k_1..k_N of prod_i lam^{k_i} e^{-lam} / k_i! grouped by total K.
    const int N = 3;
    const double lam = 0.4;
    const int kmax = 25;
    std::vector<double> byK(N * kmax + 1, 0.0);
    for (int a = 0; a <= kmax; ++a)
        for (int b = 0; b <= kmax; ++b)
            for (int d = 0; d <= kmax; ++d) {
                double w = std::exp(-N * lam + (a + b + d) * std::log(lam) - std::lgamma(a + 1.0) -
                                    std::lgamma(b + 1.0) - std::lgamma(d + 1.0));
                byK[a + b + d] += w;
            }
    auto w = poisson_weights(N * lam, 1e-12);
    for (size_t K = 0; K < w.size(); ++K) EXPECT_NEAR(w[K], byK[K], 1e-10) << K;
}

TEST(LossMixture, RejectsSinglePhoton) {
    EXPECT_THROW(loss_mixture_state(cat_config(2, 1.0, 0.0), {0.9, InputKind::coherent, 1.0}), ValidationError);
}

TEST(SinglePhotonLoss, Factors) {
    EXPECT_NEAR(std::pow(single_photon_loss_effect(0.9), 3), 0.729, 1e-15);
    EXPECT_EQ(single_photon_loss_effect(1.0), 1.0);
    EXPECT_EQ(single_photon_loss_effect(0.0), 0.0);
}

TEST(SinglePhotonLoss, NumberBasisStepOnlyRescales) {
    const double mu = 0.9;
    FockDensity rho = thermal_density(0.1, 40);
    const Phase phi = Phase::turns(1, 3);
    auto lossy = lossy_step_fock(rho, 0.9, InputKind::single_photon, 0, {0, 1}, phi, mu);
    auto ideal = lossy_step_fock(rho, 1.0, InputKind::single_photon, 0, {0, 1}, phi, mu);
    EXPECT_NEAR(lossy.trace() / ideal.trace(), 0.9, 1e-12);
    EXPECT_LT(trace_distance(lossy.normalized(), ideal.normalized()), 1e-10);
    // eta = 1 agrees with the lossless operator.
    ProtocolConfig c = cat_config(1, mu, 0.1);
    c.phases = {phi};
    auto direct = apply_descriptor(rho, measurement_operator(c, 1));
    EXPECT_LT((ideal.rho - direct.rho).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(CoherentLoss, NumberBasisSmallLossMatchesEffectiveOperator) {
    const double mu = 0.8, eta = 0.99;
    const double alpha = 0.1;  // (1 - eta)|alpha|^2 = 1e-4
    FockDensity rho = thermal_density(0.0, 40);
    const Phase phi = Phase::turns(1, 2);
    auto lossy = lossy_step_fock(rho, eta, InputKind::coherent, alpha, {0, 1}, phi, mu);
    auto ideal = lossy_step_fock(rho, 1.0, InputKind::coherent, alpha, {0, 1}, phi, mu);
    EXPECT_LT(trace_distance(lossy.normalized(), ideal.normalized()), 1e-3);
    auto eff = apply_descriptor(rho, effective_coherent_operator(eta, alpha, {0, 1}, phi, mu));
    EXPECT_LT(trace_distance(lossy.normalized(), eff.normalized()), 1e-3);
}

TEST(LossyHerald, Limits) {
    auto c = coherent_cat(3, 1.0, 0.1, 0.6, 1.0);
    LossModel L{1.0, InputKind::coherent, 0.6};
    EXPECT_NEAR(lossy_herald_probability(c, L), herald_probability(c), 1e-15);
    // The k-sum resums to e^{N (1 - eta) |a|^2}.
    const double a2 = 0.36, S = 1.2;
    for (double eta : {1.0, 0.95, 0.9, 0.8, 0.6, 0.4}) {
        c.efficiency = eta;
        L.efficiency = eta;
        double expect = std::exp(3 * (1 - eta) * a2) * 0.25 * std::exp(-6 * eta * a2) * std::pow(eta * a2, 3) *
                        (1 - std::exp(-9 * S / 4));
        EXPECT_NEAR(lossy_herald_probability(c, L) / expect, 1, 1e-9);
    }
}

TEST(LossyHerald, SmallLossCloseToEffectiveFormula) {
    // (1 - eta)|alpha|^2 = 0.025 for a single step.
    auto c = coherent_cat(1, 1.0, 0.0, std::sqrt(0.1), 0.75);
    LossModel L{0.75, InputKind::coherent, std::sqrt(0.1)};
    double lossy = lossy_herald_probability(c, L);
    double eff = coherent_herald_formula(1, 1.0, 0.0, 0.75, std::sqrt(0.1));
    EXPECT_NEAR(lossy / eff, 1.0, 0.03);
}

TEST(LossModel, Validation) {
    LossModel L{1.2, InputKind::coherent, 1.0};
    EXPECT_THROW(L.validate(), ValidationError);
    LossModel T{0.9, InputKind::coherent, 1.0, 1e-3};
    EXPECT_THROW(T.validate(), ValidationError);
}

}  // namespace
}  // namespace catgrow
