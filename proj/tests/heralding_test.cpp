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

namespace catgrow {
namespace {

ProtocolConfig photon_cat(int N, double mu, double nbar, double eta) {
    ProtocolConfig c = cat_config(N, mu, nbar);
    c.efficiency = eta;
    return c;
}

ProtocolConfig coherent_cat(int N, double mu, double nbar, double alpha, double eta) {
    ProtocolConfig c = photon_cat(N, mu, nbar, eta);
    c.input = InputKind::coherent;
    c.alpha = alpha;
    return c;
}

TEST(HeraldProbability, SinglePhotonRowValue) {
    double p = herald_probability(photon_cat(3, 1.0, 0.1, 0.9));
    EXPECT_NEAR(p, 0.25 * 0.729 * (1 - std::exp(-2.7)), 1e-15);
    EXPECT_NEAR(p, 0.170, 5e-4);
}

TEST(HeraldProbability, CoherentOptimumScaling) {
    for (int N : {1, 2, 4}) {
        const double eta = 0.8;
        double a = 1 / std::sqrt(2 * eta);
        double p = herald_probability(coherent_cat(N, 30.0, 0.0, a, eta));
        EXPECT_NEAR(p, scheme_scaling(SchemeKind::coherent_multistep, N), 1e-14);
    }
}

TEST(HeraldProbability, VanishesWithCoupling) {
    EXPECT_LT(herald_probability(photon_cat(3, 1e-9, 0.0, 1.0)), 1e-16);
}

TEST(HeraldProbability, CoherentMaximumAtHalf) {
    const double eta = 0.9;
    double best = 0, best_a = 0;
    for (int i = 1; i <= 4000; ++i) {
        double a = i * 5e-4;
        double p = herald_probability(coherent_cat(3, 1.0, 0.1, a, eta));
        if (p > best) {
            best = p;
            best_a = a;
        }
    }
    EXPECT_NEAR(std::sqrt(eta) * best_a, 1 / std::sqrt(2.0), 1e-3);
}

TEST(HeraldProbability, SinglePhotonMonotone) {
    double prev = 0;
    for (double mu : {0.1, 0.3, 0.7, 1.5}) {
        double p = herald_probability(photon_cat(3, mu, 0.1, 0.9));
        EXPECT_GT(p, prev);
        prev = p;
    }
    prev = 0;
    for (double eta : {0.5, 0.7, 0.9, 1.0}) {
        double p = herald_probability(photon_cat(3, 1.0, 0.1, eta));
        EXPECT_GT(p, prev);
        prev = p;
    }
    auto c = photon_cat(3, 1.0, 0.1, 0.9);
    double p0 = herald_probability(c);
    c.alpha = 3.0;
    EXPECT_EQ(herald_probability(c), p0);
}

TEST(OperatorTrace, MatchesNumberBasisRun) {
    for (int N : {1, 2, 3}) {
        auto c = cat_config(N, 1.0, 0.1);
        double op = operator_trace_probability(c);
        EXPECT_NEAR(op, std::pow(2.0, 1 - 2 * N) * (1 - std::exp(-N * N * 1.2 / 4)), 1e-14);
        FockRun f = fock_run(c);
        double prod = 1;
        for (double p : f.step_probabilities) prod *= p;
        EXPECT_NEAR(op, prod, 1e-10);
    }
}

TEST(OperatorTrace, AuditRatios) {
    auto a = herald_audit(photon_cat(3, 1.0, 0.1, 0.9));
    EXPECT_NEAR(a.ratio, a.expected_ratio, 1e-12);
    EXPECT_NEAR(a.expected_ratio, std::pow(2.0, -3) / 0.729, 1e-15);
    auto b = herald_audit(coherent_cat(2, 1.0, 0.0, 0.5, 0.9));
    EXPECT_NEAR(b.ratio, b.expected_ratio, 1e-12);
}

TEST(SchemeScaling, ValuesAndOrdering) {
    EXPECT_NEAR(scheme_scaling(SchemeKind::photon_multistep, 3), 0.25, 1e-16);
    EXPECT_NEAR(scheme_scaling(SchemeKind::coherent_multistep, 1), 0.5 * std::exp(-1.0), 1e-16);
    for (int N = 1; N <= 10; ++N) {
        EXPECT_GE(scheme_scaling(SchemeKind::photon_multistep, N), scheme_scaling(SchemeKind::noon_multiport, N));
        EXPECT_GE(scheme_scaling(SchemeKind::noon_multiport, N), scheme_scaling(SchemeKind::coherent_multistep, N));
    }
    EXPECT_THROW(scheme_scaling(SchemeKind::photon_multistep, 0), std::invalid_argument);
}

TEST(Noon, PrintedFormula) {
    // Np = 1, phi = pi: 2 e^{-2a^2} a^2 (1 - e^{-mu^2 S / 4})
    double a = 0.7, mu = 1.3, n = 0.2;
    EXPECT_NEAR(noon_probability(1, a, mu, n, kPi),
                2 * std::exp(-2 * a * a) * a * a * (1 - std::exp(-mu * mu * 1.4 / 4)), 1e-15);
    // Large separation, phi = pi, |a|^2 = Np / 2 reduces to 2^{1-Np} e^{-Np}... up to Np^{-Np} (Np/2)^{Np}.
    for (int Np : {2, 3, 5}) {
        double p = noon_probability(Np, std::sqrt(Np / 2.0), 50.0, 0.0, kPi);
        EXPECT_NEAR(p, scheme_scaling(SchemeKind::noon_multiport, Np), 1e-14);
    }
    EXPECT_NEAR(noon_probability(2, a, 0.0, 0.0, kPi), 0.0, 1e-16);
}

TEST(TotalTime, RowValues) {
    const double w = 2 * kPi * 1e6;
    TimingParams t{1000, 3, w, w / 6.28e6};
    EXPECT_NEAR(t.relax_time(), 1e-3, 1e-15);
    double T = total_time(photon_cat(3, 1.0, 0.1, 0.9), t);
    EXPECT_NEAR(T, 5.90, 0.015 * 5.90);
    EXPECT_THROW(total_time(0.0, t), std::domain_error);
}

TEST(TotalTime, CoherentMuchSlower) {
    const double w = 2 * kPi * 1e6;
    TimingParams t{1000, 3, w, w / 6.28e6};
    double photon = total_time(photon_cat(3, 1.0, 0.1, 0.9), t);
    double coh = total_time(coherent_cat(3, 1.0, 0.1, 1 / std::sqrt(2 * 0.9), 0.9), t);
    EXPECT_GT(coh / photon, 30);
    EXPECT_LT(coh / photon, 300);
}

}  // namespace
}  // namespace catgrow
