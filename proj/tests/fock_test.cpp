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

TEST(ThermalDensity, Populations) {
    auto v = thermal_density(0, 30);
    EXPECT_EQ(v.rho(0, 0), cplx(1));
    EXPECT_NEAR(v.trace(), 1, 1e-15);
    auto t = thermal_density(0.1, 30);
    EXPECT_NEAR(t.rho(0, 0).real(), 1 / 1.1, 1e-15);
    auto w = thermal_density(0.7, 80);
    CMatrix X = position_operator(80);
    EXPECT_NEAR((X * X * w.rho).trace().real(), 0.7 + 0.5, 1e-10);
    EXPECT_THROW(thermal_density(1.0, 20), TruncationError);
}

TEST(Operators, CanonicalCommutator) {
    int D = 30;
    CMatrix X = position_operator(D), P = momentum_operator(D);
    CMatrix C = X * P - P * X;
    for (int n = 0; n < D - 1; ++n) EXPECT_NEAR(std::abs(C(n, n) - cplx(0, 1)), 0, 1e-14);
}

TEST(ApplyDescriptor, IdentityAndUnitary) {
    auto rho = thermal_density(0.2, 40);
    auto same = apply_descriptor(rho, OperatorDescriptor::identity(1.0));
    EXPECT_LT((same.rho - rho.rho).cwiseAbs().maxCoeff(), 1e-14);
    auto u = apply_descriptor(rho, OperatorDescriptor{0.6, {{cplx(1), 1}}});
    EXPECT_NEAR(u.trace(), 1.0, 1e-12);
}

TEST(ApplyDescriptor, SmallKickMakesOnePhonon) {
    auto rho = thermal_density(0, 30);
    auto out = apply_descriptor(rho, OperatorDescriptor{0.01, {{cplx(-0.5), 0}, {cplx(0.5), 1}}}).normalized();
    EXPECT_GT(out.rho(1, 1).real(), 1 - 1e-4);
}

TEST(ApplyDescriptor, ReportsLeakage) {
    auto rho = thermal_density(0, 12);
    EXPECT_THROW(apply_descriptor(rho, OperatorDescriptor{5.0, {{cplx(1), 1}}}), TruncationError);
}

TEST(ThermalChannelFock, ZeroAndVacuum) {
    auto rho = thermal_density(0, 40);
    EXPECT_LT((thermal_channel_fock(rho, 0).rho - rho.rho).cwiseAbs().maxCoeff(), 1e-16);
    auto t = thermal_channel_fock(rho, 0.3);
    EXPECT_NEAR(t.trace(), 1.0, 1e-10);
    EXPECT_LT(trace_distance(t, thermal_density(0.3, 40)), 1e-8);
}

TEST(ThermalChannelFock, MatchesPhaseSpaceChannelOnCat) {
    auto cat = run_sequence(cat_config(3, 1.0, 0.0)).state;
    auto fock = fock_run(cat_config(3, 1.0, 0.0)).state;
    auto a = thermal_channel(cat, 0.01);
    auto b = thermal_channel_fock(fock, 0.01);
    Grid g = default_grid(a, 41, 121);
    EXPECT_LT(sup_norm_difference(evaluate(a, g), wigner_of(b, g)), 1e-7);
    // fringe coherences shrink
    EXPECT_LT(std::abs(b.rho(0, 3)), std::abs(fock.rho(0, 3)));
}

TEST(WignerOf, Examples) {
    Grid g{-1, 1, -1, 1, 3, 3};
    EXPECT_NEAR(wigner_of(thermal_density(0, 20), g).at(1, 1), 1 / kPi, 1e-14);
    EXPECT_NEAR(wigner_of(thermal_density(0.5, 60), g).at(1, 1), 1 / (2 * kPi), 1e-12);
    auto cat = fock_run(cat_config(3, 1.0, 0.0)).state;
    Grid h = default_grid(build_scs(3, 1.0, 0.0));
    EXPECT_LT(sup_norm_difference(wigner_of(cat, h), evaluate(build_scs(3, 1.0, 0.0), h)), 1e-7);
}

TEST(WignerOf, RequiresNormalized) {
    FockDensity r = thermal_density(0, 20);
    r.rho *= 2.0;
    EXPECT_THROW(wigner_of(r, square_grid(-1, 1, 3)), std::invalid_argument);
}

TEST(LossyStep, SinglePhotonAndUnitEfficiency) {
    auto rho = thermal_density(0, 40);
    const Phase phi = Phase::turns(1, 3);
    auto a = lossy_step_fock(rho, 0.9, InputKind::single_photon, 0, {0, 1}, phi, 1.0);
    auto b = lossy_step_fock(rho, 1.0, InputKind::single_photon, 0, {0, 1}, phi, 1.0);
    EXPECT_NEAR(a.trace(), 0.9 * b.trace(), 1e-13);
    EXPECT_LT(trace_distance(a.normalized(), b.normalized()), 1e-10);
    ProtocolConfig c = cat_config(1, 1.0, 0.0);
    c.phases = {phi};
    auto direct = apply_descriptor(rho, measurement_operator(c, 1));
    EXPECT_LT((b.rho - direct.rho).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(LossyStep, CoherentUnitEfficiencyMatchesOperator) {
    auto rho = thermal_density(0.1, 50);
    const Phase phi = Phase::turns(1, 4);
    auto b = lossy_step_fock(rho, 1.0, InputKind::coherent, cplx(0.5, 0.2), {1, 1}, phi, 0.7);
    ProtocolConfig c = cat_config(1, 0.7, 0.1);
    c.input = InputKind::coherent;
    c.alpha = cplx(0.5, 0.2);
    c.phases = {phi};
    c.clicks = {{1, 1}};
    auto direct = apply_descriptor(rho, measurement_operator(c, 1));
    EXPECT_LT((b.rho - direct.rho).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(FockDensity, InvariantsAfterRun) {
    auto r = fock_run(cat_config(3, 1.0, 0.1, 1e-2));
    EXPECT_NEAR(r.state.trace(), 1.0, 1e-10);
    EXPECT_LT(r.state.hermiticity_error(), 1e-12);
    EXPECT_GT(r.state.min_eigenvalue(), -1e-10);
    EXPECT_LT(r.state.leakage(), 1e-8);
    EXPECT_GE(r.dimension, fock_dimension(3, 1.0));
}

TEST(DimensionRule, Formula) {
    EXPECT_EQ(fock_dimension(3, 1.0), 53);
    EXPECT_EQ(fock_dimension(1, 0.1), 31);
}

TEST(OracleMeasures, LeeJeongAndMacroscopicity) {
    auto cfg = cat_config(2, 1.0, 0.1, 1e-3);
    auto eng = run_sequence(cfg).state;
    auto fock = fock_run(cfg).state;
    EXPECT_NEAR(fock_lee_jeong(fock), lee_jeong(eng).value, 1e-8);
    EXPECT_NEAR(fock_macroscopicity(fock).value, macroscopicity(eng).value, 1e-6);
}

TEST(OracleCellTest, SmallMatrix) {
    for (int N : {1, 2})
        for (double mu : {0.1, 1.0})
            for (double nth : {0.0, 1e-2}) {
                auto c = oracle_cell(N, mu, 0.1, nth);
                EXPECT_TRUE(c.pass()) << "N=" << N << " mu=" << mu << " nth=" << nth << " W " << c.wigner_sup_norm
                                      << " measures " << c.measure_error << " P " << c.probability_error;
            }
}

}  // namespace
}  // namespace catgrow
