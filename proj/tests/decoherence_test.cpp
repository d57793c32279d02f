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
#include "test_util.hpp"

namespace catgrow {
namespace {

using testing::gk2;
using testing::square_grid;
using testing::sup_diff;

TEST(ThermalChannel, ZeroIsIdentity) {
    auto s = build_scs(3, 1.0, 0.1);
    EXPECT_LT(sup_diff(thermal_channel(s, 0), s, square_grid(-4, 7, 21)), 1e-16);
}

TEST(ThermalChannel, VacuumBecomesThermal) {
    auto out = thermal_channel(thermal_state(0), 0.5);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_NEAR(out.terms()[0].s, 2.0, 1e-15);
    EXPECT_LT(sup_diff(out, thermal_state(0.5), square_grid(-4, 4, 21)), 1e-15);
}

TEST(ThermalChannel, FringeTermMatchesNumericalConvolution) {
    const double nth = 0.01;
    WignerTerm t{cplx(-0.2, 0.05), 0.1, 1.5, 1.2, 3.0, 0.0};
    PhaseSpaceState s({t, {std::conj(t.weight), t.x0, t.p0, t.s, -t.kx, -t.kp}}, false);
    auto out = thermal_channel(s, nth);
    const double L = 8 * std::sqrt(nth);
    for (auto [x, p] : {std::pair{0.0, 1.5}, {0.4, 1.0}, {-0.7, 2.2}}) {
        double conv = gk2(
            [&](double u, double v) {
                return s(x - u, p - v) * std::exp(-(u * u + v * v) / (2 * nth)) / (2 * kPi * nth);
            },
            -L, L, -L, L, 1e-13);
        EXPECT_NEAR(out(x, p), conv, 1e-8) << x << "," << p;
    }
}

TEST(ThermalChannel, RejectsNegative) { EXPECT_THROW(thermal_channel(thermal_state(0), -1e-3), std::invalid_argument); }

TEST(ThermalChannel, Semigroup) {
    auto s = decohered_protocol_state(cat_config(3, 1.0, 0.1, 1e-3));
    auto ab = thermal_channel(thermal_channel(s, 0.02), 0.03);
    auto once = thermal_channel(s, 0.05);
    EXPECT_LT(sup_diff(ab, once, square_grid(-5, 8, 41)), 1e-10);
}

TEST(ThermalChannel, PreservesTrace) {
    auto s = build_scs(4, 0.9, 0.2);
    for (double nth : {1e-4, 1e-2, 0.3}) {
        EXPECT_NEAR(std::abs(total_integral(thermal_channel(s, nth)) - total_integral(s)), 0, 1e-12);
    }
}

TEST(ThermalChannel, SecondMomentGrowth) {
    auto s = thermal_state(0.3);
    auto out = thermal_channel(s, 0.07);
    auto moment = [](const PhaseSpaceState &st, bool px) {
        return gk2([&](double x, double p) { return (px ? p * p : x * x) * st(x, p); }, -12, 12, -12, 12, 1e-12);
    };
    EXPECT_NEAR(moment(out, false) - moment(s, false), 0.07, 1e-9);
    EXPECT_NEAR(moment(out, true) - moment(s, true), 0.07, 1e-9);
}

TEST(DecoheredState, ReducesToIdealCat) {
    for (int N : {1, 3, 5}) {
        auto d = decohered_protocol_state(cat_config(N, 1.0, 0.1, 0));
        EXPECT_LT(sup_diff(d, build_scs(N, 1.0, 0.1), square_grid(-5, N + 5, 41)), 1e-12);
    }
}

TEST(DecoheredState, EquivalentToInterleavedRun) {
    for (int N = 1; N <= 7; ++N) {
        for (double nth : {1e-5, 1e-3, 1e-2}) {
            auto c = cat_config(N, 1.0, 0.1, nth);
            auto d = decohered_protocol_state(c);
            auto r = run_sequence(c).state;
            Grid g = default_grid(d, 41, 121);
            EXPECT_LT(sup_norm_difference(evaluate(d, g), evaluate(r, g)), 1e-9) << "N=" << N << " nth=" << nth;
        }
    }
}

TEST(DecoheredState, RejectsOtherOutcomes) {
    auto c = cat_config(2, 1.0, 0.0, 1e-3, CatBranch::click10);
    EXPECT_THROW(decohered_protocol_state(c), ValidationError);
}

TEST(BathOccupancy, Values) {
    double nb = bath_occupancy(0.1, 2 * kPi * 4.30e6);
    EXPECT_NEAR(nb, 484, 2);
    EXPECT_NEAR(phonons_per_period({nb, 7.54e5, 2 * kPi * 4.30e6}), 4.05e-3, 0.01 * 4.05e-3);
    // hbar omega / k T = ln 2
    double omega = 1e6;
    double T = kHbar * omega / (kBoltzmann * std::log(2.0));
    EXPECT_NEAR(bath_occupancy(T, omega), 1.0, 1e-12);
    EXPECT_LT(bath_occupancy(1e-8, 2 * kPi * 1e6), 1e-100);
    EXPECT_THROW(bath_occupancy(0, 1), std::invalid_argument);
}

TEST(PhononsPerPeriod, Values) {
    double w = 2 * kPi * 3.74e6;
    EXPECT_NEAR(phonons_per_period({bath_occupancy(0.1, w), 3.74e4, w}), 9.40e-2, 0.01 * 9.40e-2);
    EXPECT_NEAR(phonons_per_period({0, kPi * 1e6, 1.0}), 1e-6, 1e-18);
    double w1 = 2 * kPi * 1e6;
    EXPECT_NEAR(phonons_per_period({bath_occupancy(0.1, w1), 6.28e6, w1}), 2.09e-3, 0.01 * 2.09e-3);
}

TEST(Feasibility, Margins) {
    double w1 = 2 * kPi * 1e6;
    ThermalEnvironment env{bath_occupancy(0.1, w1), 6.28e6, w1};
    auto f = feasibility_check(env, 3);
    EXPECT_TRUE(f.pass);
    EXPECT_GT(f.margin, 50);
    double nb = 2.0;
    ThermalEnvironment edge{nb, 2 * kPi * 3 * (2 * nb + 1), 1.0};
    auto e = feasibility_check(edge, 3);
    EXPECT_NEAR(e.margin, 1.0, 1e-14);
    EXPECT_FALSE(e.pass);
    EXPECT_THROW(feasibility_check(env, 0), std::invalid_argument);
}

TEST(Environment, RatesAreConsistent) {
    ThermalEnvironment env{3.0, 1e4, 2e5};
    EXPECT_NEAR(env.intrinsic_decay(), 20.0, 1e-12);
    EXPECT_NEAR(env.decoherence_rate(), 140.0, 1e-11);
}

}  // namespace
}  // namespace catgrow
