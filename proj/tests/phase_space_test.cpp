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
#include <random>

#include "catgrow/catgrow.hpp"
#include "catgrow/fock.hpp"
#include "catgrow/io.hpp"
#include "test_util.hpp"

namespace catgrow {
namespace {

using testing::gk2;
using testing::square_grid;
using testing::sup_diff;

WignerTerm vacuum_term() { return {cplx(1 / kPi), 0, 0, 1, 0, 0}; }

TEST(TermIntegral, Vacuum) { EXPECT_NEAR(std::abs(term_integral(vacuum_term()) - 1.0), 0, 1e-15); }

TEST(TermIntegral, FringeTermAgainstQuadrature) {
    WignerTerm t{cplx(1 / kPi), 0, 1.5, 1, 3, 0};
    cplx closed = term_integral(t);
    EXPECT_NEAR(closed.real(), std::exp(-9.0 / 4), 1e-15);
    EXPECT_NEAR(closed.imag(), 0, 1e-15);
    double re = gk2([&](double x, double p) { return t(x, p).real(); }, -9, 9, -7.5, 10.5);
    double im = gk2([&](double x, double p) { return t(x, p).imag(); }, -9, 9, -7.5, 10.5);
    EXPECT_NEAR(re, 0.1053992245618643, 1e-9);
    EXPECT_NEAR(im, 0, 1e-9);
}

TEST(TermIntegral, ZeroWeight) {
    WignerTerm t{cplx(0), 0.3, -1, 2, 1, 1};
    EXPECT_EQ(term_integral(t), cplx(0));
}

TEST(TermIntegral, RandomTermsMatchQuadrature) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 6; ++trial) {
        WignerTerm t{cplx(u(rng), u(rng)), u(rng), u(rng), 0.6 + std::abs(u(rng)), 2 * u(rng), 2 * u(rng)};
        cplx closed = term_integral(t);
        double L = 6 * std::sqrt(t.s);
        double re = gk2([&](double x, double p) { return t(x, p).real(); }, t.x0 - L, t.x0 + L, t.p0 - L, t.p0 + L);
        double im = gk2([&](double x, double p) { return t(x, p).imag(); }, t.x0 - L, t.x0 + L, t.p0 - L, t.p0 + L);
        double scale = std::abs(t.weight) * kPi * t.s;
        EXPECT_NEAR(re, closed.real(), 1e-8 * scale);
        EXPECT_NEAR(im, closed.imag(), 1e-8 * scale);
    }
}

TEST(Evaluate, VacuumPeak) {
    PhaseSpaceState v({vacuum_term()}, true);
    Grid g{-1, 1, -1, 1, 3, 3};
    Field f = evaluate(v, g);
    EXPECT_NEAR(f.at(1, 1), 1 / kPi, 1e-15);
}

TEST(Evaluate, PureCatFringeCenter) {
    auto scs = build_scs(3, 1.0, 0.0);
    EXPECT_NEAR(scs(0, 1.5), -1 / kPi, 1e-12);
}

TEST(Evaluate, GridIntegralIsOne) {
    auto scs = build_scs(3, 1.0, 0.1);
    double s = testing::gk2([&](double x, double p) { return scs(x, p); }, -8, 8, -8, 11, 1e-10);
    EXPECT_NEAR(s, 1.0, 1e-8);
}

TEST(Evaluate, RejectsCorruptedTermList) {
    WignerTerm t{cplx(1 / kPi), 0, 0, 1, 2, 0};  // fringe without its partner
    PhaseSpaceState bad({t}, false);
    EXPECT_THROW(evaluate(bad, square_grid(-3, 3, 21)), HermiticityError);
}

TEST(Evaluate, Linearity) {
    auto a = build_scs(2, 1.0, 0.0), b = thermal_state(0.4);
    auto sum = a + b;
    Grid g = square_grid(-4, 5, 41);
    Field fa = evaluate(a, g), fb = evaluate(b, g), fs = evaluate(sum, g);
    for (size_t i = 0; i < fs.values.size(); ++i) EXPECT_NEAR(fs.values[i], fa.values[i] + fb.values[i], 1e-12);
}

TEST(Normalize, CatNormalizationConstant) {
    // Unnormalized cat: two populations and the fringe pair, -2 cos split into two exponentials.
    double S = 1.2, D = 3;
    std::vector<WignerTerm> t{{cplx(1 / (kPi * S)), 0, 0, S, 0, 0},
                              {cplx(1 / (kPi * S)), 0, D, S, 0, 0},
                              {cplx(-1 / (kPi * S)), 0, D / 2, S, D, 0},
                              {cplx(-1 / (kPi * S)), 0, D / 2, S, -D, 0}};
    PhaseSpaceState raw(t, false);
    auto n = normalize(raw);
    double scale = n.terms()[0].weight.real() / t[0].weight.real();
    // 2 * (1 - e^{-D^2 S / 4}) = 1 / Ncal
    EXPECT_NEAR(1 / (2 * scale), 1 - std::exp(-2.7), 1e-13);
    EXPECT_NEAR(1 / (2 * scale), 0.9328, 5e-5);
    EXPECT_TRUE(n.normalized());
}

TEST(Normalize, IdempotentAndScaleInvariant) {
    auto scs = build_scs(3, 1.0, 0.1);
    auto again = normalize(scs);
    Grid g = square_grid(-4, 6, 31);
    EXPECT_LT(sup_diff(scs, again, g), 1e-15);
    auto scaled = normalize(scs.scaled(7.0));
    EXPECT_LT(sup_diff(scs, scaled, g), 1e-14);
}

TEST(Normalize, ZeroIntegralFails) {
    std::vector<WignerTerm> t{vacuum_term(), {cplx(-1 / kPi), 0, 0, 1, 0, 0}};
    EXPECT_THROW(normalize(PhaseSpaceState(t, false)), std::domain_error);
}

TEST(MergeTerms, ThreeStepCatCollapsesToFourTerms) {
    ProtocolConfig c = cat_config(3, 1.0, 0.0);
    PhaseSpaceState s = thermal_state(0.0);
    size_t raw = 1;
    for (int j = 1; j <= 3; ++j) {
        s = apply_step(s, measurement_operator(c, j));
        raw *= 4;
    }
    EXPECT_EQ(raw, 64u);
    EXPECT_EQ(s.size(), 4u);
    auto n = normalize(s);
    Grid g = square_grid(-5, 8, 41);
    EXPECT_LT(sup_diff(n, build_scs(3, 1.0, 0.0), g), 1e-12);
}

TEST(MergeTerms, ExactCancellationAndDisjointTerms) {
    WignerTerm a = vacuum_term(), b = vacuum_term();
    b.weight = -a.weight;
    EXPECT_EQ(merge_terms(PhaseSpaceState({a, b}, false)).size(), 0u);
    WignerTerm c = vacuum_term();
    c.p0 = 2;
    EXPECT_EQ(merge_terms(PhaseSpaceState({a, c}, false)).size(), 2u);
}

TEST(MergeTerms, PreservesField) {
    auto s = thermal_state(0.2);
    auto doubled = s + s.scaled(2.0) + s.scaled(-0.5);
    auto m = merge_terms(doubled);
    EXPECT_EQ(m.size(), 1u);
    EXPECT_LT(sup_diff(doubled, m, square_grid(-4, 4, 21)), 1e-10);
}

TEST(OneSidedDisplacement, BothSidesDisplaceVacuum) {
    PhaseSpaceState v({vacuum_term()}, true);
    auto d = one_sided_displacement(v, 0.7, 0.7);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_NEAR(d.terms()[0].p0, 0.7, 1e-15);
    EXPECT_EQ(d.terms()[0].kx, 0);
    auto id = one_sided_displacement(v, 0, 0);
    EXPECT_LT(sup_diff(id, v, square_grid(-3, 3, 11)), 1e-16);
}

TEST(OneSidedDisplacement, LeftOnlyMatchesNumberBasis) {
    const double mu = 0.8;
    PhaseSpaceState v({vacuum_term()}, true);
    auto d = one_sided_displacement(v, mu, 0);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_NEAR(d.terms()[0].p0, mu / 2, 1e-15);
    EXPECT_NEAR(d.terms()[0].kx, mu, 1e-15);
    // rho = e^{i mu X}|0><0| in a truncated number basis, Wigner via the Laguerre formula.
    int D = 40;
    FockDensity vac = thermal_density(0, D);
    CMatrix M = PositionBasis::get(D).exp_ix(mu);
    CMatrix rho = M * vac.rho;
    // Off-diagonal W is complex; compare the Hermitian parts.
    CMatrix herm = (rho + rho.adjoint()) / 2.0;
    auto dh = d + PhaseSpaceState(std::vector<WignerTerm>{{std::conj(d.terms()[0].weight), 0, mu / 2, 1, -mu, 0}}, false);
    Grid g = square_grid(-3, 3, 13);
    std::vector<double> xs = g.xs(), ps = g.ps();
    std::vector<double> out(g.np);
    for (int i = 0; i < g.nx; ++i) {
        std::vector<double> xrow(g.np, xs[i]);
        fock_wigner_batch(herm, xrow, ps, out);
        for (int j = 0; j < g.np; ++j) EXPECT_NEAR(out[j], 0.5 * dh(xs[i], ps[j]), 1e-12);
    }
}

TEST(OneSidedDisplacement, MatchedPairsStayHermitian) {
    auto scs = build_scs(2, 0.9, 0.3);
    auto out = one_sided_displacement(scs, 0.4, 0.4);
    EXPECT_TRUE(is_hermitian(out));
    auto left = one_sided_displacement(scs, 0.4, 0.0), right = one_sided_displacement(scs, 0.0, 0.4);
    EXPECT_TRUE(is_hermitian(left + right));
}

TEST(Marginal, VacuumIsGaussianAtAnyAngle) {
    PhaseSpaceState v({vacuum_term()}, true);
    for (double lam : {0.0, 0.4, 1.3, 2.9}) {
        auto m = marginal(v, lam);
        for (double x : {-1.5, 0.0, 0.7}) EXPECT_NEAR(m(x), std::exp(-x * x) / std::sqrt(kPi), 1e-14);
    }
}

TEST(Marginal, PureCatPositionMarginal) {
    auto scs = build_scs(3, 1.0, 0.0);
    auto m = marginal(scs, 0.0);
    double norm = 1 / (2 * (1 - std::exp(-9.0 / 4)));
    for (double x : {-2.0, -0.5, 0.0, 0.3, 1.1, 2.5}) {
        // |<x|psi>|^2 with psi ~ (e^{3iX} - 1)|0>
        double expect = 2 * norm * std::exp(-x * x) / std::sqrt(kPi) * (1 - std::cos(3 * x));
        EXPECT_NEAR(m(x), expect, 1e-13);
        EXPECT_GE(m(x), -1e-10);
        double grid = testing::gk([&](double p) { return scs(x, p); }, -10, 13);
        EXPECT_NEAR(m(x), grid, 1e-8);
    }
}

TEST(Marginal, IntegratesToOneOverAngleScan) {
    auto s = decohered_protocol_state(cat_config(3, 1.0, 0.1, 1e-3));
    for (int i = 0; i < 32; ++i) {
        double lam = kPi * i / 32;
        auto m = marginal(s, lam);
        EXPECT_NEAR(m.integral(), 1.0, 1e-8) << "lambda " << lam;
        auto [a, b] = m.support(8);
        EXPECT_NEAR(testing::gk([&](double x) { return m(x); }, a, b), 1.0, 1e-8);
    }
}

TEST(Marginal, RejectsUnnormalized) {
    PhaseSpaceState raw({vacuum_term()}, false);
    EXPECT_THROW(marginal(raw, 0), std::invalid_argument);
}

TEST(FieldExport, BinaryRoundTripAndCsvHeader) {
    auto scs = build_scs(2, 1.0, 0.0);
    Field f = evaluate(scs, Grid{-3, 3, -2, 4, 7, 5});
    std::string path = ::testing::TempDir() + "/field.bin";
    Json meta = base_metadata();
    write_field_binary(path, f, meta);
    Field g = read_field_binary(path);
    ASSERT_EQ(g.values.size(), f.values.size());
    for (size_t i = 0; i < f.values.size(); ++i) EXPECT_EQ(g.values[i], f.values[i]);
    EXPECT_EQ(g.grid.nx, 7);
    write_field_csv(path + ".csv", f, meta);
    std::ifstream in(path + ".csv");
    std::string line;
    int comments = 0;
    while (std::getline(in, line) && line.rfind("#", 0) == 0) ++comments;
    EXPECT_GT(comments, 0);
    EXPECT_EQ(line, "x,p,w");
}

TEST(DefaultGrid, ResolvesFringes) {
    auto scs = build_scs(4, 1.0, 0.0);
    Grid g = default_grid(scs);
    double dx = (g.x_max - g.x_min) / (g.nx - 1);
    EXPECT_LE(dx, 2 * kPi / (8 * 4.0) + 1e-12);
    EXPECT_LE(g.p_min, -6 * std::sqrt(0.5) + 1e-12);
    EXPECT_GE(g.p_max, 4 + 6 * std::sqrt(0.5) - 1e-12);
}

}  // namespace
}  // namespace catgrow
