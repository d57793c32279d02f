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

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "catgrow/phase_space.hpp"
#include "catgrow/quadrature.hpp"

namespace catgrow {

/// Scales that drive grid and tile sizes for a phase-space field.
struct FieldGeometry {
    Box box;             // integration domain; the field is negligible outside
    double kx = 0;       // largest fringe wavenumber along X
    double kp = 0;       // largest fringe wavenumber along P
    double sigma = 0.7;  // narrowest Gaussian standard deviation
};

template <class F>
concept PhaseSpaceField = requires(const F &f, double x, double p, std::span<const double> xs) {
    { f(x, p) } -> std::convertible_to<double>;
    { f.tensor(xs, xs) } -> std::convertible_to<std::vector<double>>;
    { f.geometry() } -> std::convertible_to<FieldGeometry>;
};

template <class D>
concept LineDensity = requires(const D &d, double u) {
    { d.derivs(u) } -> std::convertible_to<DensityDerivs>;
    { d.support(1.0) } -> std::convertible_to<std::pair<double, double>>;
    { d.max_wavenumber() } -> std::convertible_to<double>;
    { d.min_s() } -> std::convertible_to<double>;
    { d.noise_floor() } -> std::convertible_to<double>;
};

/// Adapter exposing a PhaseSpaceState as a PhaseSpaceField.
class StateField {
   public:
    explicit StateField(const PhaseSpaceState &state) : state_(&state), ev_(state) {}
    double operator()(double x, double p) const { return (*state_)(x, p); }
    std::vector<double> tensor(std::span<const double> xs, std::span<const double> ps) const {
        return ev_.evaluate(xs, ps, TensorEvaluator::kValue).w;
    }
    FieldGeometry geometry() const {
        return {support_box(*state_, 8.5), max_abs_kx(*state_), max_abs_kp(*state_),
                std::sqrt(min_variance_param(*state_) / 2)};
    }
    const TensorEvaluator &evaluator() const { return ev_; }

   private:
    const PhaseSpaceState *state_;
    TensorEvaluator ev_;
};

struct Estimate {
    double value = 0;
    double error = 0;
};

struct MinimumResult {
    double value = 0;
    double x = 0;
    double p = 0;
    double error = 0;
};

/// Global minimum: grid scan at >= 8 samples per fringe period, then
/// Nelder-Mead from the lowest local minima of the scan.
template <PhaseSpaceField F>
MinimumResult min_wigner(const F &field, int candidates = 12) {
    FieldGeometry g = field.geometry();
    auto spacing = [&](double k) {
        double h = g.sigma / 3;
        if (k > 0) h = std::min(h, 2 * kPi / (8 * k));
        return h;
    };
    auto axis = [](double lo, double hi, double h) {
        int n = std::clamp((int)std::ceil((hi - lo) / h) + 1, 3, 6000);
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
        return v;
    };
    auto xs = axis(g.box.x_min, g.box.x_max, spacing(g.kx));
    auto ps = axis(g.box.p_min, g.box.p_max, spacing(g.kp));
    const int nx = (int)xs.size(), np = (int)ps.size();
    std::vector<double> vals(size_t(nx) * np);
    const int chunk = std::max(1, 4000000 / nx);
    for (int j0 = 0; j0 < np; j0 += chunk) {
        int j1 = std::min(np, j0 + chunk);
        auto part = field.tensor(xs, std::span<const double>(ps.data() + j0, j1 - j0));
        for (int i = 0; i < nx; ++i)
            for (int j = j0; j < j1; ++j) vals[size_t(i) * np + j] = part[size_t(i) * (j1 - j0) + (j - j0)];
    }
    struct Cand {
        double v;
        int i, j;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < np; ++j) {
            double v = vals[size_t(i) * np + j];
            bool local = true;
            for (int di = -1; di <= 1 && local; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    int a = i + di, b = j + dj;
                    if ((di || dj) && a >= 0 && a < nx && b >= 0 && b < np && vals[size_t(a) * np + b] < v) {
                        local = false;
                        break;
                    }
                }
            if (local) cands.push_back({v, i, j});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand &a, const Cand &b) { return a.v < b.v; });
    MinimumResult best{cands.front().v, xs[cands.front().i], ps[cands.front().j], 0};
    if (best.value >= 0) {
        // Nonnegative field: the infimum sits in the far tails.
        return best;
    }
    double step = std::min(xs[1] - xs[0], ps[1] - ps[0]);
    int n = std::min<int>(candidates, (int)cands.size());
    for (int c = 0; c < n; ++c) {
        if (cands[c].v >= 0) break;
        auto m = nelder_mead_2d([&](double x, double p) { return field(x, p); }, xs[cands[c].i], ps[cands[c].j],
                                step, 1e-14);
        if (m.value < best.value) best = {m.value, m.x, m.p, 0};
    }
    // Local curvature bounds the value error of the converged simplex.
    double h = 1e-4;
    double c0 = field(best.x, best.p);
    double curv = std::abs(field(best.x + h, best.p) + field(best.x - h, best.p) + field(best.x, best.p + h) +
                           field(best.x, best.p - h) - 4 * c0) /
                  (h * h);
    best.error = std::max(1e-12, curv * 1e-14);
    return best;
}

namespace detail {

template <PhaseSpaceField F>
class NegativePartIntegrator {
   public:
    NegativePartIntegrator(const F &f, int order) : f_(f), rule_(gauss_legendre(order)), order_(order) {}

    // Integral of max(-W, 0) over a tile on an order x order rule.
    double coarse(double x0, double x1, double p0, double p1) const {
        std::vector<double> xs, wx, ps, wp;
        map_rule(rule_, x0, x1, xs, wx);
        map_rule(rule_, p0, p1, ps, wp);
        auto v = f_.tensor(xs, ps);
        double acc = 0;
        for (int i = 0; i < order_; ++i)
            for (int j = 0; j < order_; ++j) acc += wx[i] * wp[j] * std::max(-v[size_t(i) * order_ + j], 0.0);
        return acc;
    }

    // Refines one tile given its coarse value; appends the error estimate.
    double refine(double x0, double x1, double p0, double p1, double coarse_value, double tol, int depth,
                  double &err) const {
        double xm = 0.5 * (x0 + x1), pm = 0.5 * (p0 + p1);
        std::vector<double> xs, wx, ps, wp;
        map_rule(rule_, x0, xm, xs, wx);
        map_rule(rule_, xm, x1, xs, wx);
        map_rule(rule_, p0, pm, ps, wp);
        map_rule(rule_, pm, p1, ps, wp);
        auto v = f_.tensor(xs, ps);
        const int n2 = 2 * order_;
        double sub[2][2] = {{0, 0}, {0, 0}};
        for (int i = 0; i < n2; ++i)
            for (int j = 0; j < n2; ++j)
                sub[i / order_][j / order_] += wx[i] * wp[j] * std::max(-v[size_t(i) * n2 + j], 0.0);
        double fine = sub[0][0] + sub[0][1] + sub[1][0] + sub[1][1];
        double diff = std::abs(fine - coarse_value);
        if (diff <= tol || depth >= 12) {
            err += diff;
            return fine;
        }
        double xe[3] = {x0, xm, x1}, pe[3] = {p0, pm, p1};
        double total = 0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                total += refine(xe[a], xe[a + 1], pe[b], pe[b + 1], sub[a][b], tol / 2, depth + 1, err);
        return total;
    }

   private:
    const F &f_;
    const QuadratureRule &rule_;
    int order_;
};

// Strip edges aligned with the zeros (n + 1/2) pi / k of a fringe centred at
// the origin, then split so no strip is wider than max_width.
inline std::vector<double> fringe_edges(double lo, double hi, double k, double max_width) {
    std::vector<double> cuts{lo};
    if (k > 0 && kPi / k < (hi - lo)) {
        double period = kPi / k;
        long n0 = (long)std::ceil(lo / period - 0.5), n1 = (long)std::floor(hi / period - 0.5);
        for (long n = n0; n <= n1; ++n) {
            double x = (n + 0.5) * period;
            if (x > cuts.back() + 1e-12 * period && x < hi) cuts.push_back(x);
        }
    }
    cuts.push_back(hi);
    std::vector<double> edges{cuts.front()};
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto e = panel_edges(cuts[i], cuts[i + 1], max_width);
        edges.insert(edges.end(), e.begin() + 1, e.end());
    }
    return edges;
}

}  // namespace detail

/// delta = integral of max(-W, 0), i.e. (int |W| - 1)/2 for a normalized W.
/// Tiles follow the fringe zeros; each tile is refined adaptively.
template <PhaseSpaceField F>
Estimate negative_volume(const F &field, double tol = 1e-6, int order = 8) {
    FieldGeometry g = field.geometry();
    auto xe = detail::fringe_edges(g.box.x_min, g.box.x_max, g.kx, g.sigma / 2);
    auto pe = detail::fringe_edges(g.box.p_min, g.box.p_max, g.kp, g.sigma / 2);
    detail::NegativePartIntegrator<F> integ(field, order);
    double area = (g.box.x_max - g.box.x_min) * (g.box.p_max - g.box.p_min);
    Estimate out;
    for (size_t i = 0; i + 1 < xe.size(); ++i) {
        for (size_t j = 0; j + 1 < pe.size(); ++j) {
            double a = (xe[i + 1] - xe[i]) * (pe[j + 1] - pe[j]);
            double tile_tol = std::max(tol * a / area, 1e-16);
            double c = integ.coarse(xe[i], xe[i + 1], pe[j], pe[j + 1]);
            out.value += integ.refine(xe[i], xe[i + 1], pe[j], pe[j + 1], c, tile_tol, 0, out.error);
        }
    }
    return out;
}

struct LeeJeongResult {
    double value = 0;        // -(pi/2) int W (lap W + 2W)
    double gradient_form = 0;  // (pi/2) int (|grad W|^2 - 2 W^2)
    double error = 0;        // |difference| between the two forms
};

/// Lee-Jeong measure with analytic term derivatives and composite
/// Gauss-Legendre quadrature (panels of at most a quarter fringe period).
inline LeeJeongResult lee_jeong(const PhaseSpaceState &state, int order = 10) {
    if (!state.normalized()) throw std::invalid_argument("lee_jeong: state must be normalized");
    TensorEvaluator ev(state);
    Box b = support_box(state, 8.5);
    double sigma = std::sqrt(min_variance_param(state) / 2);
    double kx = max_abs_kx(state), kp = max_abs_kp(state);
    double hx = kx > 0 ? std::min(sigma, kPi / (2 * kx)) : sigma;
    double hp = kp > 0 ? std::min(sigma, kPi / (2 * kp)) : sigma;
    auto [xs, wx] = composite_rule(panel_edges(b.x_min, b.x_max, hx), order);
    auto [ps, wp] = composite_rule(panel_edges(b.p_min, b.p_max, hp), order);
    const size_t nx = xs.size();
    const size_t chunk = std::max<size_t>(order, (size_t)(2000000 / std::max<size_t>(nx, 1)));
    double laplace_form = 0, grad_form = 0;
    for (size_t j0 = 0; j0 < ps.size(); j0 += chunk) {
        size_t j1 = std::min(ps.size(), j0 + chunk);
        auto r = ev.evaluate(xs, std::span<const double>(ps.data() + j0, j1 - j0),
                             TensorEvaluator::kValue | TensorEvaluator::kGradient | TensorEvaluator::kLaplacian);
        const size_t m = j1 - j0;
        for (size_t i = 0; i < nx; ++i) {
            for (size_t j = 0; j < m; ++j) {
                size_t k = i * m + j;
                double w = wx[i] * wp[j0 + j];
                double W = r.w[k];
                laplace_form += w * W * (r.lap[k] + 2 * W);
                grad_form += w * (r.wx[k] * r.wx[k] + r.wp[k] * r.wp[k] - 2 * W * W);
            }
        }
    }
    LeeJeongResult out;
    out.value = -kPi / 2 * laplace_form;
    out.gradient_form = kPi / 2 * grad_form;
    out.error = std::abs(out.value - out.gradient_form);
    return out;
}

inline constexpr double kCfiZeroThreshold = 1e-13;

/// Classical Fisher information int p'^2/p of a quadrature marginal.  Where
/// p < 1e-13 max p the integrand is replaced by its zero limit 2 p''; the
/// cutoff is raised to the evaluation's rounding level when that is larger.
template <LineDensity D>
Estimate cfi_quadrature(const D &density, double rel_tol = 1e-11) {
    auto [lo, hi] = density.support(9.0);
    double sigma = std::sqrt(density.min_s() / 2);
    double k = density.max_wavenumber();
    double h = k > 0 ? std::min(sigma, kPi / k) : sigma;
    auto bp = panel_edges(lo, hi, h);
    double pmax = 0;
    for (size_t i = 0; i + 1 < bp.size(); ++i) {
        for (double t : {bp[i], 0.5 * (bp[i] + bp[i + 1])}) pmax = std::max(pmax, density.derivs(t).p);
    }
    double thr = std::max(kCfiZeroThreshold * pmax, 1e3 * density.noise_floor());
    auto integrand = [&](double u) {
        DensityDerivs d = density.derivs(u);
        if (d.p < thr) return 2 * std::max(d.d2p, 0.0);
        return d.dp * d.dp / d.p;
    };
    double abs_tol = std::max(1e-14, 1e4 * density.noise_floor() / std::max(pmax, 1e-300));
    auto r = integrate_adaptive(integrand, bp, abs_tol, rel_tol, 4000);
    return {r.value, r.error};
}

inline Estimate cfi_quadrature(const PhaseSpaceState &state, double lambda) {
    return cfi_quadrature(marginal(state, lambda));
}

struct MacroscopicityResult {
    double value = 0;           // half the largest Fisher information
    double optimal_lambda = 0;  // in (-pi/2, pi/2]
    double error = 0;
};

inline double wrap_half_turn(double lambda) {
    double l = std::remainder(lambda, kPi);  // [-pi/2, pi/2]
    if (l <= -kPi / 2) l += kPi;
    return l;
}

/// Scans lambda over `scan` points of [0, pi), then golden-section refines
/// around the best point.  `make(lambda)` builds the marginal density.
template <class Factory>
MacroscopicityResult macroscopicity_scan(Factory &&make, int scan = 181) {
    std::vector<double> F(scan);
    double step = kPi / scan;
    int best = 0;
    for (int i = 0; i < scan; ++i) {
        F[i] = cfi_quadrature(make(i * step)).value;
        if (F[i] > F[best]) best = i;
    }
    double center = best * step;
    auto [lam, fmax] = golden_section_max([&](double l) { return cfi_quadrature(make(l)).value; },
                                          center - step, center + step, 1e-9);
    if (F[best] > fmax) {
        lam = center;
        fmax = F[best];
    }
    auto e = cfi_quadrature(make(lam));
    return {0.5 * e.value, wrap_half_turn(lam), 0.5 * e.error + 1e-9 * e.value};
}

inline MacroscopicityResult macroscopicity(const PhaseSpaceState &state) {
    if (!state.normalized()) throw std::invalid_argument("macroscopicity: state must be normalized");
    return macroscopicity_scan([&](double l) { return marginal(state, l); });
}

struct MeasureReport {
    double min_w = 0;
    double min_w_x = 0;
    double min_w_p = 0;
    double delta = 0;
    double lee_jeong = 0;
    double macroscopicity = 0;
    double optimal_lambda = 0;
    double min_w_error = 0;
    double delta_error = 0;
    double lee_jeong_error = 0;
    double macroscopicity_error = 0;
    double herald_probability = std::numeric_limits<double>::quiet_NaN();
    double total_time = std::numeric_limits<double>::quiet_NaN();
};

inline MeasureReport compute_measures(const PhaseSpaceState &state) {
    if (!state.normalized()) throw std::invalid_argument("compute_measures: state must be normalized");
    MeasureReport r;
    StateField field(state);
    auto m = min_wigner(field);
    r.min_w = m.value;
    r.min_w_x = m.x;
    r.min_w_p = m.p;
    r.min_w_error = m.error;
    auto d = negative_volume(field);
    r.delta = d.value;
    r.delta_error = d.error;
    auto lj = lee_jeong(state);
    r.lee_jeong = lj.value;
    r.lee_jeong_error = lj.error;
    auto mc = macroscopicity(state);
    r.macroscopicity = mc.value;
    r.optimal_lambda = mc.optimal_lambda;
    r.macroscopicity_error = mc.error;
    return r;
}

struct SeriesValue {
    double value = 0;
    bool in_validity_range = true;  // N mu >= 4
};

/// Closed-form delta of a well-separated cat from the Poisson-summed
/// |cos| integral: 1/2 {(4 Ncal/pi) sum_k e^{-k^2 D^2 S} (-1)^k / (1 + (-1)^k 2k) + E/(1-E)},
/// D = N mu, S = 1 + 2 nbar, E = e^{-D^2 S/4}, 1/(2 Ncal) = 1 - E.
inline SeriesValue scs_delta_series(int N, double mu, double nbar) {
    double D2S = double(N) * N * mu * mu * (1 + 2 * nbar);
    double E = std::exp(-D2S / 4);
    double one_minus_E = -std::expm1(-D2S / 4);
    double Ncal = 1 / (2 * one_minus_E);
    double sum = 1;
    for (int k = 1; k < 100000; ++k) {
        double g = std::exp(-double(k) * k * D2S);
        double sign = k % 2 ? -1.0 : 1.0;
        double t = g * sign * (1 / (1 + sign * 2 * k) + 1 / (1 - sign * 2 * k));  // k and -k
        sum += t;
        if (g < 1e-17) break;
    }
    return {0.5 * (4 * Ncal / kPi * sum + E / one_minus_E), N * mu >= 4};
}

enum class Regime { fock_like, kitten, cat };

inline const char *to_string(Regime r) {
    switch (r) {
        case Regime::fock_like: return "fock_like";
        case Regime::kitten: return "kitten";
        default: return "cat";
    }
}

/// fock_like below N mu = sqrt((1+2 nbar)/2), cat above 4 sqrt((1+2 nbar)/2).
inline Regime regime_classify(int N, double mu, double nbar) {
    double D = N * mu;
    double scale = std::sqrt(1 + 2 * nbar);
    if (D < scale / std::sqrt(2.0)) return Regime::fock_like;
    if (D > 4 * scale / std::sqrt(2.0)) return Regime::cat;
    return Regime::kitten;
}

}  // namespace catgrow
