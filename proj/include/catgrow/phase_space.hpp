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
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace catgrow {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// weight * exp[i(kx X + kp P)] * exp[-((X-x0)^2 + (P-p0)^2)/s]
struct WignerTerm {
    cplx weight{0.0, 0.0};
    double x0 = 0;
    double p0 = 0;
    double s = 1;
    double kx = 0;
    double kp = 0;

    bool valid() const {
        return s > 0 && std::isfinite(s) && std::isfinite(x0) && std::isfinite(p0) && std::isfinite(kx) &&
               std::isfinite(kp) && std::isfinite(weight.real()) && std::isfinite(weight.imag());
    }

    cplx operator()(double x, double p) const {
        double dx = x - x0, dp = p - p0;
        double g = std::exp(-(dx * dx + dp * dp) / s);
        if (g == 0) {
            return 0;
        }
        return weight * std::polar(g, kx * x + kp * p);
    }

    bool operator==(const WignerTerm &) const = default;
};

inline cplx term_integral(const WignerTerm &t) {
    return t.weight * kPi * t.s * std::polar(std::exp(-(t.kx * t.kx + t.kp * t.kp) * t.s / 4), t.kx * t.x0 + t.kp * t.p0);
}

class PhaseSpaceState {
   public:
    PhaseSpaceState() = default;
    explicit PhaseSpaceState(std::vector<WignerTerm> terms, bool normalized = false)
        : terms_(std::move(terms)), normalized_(normalized) {
        for (const auto &t : terms_) {
            if (!t.valid()) {
                throw std::invalid_argument("PhaseSpaceState: term with non-positive s or non-finite field");
            }
        }
    }

    const std::vector<WignerTerm> &terms() const { return terms_; }
    bool normalized() const { return normalized_; }
    size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    cplx complex_value(double x, double p) const {
        cplx acc = 0;
        for (const auto &t : terms_) {
            acc += t(x, p);
        }
        return acc;
    }

    double operator()(double x, double p) const { return complex_value(x, p).real(); }

    /// Sum of |weight|; bounds the magnitude of any partial sum at a point.
    double weight_mass() const {
        double m = 0;
        for (const auto &t : terms_) {
            m += std::abs(t.weight);
        }
        return m;
    }

    PhaseSpaceState scaled(cplx factor) const {
        auto out = terms_;
        for (auto &t : out) {
            t.weight *= factor;
        }
        return PhaseSpaceState(std::move(out), false);
    }

    friend PhaseSpaceState operator+(const PhaseSpaceState &a, const PhaseSpaceState &b) {
        auto out = a.terms_;
        out.insert(out.end(), b.terms_.begin(), b.terms_.end());
        return PhaseSpaceState(std::move(out), false);
    }

   private:
    std::vector<WignerTerm> terms_;
    bool normalized_ = false;
};

inline cplx total_integral(const PhaseSpaceState &state) {
    cplx acc = 0;
    for (const auto &t : state.terms()) {
        acc += term_integral(t);
    }
    return acc;
}

struct Grid {
    double x_min = -5, x_max = 5;
    double p_min = -5, p_max = 5;
    int nx = 101, np = 101;

    void validate() const {
        if (nx < 2 || np < 2) {
            throw std::invalid_argument("Grid: nx and np must be at least 2");
        }
        if (!(x_max > x_min) || !(p_max > p_min)) {
            throw std::invalid_argument("Grid: bounds must be ordered");
        }
    }
    double x(int i) const { return x_min + (x_max - x_min) * i / (nx - 1); }
    double p(int j) const { return p_min + (p_max - p_min) * j / (np - 1); }
    std::vector<double> xs() const {
        std::vector<double> v(nx);
        for (int i = 0; i < nx; ++i) v[i] = x(i);
        return v;
    }
    std::vector<double> ps() const {
        std::vector<double> v(np);
        for (int j = 0; j < np; ++j) v[j] = p(j);
        return v;
    }
};

/// Row-major field, values[i * np + j] at (x_i, p_j).
struct Field {
    Grid grid;
    std::vector<double> values;

    double at(int i, int j) const { return values[(size_t)i * grid.np + j]; }
    double &at(int i, int j) { return values[(size_t)i * grid.np + j]; }
    double max_abs() const {
        double m = 0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
    double min() const { return *std::min_element(values.begin(), values.end()); }
};

inline double sup_norm_difference(const Field &a, const Field &b) {
    if (a.values.size() != b.values.size()) {
        throw std::invalid_argument("sup_norm_difference: grid mismatch");
    }
    double m = 0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    }
    return m;
}

/// Thrown when the imaginary part of an evaluated field exceeds its rounding allowance.
class HermiticityError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Separable evaluation of a state on a tensor grid.  Terms sharing a momentum
/// factor (p0, kp, s) are grouped so that the cost per grid point is one
/// complex multiply-add per group.
class TensorEvaluator {
   public:
    enum Output : unsigned { kValue = 1, kGradient = 2, kLaplacian = 4 };

    struct Result {
        int nx = 0, np = 0;
        std::vector<double> w, wx, wp, lap;
        double max_imag = 0;
    };

    explicit TensorEvaluator(const PhaseSpaceState &state) {
        std::map<std::tuple<double, double, double>, size_t> index;
        for (const auto &t : state.terms()) {
            auto key = std::make_tuple(t.p0, t.kp, t.s);
            auto it = index.find(key);
            if (it == index.end()) {
                it = index.emplace(key, groups_.size()).first;
                groups_.push_back({t.p0, t.kp, t.s, {}});
            }
            groups_[it->second].xterms.push_back(t);
        }
        mass_ = state.weight_mass();
    }

    size_t group_count() const { return groups_.size(); }

    Result evaluate(std::span<const double> xs, std::span<const double> ps, unsigned outputs = kValue) const {
        const size_t G = groups_.size();
        const size_t nx = xs.size(), np = ps.size();
        const bool grad = outputs & kGradient, lap = outputs & kLaplacian;
        // Per-group X factors and P factors, with derivatives.
        std::vector<cplx> A0(nx * G), A1, A2, B0(np * G), B1, B2;
        if (grad || lap) {
            A1.resize(nx * G);
            B1.resize(np * G);
        }
        if (lap) {
            A2.resize(nx * G);
            B2.resize(np * G);
        }
        for (size_t g = 0; g < G; ++g) {
            const auto &grp = groups_[g];
            for (size_t i = 0; i < nx; ++i) {
                cplx a0 = 0, a1 = 0, a2 = 0;
                double x = xs[i];
                for (const auto &t : grp.xterms) {
                    double d = x - t.x0;
                    double e = d * d / t.s;
                    if (e > 745) continue;
                    cplx v = t.weight * std::polar(std::exp(-e), t.kx * x);
                    a0 += v;
                    if (grad || lap) {
                        cplx f = cplx(-2 * d / t.s, t.kx);
                        a1 += v * f;
                        if (lap) a2 += v * (f * f - 2 / t.s);
                    }
                }
                A0[i * G + g] = a0;
                if (grad || lap) A1[i * G + g] = a1;
                if (lap) A2[i * G + g] = a2;
            }
            for (size_t j = 0; j < np; ++j) {
                double d = ps[j] - grp.p0;
                double e = d * d / grp.s;
                cplx v = e > 745 ? cplx(0) : std::polar(std::exp(-e), grp.kp * ps[j]);
                B0[j * G + g] = v;
                cplx f = cplx(-2 * d / grp.s, grp.kp);
                if (grad || lap) B1[j * G + g] = v * f;
                if (lap) B2[j * G + g] = v * (f * f - 2 / grp.s);
            }
        }
        Result r;
        r.nx = (int)nx;
        r.np = (int)np;
        auto contract = [&](const std::vector<cplx> &A, const std::vector<cplx> &B, std::vector<double> &out,
                            bool track_imag) {
            out.assign(nx * np, 0.0);
            for (size_t i = 0; i < nx; ++i) {
                const cplx *a = &A[i * G];
                for (size_t j = 0; j < np; ++j) {
                    const cplx *b = &B[j * G];
                    double re = 0, im = 0;
                    for (size_t g = 0; g < G; ++g) {
                        re += a[g].real() * b[g].real() - a[g].imag() * b[g].imag();
                        im += a[g].real() * b[g].imag() + a[g].imag() * b[g].real();
                    }
                    out[i * np + j] = re;
                    if (track_imag) r.max_imag = std::max(r.max_imag, std::abs(im));
                }
            }
        };
        if (outputs & kValue) contract(A0, B0, r.w, true);
        if (grad) {
            contract(A1, B0, r.wx, false);
            contract(A0, B1, r.wp, false);
        }
        if (lap) {
            std::vector<double> tmp;
            contract(A2, B0, r.lap, false);
            contract(A0, B2, tmp, false);
            for (size_t k = 0; k < tmp.size(); ++k) r.lap[k] += tmp[k];
        }
        return r;
    }

    /// Allowed imaginary residue for a field whose largest real value is `max_abs`:
    /// 1e-10 relative, plus floating-point rounding of the term sum.
    double imag_allowance(double max_abs) const {
        return 1e-10 * max_abs + 64 * std::numeric_limits<double>::epsilon() * mass_;
    }

   private:
    struct Group {
        double p0, kp, s;
        std::vector<WignerTerm> xterms;
    };
    std::vector<Group> groups_;
    double mass_ = 0;
};

inline Field evaluate(const PhaseSpaceState &state, const Grid &grid) {
    grid.validate();
    TensorEvaluator ev(state);
    auto xs = grid.xs(), ps = grid.ps();
    auto r = ev.evaluate(xs, ps, TensorEvaluator::kValue);
    Field f{grid, std::move(r.w)};
    if (r.max_imag > ev.imag_allowance(f.max_abs())) {
        throw HermiticityError("evaluate: imaginary residue " + std::to_string(r.max_imag) +
                               " exceeds tolerance; term list is not Hermitian");
    }
    return f;
}

inline PhaseSpaceState normalize(const PhaseSpaceState &state) {
    cplx total = total_integral(state);
    double scale = 0;
    for (const auto &t : state.terms()) {
        scale += std::abs(term_integral(t));
    }
    if (!std::isfinite(total.real()) || std::abs(total) <= 1e-15 * scale || std::abs(total) == 0) {
        throw std::domain_error("normalize: state integrates to zero");
    }
    if (state.normalized() && std::abs(total - 1.0) < 1e-14) {
        return state;
    }
    auto out = state.terms();
    for (auto &t : out) {
        t.weight /= total;
    }
    return PhaseSpaceState(std::move(out), true);
}

namespace detail {

// Snaps each value to the first member of its cluster, where a cluster is a
// maximal run of sorted values with consecutive gaps <= tol.
inline void snap_values(std::vector<double> &v, double tol) {
    std::vector<size_t> order(v.size());
    for (size_t i = 0; i < v.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    double rep = 0, prev = 0;
    for (size_t n = 0; n < order.size(); ++n) {
        double cur = v[order[n]];
        if (n == 0 || cur - prev > tol) rep = cur;
        prev = cur;
        v[order[n]] = rep;
    }
}

// Wavevectors are snapped on |k| with the sign reattached, so conjugate partners
// keep exactly opposite keys.
inline void snap_signed(std::vector<double> &v, double tol) {
    std::vector<double> mag(v.size());
    for (size_t i = 0; i < v.size(); ++i) mag[i] = std::abs(v[i]);
    snap_values(mag, tol);
    for (size_t i = 0; i < v.size(); ++i) {
        v[i] = mag[i] <= tol ? 0.0 : std::copysign(mag[i], v[i]);
    }
}

using TermKey = std::array<double, 5>;

inline TermKey key_of(const WignerTerm &t) { return {t.x0, t.p0, t.s, t.kx, t.kp}; }

}  // namespace detail

inline PhaseSpaceState merge_terms(const PhaseSpaceState &state, double key_tolerance = 1e-9) {
    const auto &in = state.terms();
    const size_t n = in.size();
    std::vector<double> x0(n), p0(n), s(n), kx(n), kp(n);
    for (size_t i = 0; i < n; ++i) {
        x0[i] = in[i].x0;
        p0[i] = in[i].p0;
        s[i] = in[i].s;
        kx[i] = in[i].kx;
        kp[i] = in[i].kp;
    }
    detail::snap_values(x0, key_tolerance);
    detail::snap_values(p0, key_tolerance);
    detail::snap_values(s, key_tolerance);
    detail::snap_signed(kx, key_tolerance);
    detail::snap_signed(kp, key_tolerance);
    std::map<detail::TermKey, cplx> acc;
    for (size_t i = 0; i < n; ++i) {
        acc[{x0[i], p0[i], s[i], kx[i], kp[i]}] += in[i].weight;
    }
    double wmax = 0;
    for (const auto &[k, w] : acc) wmax = std::max(wmax, std::abs(w));
    std::vector<WignerTerm> out;
    out.reserve(acc.size());
    for (const auto &[k, w] : acc) {
        if (w == cplx(0) || std::abs(w) < 1e-12 * wmax) continue;
        out.push_back({w, k[0], k[1], k[2], k[3], k[4]});
    }
    return PhaseSpaceState(std::move(out), state.normalized());
}

/// Projects the term list onto its Hermitian part: conjugate partners get
/// weights (w + conj(w'))/2 and zero-wavevector terms get real weights.
/// Keys are matched exactly, so call after merge_terms.
inline PhaseSpaceState hermitize(const PhaseSpaceState &state) {
    std::map<detail::TermKey, cplx> acc;
    for (const auto &t : state.terms()) acc[detail::key_of(t)] += t.weight;
    std::map<detail::TermKey, cplx> out;
    for (const auto &[k, w] : acc) {
        detail::TermKey partner{k[0], k[1], k[2], k[3] == 0 ? 0.0 : -k[3], k[4] == 0 ? 0.0 : -k[4]};
        auto it = acc.find(partner);
        cplx wp = it == acc.end() ? cplx(0) : it->second;
        cplx h = 0.5 * (w + std::conj(wp));
        out[k] = h;
        out[partner] = std::conj(h);
    }
    std::vector<WignerTerm> terms;
    for (const auto &[k, w] : out) {
        if (w == cplx(0)) continue;
        terms.push_back({w, k[0], k[1], k[2], k[3], k[4]});
    }
    return PhaseSpaceState(std::move(terms), state.normalized());
}

/// True if every term has a conjugate partner whose weight matches within tol*max|w|.
inline bool is_hermitian(const PhaseSpaceState &state, double tol = 1e-10) {
    std::map<detail::TermKey, cplx> acc;
    double wmax = 0;
    for (const auto &t : state.terms()) {
        acc[detail::key_of(t)] += t.weight;
        wmax = std::max(wmax, std::abs(t.weight));
    }
    for (const auto &[k, w] : acc) {
        detail::TermKey partner{k[0], k[1], k[2], k[3] == 0 ? 0.0 : -k[3], k[4] == 0 ? 0.0 : -k[4]};
        auto it = acc.find(partner);
        cplx wp = it == acc.end() ? cplx(0) : it->second;
        if (std::abs(w - std::conj(wp)) > tol * wmax) return false;
    }
    return true;
}

/// rho -> exp(i a X) rho exp(-i b X).
inline PhaseSpaceState one_sided_displacement(const PhaseSpaceState &state, double mu_left, double nu_right) {
    double shift = 0.5 * (mu_left + nu_right);
    double dk = mu_left - nu_right;
    auto out = state.terms();
    for (auto &t : out) {
        if (t.kp != 0) t.weight *= std::polar(1.0, -t.kp * shift);
        t.p0 += shift;
        t.kx += dk;
    }
    bool keeps_norm = state.normalized() && mu_left == nu_right;
    return PhaseSpaceState(std::move(out), keeps_norm);
}

/// Rigid phase-space translation W(X,P) -> W(X-dx, P-dp).
inline PhaseSpaceState translate(const PhaseSpaceState &state, double dx, double dp) {
    auto out = state.terms();
    for (auto &t : out) {
        t.weight *= std::polar(1.0, -(t.kx * dx + t.kp * dp));
        t.x0 += dx;
        t.p0 += dp;
    }
    return PhaseSpaceState(std::move(out), state.normalized());
}

struct Box {
    double x_min = 0, x_max = 0, p_min = 0, p_max = 0;
};

/// Bounding box of all term centers widened by nsigma standard deviations of
/// the broadest term (std dev sqrt(s/2)).
inline Box support_box(const PhaseSpaceState &state, double nsigma) {
    if (state.empty()) return {-1, 1, -1, 1};
    Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    double smax = 0;
    for (const auto &t : state.terms()) {
        b.x_min = std::min(b.x_min, t.x0);
        b.x_max = std::max(b.x_max, t.x0);
        b.p_min = std::min(b.p_min, t.p0);
        b.p_max = std::max(b.p_max, t.p0);
        smax = std::max(smax, t.s);
    }
    double w = nsigma * std::sqrt(smax / 2);
    return {b.x_min - w, b.x_max + w, b.p_min - w, b.p_max + w};
}

inline double max_abs_kx(const PhaseSpaceState &state) {
    double k = 0;
    for (const auto &t : state.terms()) k = std::max(k, std::abs(t.kx));
    return k;
}

inline double max_abs_kp(const PhaseSpaceState &state) {
    double k = 0;
    for (const auto &t : state.terms()) k = std::max(k, std::abs(t.kp));
    return k;
}

inline double min_variance_param(const PhaseSpaceState &state) {
    double s = std::numeric_limits<double>::infinity();
    for (const auto &t : state.terms()) s = std::min(s, t.s);
    return std::isfinite(s) ? s : 1.0;
}

/// Default plotting grid: 6 sigma around the term centers, at least 8 samples per fringe period.
inline Grid default_grid(const PhaseSpaceState &state, int min_points = 101, int max_points = 4001) {
    Box b = support_box(state, 6.0);
    double sigma = std::sqrt(min_variance_param(state) / 2);
    auto count = [&](double lo, double hi, double k) {
        double h = sigma / 4;
        if (k > 0) h = std::min(h, 2 * kPi / (8 * k));
        int n = (int)std::ceil((hi - lo) / h) + 1;
        return std::clamp(n, min_points, max_points);
    };
    Grid g{b.x_min, b.x_max, b.p_min, b.p_max, count(b.x_min, b.x_max, max_abs_kx(state)),
           count(b.p_min, b.p_max, max_abs_kp(state))};
    return g;
}

/// One-dimensional term weight * exp(i k u) * exp(-(u-u0)^2/s).
struct LineTerm {
    cplx weight{0.0, 0.0};
    double u0 = 0;
    double s = 1;
    double k = 0;
};

struct DensityDerivs {
    double p = 0, dp = 0, d2p = 0;
};

/// Quadrature marginal p(u) along direction lambda, u = X cos(lambda) + P sin(lambda).
class Marginal {
   public:
    Marginal() = default;
    Marginal(std::vector<LineTerm> terms, double angle) : terms_(std::move(terms)), angle_(angle) {}

    const std::vector<LineTerm> &terms() const { return terms_; }
    double angle() const { return angle_; }

    double operator()(double u) const {
        double acc = 0;
        for (const auto &t : terms_) {
            double d = u - t.u0, e = d * d / t.s;
            if (e > 745) continue;
            acc += (t.weight * std::polar(std::exp(-e), t.k * u)).real();
        }
        return acc;
    }

    DensityDerivs derivs(double u) const {
        cplx a0 = 0, a1 = 0, a2 = 0;
        for (const auto &t : terms_) {
            double d = u - t.u0, e = d * d / t.s;
            if (e > 745) continue;
            cplx v = t.weight * std::polar(std::exp(-e), t.k * u);
            cplx f(-2 * d / t.s, t.k);
            a0 += v;
            a1 += v * f;
            a2 += v * (f * f - 2 / t.s);
        }
        return {a0.real(), a1.real(), a2.real()};
    }

    double integral() const {
        cplx acc = 0;
        for (const auto &t : terms_) {
            acc += t.weight * std::sqrt(kPi * t.s) * std::polar(std::exp(-t.k * t.k * t.s / 4), t.k * t.u0);
        }
        return acc.real();
    }

    std::pair<double, double> support(double nsigma) const {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo, smax = 0;
        for (const auto &t : terms_) {
            lo = std::min(lo, t.u0);
            hi = std::max(hi, t.u0);
            smax = std::max(smax, t.s);
        }
        if (terms_.empty()) return {-1, 1};
        double w = nsigma * std::sqrt(smax / 2);
        return {lo - w, hi + w};
    }

    double max_wavenumber() const {
        double k = 0;
        for (const auto &t : terms_) k = std::max(k, std::abs(t.k));
        return k;
    }

    double min_s() const {
        double s = std::numeric_limits<double>::infinity();
        for (const auto &t : terms_) s = std::min(s, t.s);
        return std::isfinite(s) ? s : 1.0;
    }

    /// Rounding level of a pointwise evaluation.
    double noise_floor() const {
        double m = 0;
        for (const auto &t : terms_) m += std::abs(t.weight);
        return 16 * std::numeric_limits<double>::epsilon() * m;
    }

   private:
    std::vector<LineTerm> terms_;
    double angle_ = 0;
};

inline Marginal marginal(const PhaseSpaceState &state, double lambda) {
    if (!state.normalized()) {
        throw std::invalid_argument("marginal: state must be normalized");
    }
    const double c = std::cos(lambda), sn = std::sin(lambda);
    std::map<std::array<double, 3>, cplx> acc;
    for (const auto &t : state.terms()) {
        double ku = t.kx * c + t.kp * sn;
        double kv = -t.kx * sn + t.kp * c;
        double u0 = t.x0 * c + t.p0 * sn;
        double v0 = -t.x0 * sn + t.p0 * c;
        double damp = std::exp(-kv * kv * t.s / 4);
        if (damp == 0) continue;
        cplx w = t.weight * std::sqrt(kPi * t.s) * std::polar(damp, kv * v0);
        acc[{u0, t.s, ku}] += w;
    }
    std::vector<LineTerm> out;
    double wmax = 0;
    for (const auto &[k, w] : acc) wmax = std::max(wmax, std::abs(w));
    for (const auto &[k, w] : acc) {
        if (std::abs(w) <= 1e-15 * wmax) continue;
        out.push_back({w, k[0], k[1], k[2]});
    }
    return Marginal(std::move(out), lambda);
}

}  // namespace catgrow
