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
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace catgrow {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

inline QuadratureRule compute_gauss_legendre(int n) {
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1, p2 = 0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                break;
            }
        }
        r.nodes[i] = -z;
        r.nodes[n - 1 - i] = z;
        double w = 2.0 / ((1.0 - z * z) * pp * pp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

// Physicists' Hermite rule, weight exp(-x^2).
inline QuadratureRule compute_gauss_hermite(int n) {
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    int m = (n + 1) / 2;
    double z = 0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(double(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * r.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * r.nodes[1];
        } else {
            z = 2.0 * z - r.nodes[i - 2];
        }
        double pp = 0;
        for (int it = 0; it < 200; ++it) {
            double p1 = pim4, p2 = 0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(double(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) {
                break;
            }
        }
        r.nodes[i] = z;
        r.nodes[n - 1 - i] = -z;
        r.weights[i] = 2.0 / (pp * pp);
        r.weights[n - 1 - i] = r.weights[i];
    }
    std::reverse(r.nodes.begin(), r.nodes.end());
    std::reverse(r.weights.begin(), r.weights.end());
    return r;
}

template <class Compute>
const QuadratureRule &cached_rule(int n, Compute compute) {
    static std::mutex mu;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, compute(n)).first;
    }
    return it->second;
}

}  // namespace detail

/// Gauss-Legendre rule on [-1, 1]. Cached; the returned reference stays valid.
inline const QuadratureRule &gauss_legendre(int n) {
    if (n < 1) {
        throw std::invalid_argument("gauss_legendre: n must be positive");
    }
    return detail::cached_rule(n, [](int k) { return detail::compute_gauss_legendre(k); });
}

/// Gauss-Hermite rule for weight exp(-x^2) on the real line.
inline const QuadratureRule &gauss_hermite(int n) {
    if (n < 1) {
        throw std::invalid_argument("gauss_hermite: n must be positive");
    }
    return detail::cached_rule(n, [](int k) { return detail::compute_gauss_hermite(k); });
}

/// Maps a [-1,1] rule onto [a,b], appending to the output arrays.
inline void map_rule(const QuadratureRule &rule, double a, double b, std::vector<double> &x, std::vector<double> &w) {
    double h = 0.5 * (b - a), c = 0.5 * (a + b);
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        x.push_back(c + h * rule.nodes[i]);
        w.push_back(h * rule.weights[i]);
    }
}

/// Composite Gauss-Legendre nodes over consecutive panels given by `edges`.
inline std::pair<std::vector<double>, std::vector<double>> composite_rule(const std::vector<double> &edges, int order) {
    std::pair<std::vector<double>, std::vector<double>> out;
    const auto &rule = gauss_legendre(order);
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        map_rule(rule, edges[i], edges[i + 1], out.first, out.second);
    }
    return out;
}

/// Evenly spaced panel edges on [a,b] with panel width at most h.
inline std::vector<double> panel_edges(double a, double b, double h) {
    int n = std::max(1, (int)std::ceil((b - a) / h - 1e-12));
    std::vector<double> e(n + 1);
    for (int i = 0; i <= n; ++i) {
        e[i] = a + (b - a) * i / n;
    }
    return e;
}

struct QuadResult {
    double value = 0;
    double error = 0;
    int evaluations = 0;
    bool converged = true;
};

namespace detail {

struct Gk15 {
    static constexpr std::array<double, 8> xgk{
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr std::array<double, 8> wgk{
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr std::array<double, 4> wg{
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

template <class F>
std::pair<double, double> gk15(F &f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double resk = fc * Gk15::wgk[7];
    double resg = fc * Gk15::wg[3];
    for (int j = 0; j < 7; ++j) {
        double dx = h * Gk15::xgk[j];
        double f1 = f(c - dx), f2 = f(c + dx);
        resk += Gk15::wgk[j] * (f1 + f2);
        if (j % 2 == 1) {
            resg += Gk15::wg[j / 2] * (f1 + f2);
        }
    }
    return {resk * h, std::abs((resk - resg) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7-15) over the panels delimited by
/// `breakpoints` (sorted). Splits the interval with the largest error
/// estimate until the total error meets max(abs_tol, rel_tol*|I|).
template <class F>
QuadResult integrate_adaptive(F &&f, const std::vector<double> &breakpoints, double abs_tol, double rel_tol,
                              int max_intervals = 20000) {
    struct Seg {
        double a, b, value, error;
        bool operator<(const Seg &o) const { return error < o.error; }
    };
    std::priority_queue<Seg> heap;
    QuadResult out;
    double total = 0, err = 0;
    for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        auto [v, e] = detail::gk15(f, breakpoints[i], breakpoints[i + 1]);
        out.evaluations += 15;
        heap.push({breakpoints[i], breakpoints[i + 1], v, e});
        total += v;
        err += e;
    }
    while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if ((int)heap.size() >= max_intervals) {
            out.converged = false;
            break;
        }
        Seg s = heap.top();
        heap.pop();
        double m = 0.5 * (s.a + s.b);
        if (m <= s.a || m >= s.b) {
            out.converged = false;
            heap.push(s);
            break;
        }
        auto [v1, e1] = detail::gk15(f, s.a, m);
        auto [v2, e2] = detail::gk15(f, m, s.b);
        out.evaluations += 30;
        heap.push({s.a, m, v1, e1});
        heap.push({m, s.b, v2, e2});
        total += v1 + v2 - s.value;
        err += e1 + e2 - s.error;
    }
    // Re-sum from scratch so the reported value carries no drift from the running updates.
    total = 0;
    err = 0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.error = err;
    return out;
}

template <class F>
QuadResult integrate_adaptive(F &&f, double a, double b, double abs_tol, double rel_tol) {
    return integrate_adaptive(std::forward<F>(f), std::vector<double>{a, b}, abs_tol, rel_tol);
}

/// Golden-section search for the maximum of a unimodal f on [a,b].
template <class F>
std::pair<double, double> golden_section_max(F &&f, double a, double b, double tol = 1e-10, int max_iter = 200) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && std::abs(b - a) > tol; ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return fc > fd ? std::pair{c, fc} : std::pair{d, fd};
}

struct Minimum2D {
    double x = 0, p = 0, value = 0;
    int iterations = 0;
};

/// Nelder-Mead simplex minimization in two dimensions.
template <class F>
Minimum2D nelder_mead_2d(F &&f, double x0, double p0, double step, double ftol = 1e-13, int max_iter = 2000) {
    std::array<std::array<double, 2>, 3> v{{{x0, p0}, {x0 + step, p0}, {x0, p0 + step}}};
    std::array<double, 3> fv{};
    for (int i = 0; i < 3; ++i) {
        fv[i] = f(v[i][0], v[i][1]);
    }
    int it = 0;
    for (; it < max_iter; ++it) {
        std::array<int, 3> idx{0, 1, 2};
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        auto vs = v;
        auto fs = fv;
        for (int i = 0; i < 3; ++i) {
            v[i] = vs[idx[i]];
            fv[i] = fs[idx[i]];
        }
        double size = std::max(std::hypot(v[1][0] - v[0][0], v[1][1] - v[0][1]),
                               std::hypot(v[2][0] - v[0][0], v[2][1] - v[0][1]));
        if (std::abs(fv[2] - fv[0]) <= ftol * (std::abs(fv[0]) + 1e-30) + 1e-16 && size < 1e-7) {
            break;
        }
        if (size < 1e-12) {
            break;
        }
        double cx = 0.5 * (v[0][0] + v[1][0]), cp = 0.5 * (v[0][1] + v[1][1]);
        double rx = 2 * cx - v[2][0], rp = 2 * cp - v[2][1];
        double fr = f(rx, rp);
        if (fr < fv[0]) {
            double ex = 3 * cx - 2 * v[2][0], ep = 3 * cp - 2 * v[2][1];
            double fe = f(ex, ep);
            if (fe < fr) {
                v[2] = {ex, ep};
                fv[2] = fe;
            } else {
                v[2] = {rx, rp};
                fv[2] = fr;
            }
        } else if (fr < fv[1]) {
            v[2] = {rx, rp};
            fv[2] = fr;
        } else {
            bool outside = fr < fv[2];
            double kx = outside ? 0.5 * (cx + rx) : 0.5 * (cx + v[2][0]);
            double kp = outside ? 0.5 * (cp + rp) : 0.5 * (cp + v[2][1]);
            double fk = f(kx, kp);
            if (fk < std::min(fr, fv[2])) {
                v[2] = {kx, kp};
                fv[2] = fk;
            } else {
                for (int i = 1; i < 3; ++i) {
                    v[i][0] = 0.5 * (v[i][0] + v[0][0]);
                    v[i][1] = 0.5 * (v[i][1] + v[0][1]);
                    fv[i] = f(v[i][0], v[i][1]);
                }
            }
        }
    }
    int best = (int)(std::min_element(fv.begin(), fv.end()) - fv.begin());
    return {v[best][0], v[best][1], fv[best], it};
}

}  // namespace catgrow
