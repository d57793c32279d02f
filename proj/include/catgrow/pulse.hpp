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
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "catgrow/errors.hpp"
#include "catgrow/phase_space.hpp"
#include "catgrow/quadrature.hpp"

namespace catgrow {

/// Optical pulse amplitude f(t) with unit norm.  `t_min`/`t_max` bound the
/// region where f is nonnegligible (f is taken as zero outside); `kinks`
/// lists interior points where f is not smooth.
struct Envelope {
    std::string name;
    std::function<cplx(double)> f;
    double t_min = 0;
    double t_max = 0;
    std::vector<double> kinks;
};

/// sqrt(kappa) e^{-kappa |t|}, truncated where it drops below 1e-9 of its peak.
inline Envelope matched_envelope(double kappa) {
    if (!(kappa > 0)) throw std::invalid_argument("matched_envelope: kappa must be positive");
    double T = std::log(1e9) / kappa;
    return {"matched", [kappa](double t) { return cplx(std::sqrt(kappa) * std::exp(-kappa * std::abs(t))); }, -T,
            T, {0.0}};
}

/// 1/sqrt(T) on [0, T].
inline Envelope square_envelope(double duration) {
    if (!(duration > 0)) throw std::invalid_argument("square_envelope: duration must be positive");
    double a = 1 / std::sqrt(duration);
    return {"square", [a, duration](double t) { return cplx(t >= 0 && t <= duration ? a : 0.0); }, 0.0, duration, {}};
}

/// (2/pi)^{1/4} tau^{-1/2} e^{-t^2/tau^2}.
inline Envelope gaussian_envelope(double tau) {
    if (!(tau > 0)) throw std::invalid_argument("gaussian_envelope: tau must be positive");
    double a = std::pow(2 / kPi, 0.25) / std::sqrt(tau);
    double T = tau * std::sqrt(std::log(1e9));
    return {"gaussian", [a, tau](double t) { return cplx(a * std::exp(-t * t / (tau * tau))); }, -T, T, {}};
}

/// Piecewise-linear envelope through (t_i, f_i), rescaled to unit norm.
inline Envelope sampled_envelope(std::vector<double> t, std::vector<double> f) {
    if (t.size() < 2 || t.size() != f.size()) throw std::invalid_argument("sampled_envelope: need matching samples");
    for (size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) throw std::invalid_argument("sampled_envelope: times must increase");
    }
    double norm = 0;
    for (size_t i = 0; i + 1 < t.size(); ++i) {
        double h = t[i + 1] - t[i];
        norm += h * (f[i] * f[i] + f[i] * f[i + 1] + f[i + 1] * f[i + 1]) / 3;
    }
    if (!(norm > 0)) throw std::invalid_argument("sampled_envelope: zero envelope");
    double scale = 1 / std::sqrt(norm);
    for (double &v : f) v *= scale;
    auto eval = [t, f](double x) {
        if (x < t.front() || x > t.back()) return cplx(0);
        auto it = std::upper_bound(t.begin(), t.end(), x);
        size_t i = std::min<size_t>(std::max<ptrdiff_t>(it - t.begin() - 1, 0), t.size() - 2);
        double u = (x - t[i]) / (t[i + 1] - t[i]);
        return cplx(f[i] + u * (f[i + 1] - f[i]));
    };
    std::vector<double> kinks(t.begin() + 1, t.end() - 1);
    return {"sampled", eval, t.front(), t.back(), kinks};
}

struct CavityParams {
    double g0 = 0;     // rad/s
    double kappa = 1;  // rad/s
    Envelope envelope;
};

namespace detail {

inline std::vector<double> envelope_edges(const Envelope &env, double panel) {
    std::vector<double> cuts{env.t_min};
    for (double k : env.kinks)
        if (k > env.t_min && k < env.t_max) cuts.push_back(k);
    cuts.push_back(env.t_max);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> edges;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto e = panel_edges(cuts[i], cuts[i + 1], panel);
        edges.insert(edges.end(), e.begin() + (i == 0 ? 0 : 1), e.end());
    }
    return edges;
}

// integral |G|^2 with G' = -kappa G + f, G(t_min) = 0, plus the free-decay tail.
inline double filtered_energy(const Envelope &env, double kappa, double panel, int order) {
    auto edges = envelope_edges(env, panel);
    const auto &rule = gauss_legendre(order);
    cplx G = 0;
    double energy = 0;
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        double a = edges[i], b = edges[i + 1];
        double h = 0.5 * (b - a), c = 0.5 * (a + b);
        for (int n = 0; n < order; ++n) {
            double t = c + h * rule.nodes[n];
            // G(t) = e^{-kappa (t-a)} G(a) + int_a^t e^{-kappa (t - s)} f(s) ds
            cplx g = std::exp(-kappa * (t - a)) * G;
            double hh = 0.5 * (t - a), cc = 0.5 * (t + a);
            for (int m = 0; m < order; ++m) {
                double s = cc + hh * rule.nodes[m];
                g += hh * rule.weights[m] * std::exp(-kappa * (t - s)) * env.f(s);
            }
            energy += h * rule.weights[n] * std::norm(g);
        }
        cplx next = std::exp(-kappa * (b - a)) * G;
        for (int m = 0; m < order; ++m) {
            double s = c + h * rule.nodes[m];
            next += h * rule.weights[m] * std::exp(-kappa * (b - s)) * env.f(s);
        }
        G = next;
    }
    return energy + std::norm(G) / (2 * kappa);
}

}  // namespace detail

inline double envelope_norm(const Envelope &env) {
    std::vector<double> bp{env.t_min};
    for (double k : env.kinks)
        if (k > env.t_min && k < env.t_max) bp.push_back(k);
    bp.push_back(env.t_max);
    std::sort(bp.begin(), bp.end());
    return integrate_adaptive([&](double t) { return std::norm(env.f(t)); }, bp, 1e-13, 1e-13).value;
}

/// mu = sqrt(8) g0 kappa int dt e^{-2 kappa t} |int_{-inf}^t e^{kappa t'} f(t') dt'|^2,
/// evaluated through the filtered amplitude G(t) so that no exponential overflows.
inline double coupling_from_pulse(const CavityParams &p) {
    if (!(p.kappa > 0)) throw ValidationError("kappa", "must be positive");
    if (!std::isfinite(p.g0)) throw ValidationError("g0", "must be finite");
    if (!p.envelope.f || !(p.envelope.t_max > p.envelope.t_min) || !std::isfinite(p.envelope.t_min) ||
        !std::isfinite(p.envelope.t_max)) {
        throw ValidationError("envelope", "needs a bounded support interval");
    }
    double norm = envelope_norm(p.envelope);
    if (std::abs(norm - 1) > 1e-8) {
        throw ValidationError("envelope", "not normalized (norm " + std::to_string(norm) + ")");
    }
    if (p.g0 == 0) return 0;
    double panel = 0.25 / p.kappa;
    double prev = detail::filtered_energy(p.envelope, p.kappa, panel, 16);
    for (int it = 0; it < 12; ++it) {
        panel /= 2;
        double cur = detail::filtered_energy(p.envelope, p.kappa, panel, 16);
        if (std::abs(cur - prev) <= 1e-12 * std::abs(cur)) {
            prev = cur;
            break;
        }
        prev = cur;
    }
    return std::sqrt(8.0) * p.g0 * p.kappa * prev;
}

}  // namespace catgrow
