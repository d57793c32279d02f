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
#include <stdexcept>
#include <vector>

#include "catgrow/errors.hpp"
#include "catgrow/loss.hpp"
#include "catgrow/protocol.hpp"

namespace catgrow {

/// Canonical heralding probability (the closed form used for experiment
/// times): single photon 2^{1-N} eta^N (1 - E), coherent
/// 2^{1-N} e^{-2N eta |a|^2} eta^N |a|^{2N} (1 - E), E = e^{-N^2 mu^2 (1+2 nbar)/4}.
inline double herald_probability(const ProtocolConfig &config) {
    config.validate();
    const int N = config.steps;
    for (const auto &c : config.clicks) {
        if (!(c == config.clicks.front()) || c.m + c.n != 1) {
            throw ValidationError("clicks", "closed form needs a uniform single-click sequence");
        }
    }
    if (config.input == InputKind::coherent) {
        return coherent_herald_formula(N, config.coupling, config.initial_occupation, config.efficiency,
                                       std::abs(config.alpha));
    }
    double S = 1 + 2 * config.initial_occupation;
    double D = N * config.coupling;
    return std::pow(2.0, 1 - N) * std::pow(config.efficiency, N) * -std::expm1(-D * D * S / 4);
}

/// Product of the step operators as a polynomial in z = e^{i mu X}.
inline std::vector<cplx> composed_operator(const ProtocolConfig &config) {
    std::vector<cplx> poly{1.0};
    for (int j = 1; j <= config.steps; ++j) {
        auto op = effective_step_operator(config, j);
        int deg = 0;
        for (const auto &t : op.terms) deg = std::max(deg, t.power);
        std::vector<cplx> p(deg + 1, 0.0);
        for (const auto &t : op.terms) p[t.power] += t.coefficient;
        poly = detail::poly_mul(poly, p);
    }
    return poly;
}

/// tr(M rho M^dagger) for the composed operator M on the initial thermal
/// state, using <e^{i a X}> = e^{-a^2 (1+2 nbar)/4}.  The operators carry no
/// detector-efficiency factor for single-photon input.
inline double operator_trace_probability(const ProtocolConfig &config) {
    config.validate();
    auto c = composed_operator(config);
    double S = 1 + 2 * config.initial_occupation;
    double mu = config.coupling;
    // |sum c_k|^2 plus the expm1 part, so tiny mu does not cancel to rounding.
    cplx total = 0;
    for (const auto &ck : c) total += ck;
    double acc = std::norm(total);
    for (size_t k = 0; k < c.size(); ++k) {
        for (size_t l = 0; l < c.size(); ++l) {
            double d = (double(k) - double(l)) * mu;
            acc += (c[k] * std::conj(c[l])).real() * std::expm1(-d * d * S / 4);
        }
    }
    return acc;
}

struct HeraldAudit {
    double printed = 0;         // canonical closed form
    double operator_trace = 0;  // trace of the composed operators
    double ratio = 0;           // operator_trace / printed
    double expected_ratio = 0;  // 2^{-N} eta^{-N} (single photon) or 1 (coherent)
};

inline HeraldAudit herald_audit(const ProtocolConfig &config) {
    HeraldAudit a;
    a.printed = herald_probability(config);
    a.operator_trace = operator_trace_probability(config);
    a.ratio = a.operator_trace / a.printed;
    a.expected_ratio = config.input == InputKind::single_photon
                           ? std::pow(2.0, -config.steps) * std::pow(config.efficiency, -config.steps)
                           : 1.0;
    return a;
}

enum class SchemeKind { coherent_multistep, photon_multistep, noon_multiport };

inline double scheme_scaling(SchemeKind kind, int N) {
    if (N < 1) throw std::invalid_argument("scheme_scaling: N must be positive");
    switch (kind) {
        case SchemeKind::coherent_multistep: return std::pow(2.0, 1 - 2 * N) * std::exp(-N);
        case SchemeKind::photon_multistep: return std::pow(2.0, 1 - N);
        case SchemeKind::noon_multiport: return std::pow(2.0, 1 - N) * std::exp(-N);
    }
    throw std::invalid_argument("scheme_scaling: unknown kind");
}

/// Multiport comparison scheme:
/// 2 Np^{-Np} e^{-2|a|^2} |a|^{2Np} {1 - (-1)^{Np} e^{-Np^2 mu^2 (1+2 nbar)/4} cos(Np phi)}.
inline double noon_probability(int Np, double alpha_abs, double mu, double nbar, double phi) {
    if (Np < 1) throw std::invalid_argument("noon_probability: Np must be positive");
    double a2 = alpha_abs * alpha_abs;
    double sign = Np % 2 == 0 ? 1.0 : -1.0;
    return 2 * std::pow(double(Np), -Np) * std::exp(-2 * a2) * std::pow(a2, Np) *
           (1 - sign * std::exp(-double(Np) * Np * mu * mu * (1 + 2 * nbar) / 4) * std::cos(Np * phi));
}

struct TimingParams {
    int runs = 1000;
    int steps = 3;
    double omega = 1;  // rad/s
    double gamma = 1;  // 1/s

    void validate() const {
        if (runs < 1) throw ValidationError("runs", "must be at least 1");
        if (steps < 1) throw ValidationError("steps", "must be positive");
        if (!(omega > 0)) throw ValidationError("omega", "must be positive");
        if (!(gamma > 0)) throw ValidationError("gamma", "must be positive");
    }

    /// T_r = min{1/gamma, 2e3 pi / omega}.
    double relax_time() const { return std::min(1 / gamma, 2e3 * kPi / omega); }
};

/// runs * (2 pi N / omega + T_r) / P_N.
inline double total_time(double herald_prob, const TimingParams &timing) {
    timing.validate();
    if (!(herald_prob > 0)) throw std::domain_error("total_time: heralding probability is zero");
    return timing.runs * (2 * kPi * timing.steps / timing.omega + timing.relax_time()) / herald_prob;
}

/// Total time from the canonical heralding probability of `config`.
inline double total_time(const ProtocolConfig &config, const TimingParams &timing) {
    return total_time(herald_probability(config), timing);
}

}  // namespace catgrow
