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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "catgrow/errors.hpp"
#include "catgrow/phase_space.hpp"
#include "catgrow/protocol.hpp"

namespace catgrow {

struct LossModel {
    double efficiency = 1;
    InputKind input = InputKind::coherent;
    cplx alpha{0.0, 0.0};
    double truncation_tail = 1e-10;

    void validate() const {
        if (!(efficiency > 0 && efficiency <= 1)) throw ValidationError("efficiency", "must lie in (0, 1]");
        if (!(truncation_tail > 0 && truncation_tail < 1e-6)) {
            throw ValidationError("truncation_tail", "must lie in (0, 1e-6)");
        }
    }

    /// Mean number of photons lost from the coupled arm per step.
    double loss_per_step() const { return (1 - efficiency) * std::norm(alpha); }
};

inline OperatorDescriptor effective_coherent_operator(double eta, cplx alpha, ClickOutcome outcome, const Phase &phi,
                                                      double mu) {
    if (!(eta > 0 && eta <= 1)) throw std::invalid_argument("effective_coherent_operator: eta must lie in (0, 1]");
    return coherent_operator(mu, std::sqrt(eta) * alpha, outcome, phi);
}

/// Poisson weights e^{-m} m^K / K! for K = 0.. until the remaining mass is below `tail`.
inline std::vector<double> poisson_weights(double mean, double tail) {
    std::vector<double> w;
    if (mean == 0) return {1.0};
    double term = std::exp(-mean), acc = 0;
    for (int K = 0; K < 100000; ++K) {
        if (K > 0) term *= mean / K;
        w.push_back(term);
        acc += term;
        if (1 - acc < tail && K >= mean) break;
    }
    return w;
}

/// Mixture of lossless protocol states displaced by K mu in momentum, K
/// Poisson with mean N (1 - eta) |alpha|^2.  The base state is the lossless
/// run of `config` (thermal channel included when n_th > 0).
inline PhaseSpaceState loss_mixture_state(const ProtocolConfig &config, const LossModel &loss) {
    loss.validate();
    if (config.input != InputKind::coherent) {
        throw ValidationError("input", "loss mixture applies to coherent input");
    }
    ProtocolConfig lossless = config;
    lossless.efficiency = 1;
    auto base = run_sequence(lossless).state;
    double mean = config.steps * loss.loss_per_step();
    auto w = poisson_weights(mean, loss.truncation_tail);
    double total = 0;
    for (double x : w) total += x;
    std::vector<WignerTerm> terms;
    for (size_t K = 0; K < w.size(); ++K) {
        auto shifted = translate(base, 0, K * config.coupling);
        for (WignerTerm u : shifted.terms()) {
            u.weight *= w[K] / total;
            terms.push_back(u);
        }
    }
    return PhaseSpaceState(std::move(terms), true);
}

/// Loss combined with the thermal channel goes beyond the separate treatments
/// of the two effects; outputs flag such runs as an extension.
inline bool loss_composed_with_thermal(const ProtocolConfig &config) {
    return config.efficiency < 1 && config.thermal_per_step > 0;
}

/// A lost photon leaves a single-photon heralded state untouched and only
/// lowers each step's heralding probability by eta.
inline double single_photon_loss_effect(double eta) {
    if (!(eta >= 0 && eta <= 1)) throw std::invalid_argument("single_photon_loss_effect: eta must lie in [0, 1]");
    return eta;
}

/// Coherent heralding factor 2^{1-N} e^{-2N eta|a|^2} eta^N |a|^{2N} (1 - e^{-N^2 mu^2 S/4}).
inline double coherent_herald_formula(int N, double mu, double nbar, double eta, double alpha_abs) {
    double a2 = alpha_abs * alpha_abs;
    double S = 1 + 2 * nbar;
    return std::pow(2.0, 1 - N) * std::exp(-2.0 * N * eta * a2) * std::pow(eta * a2, N) *
           -std::expm1(-double(N) * N * mu * mu * S / 4);
}

/// Heralding probability with loss in closed form: sum over k_1..k_N of
/// prod |C_k|^2 = ((1-eta)|a|^2)^k / k! times the coherent factor.
/// The k-sum is truncated once the relative tail falls below the model's epsilon.
inline double lossy_herald_probability(const ProtocolConfig &config, const LossModel &loss) {
    loss.validate();
    if (config.input != InputKind::coherent) {
        throw ValidationError("input", "lossy heralding formula applies to coherent input");
    }
    double lam = config.steps * loss.loss_per_step();
    double sum = 0, term = 1;
    for (int K = 0; K < 100000; ++K) {
        if (K > 0) term *= lam / K;
        sum += term;
        if (term < loss.truncation_tail * sum && K >= lam) break;
    }
    return sum * coherent_herald_formula(config.steps, config.coupling, config.initial_occupation, loss.efficiency,
                                         std::abs(loss.alpha));
}

}  // namespace catgrow
