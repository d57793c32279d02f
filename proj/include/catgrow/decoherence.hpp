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
#include "catgrow/thermal_channel.hpp"

namespace catgrow {

// CODATA 2018 exact values.
inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kBoltzmann = 1.380649e-23;

struct ThermalEnvironment {
    double bath_occupation = 0;
    double quality_factor = 1;
    double mech_frequency = 1;  // rad/s

    double intrinsic_decay() const { return mech_frequency / quality_factor; }
    double decoherence_rate() const { return (2 * bath_occupation + 1) * intrinsic_decay(); }

    void validate() const {
        if (!(bath_occupation >= 0)) throw ValidationError("bath_occupation", "must be nonnegative");
        if (!(quality_factor > 0)) throw ValidationError("quality_factor", "must be positive");
        if (!(mech_frequency > 0)) throw ValidationError("mech_frequency", "must be positive");
    }
};

/// Bose-Einstein occupancy 1/(exp(hbar w / kB T) - 1).
inline double bath_occupancy(double temperature, double omega) {
    if (!(temperature > 0) || !(omega > 0)) {
        throw std::invalid_argument("bath_occupancy: temperature and frequency must be positive");
    }
    return 1.0 / std::expm1(kHbar * omega / (kBoltzmann * temperature));
}

inline ThermalEnvironment environment_from_temperature(double temperature, double quality_factor, double omega) {
    ThermalEnvironment env{bath_occupancy(temperature, omega), quality_factor, omega};
    env.validate();
    return env;
}

/// Phonons added per mechanical period: pi (2 nb + 1) / Q.
inline double phonons_per_period(const ThermalEnvironment &env) {
    env.validate();
    return kPi * (2 * env.bath_occupation + 1) / env.quality_factor;
}

struct Feasibility {
    bool pass = false;
    double margin = 0;
};

inline constexpr double kFeasibilityThreshold = 10.0;

/// Margin Q / (2 nb + 1) / (2 pi N); passes at >= 10.
inline Feasibility feasibility_check(const ThermalEnvironment &env, int N) {
    if (N < 1) throw std::invalid_argument("feasibility_check: N must be positive");
    env.validate();
    double margin = env.quality_factor / (2 * env.bath_occupation + 1) / (2 * kPi * N);
    return {margin >= kFeasibilityThreshold, margin};
}

/// Closed-form state after N (0,1)-heralded steps with the thermal channel
/// after each step.  Sums over l_i, m_i in {0,1}; with xi_i the partial sums
/// of (l_j - m_j) mu the complex Gaussian shift a = nth sum xi_i is folded
/// into the fringe (kx = xi_N - 2a/S) and the weight (e^{a^2/S}).
inline PhaseSpaceState decohered_protocol_state(const ProtocolConfig &config) {
    config.validate();
    for (const auto &c : config.clicks) {
        if (!(c == ClickOutcome{0, 1})) {
            throw ValidationError("clicks", "closed form requires (0,1) outcomes at every step");
        }
    }
    const int N = config.steps;
    if (N > 12) throw ValidationError("steps", "closed form enumerates 4^N branches; N <= 12");
    const double mu = config.coupling, nth = config.thermal_per_step;
    const double S = 1 + 2 * config.initial_occupation + 2 * N * nth;
    std::vector<cplx> step_phase(N);
    for (int i = 0; i < N; ++i) step_phase[i] = -config.phases[i].unit();  // e^{i(phi + pi)}
    std::vector<WignerTerm> terms;
    terms.reserve(size_t(1) << (2 * N));
    for (unsigned mask = 0; mask < (1u << (2 * N)); ++mask) {
        cplx w = 1;
        double xi = 0, sum_xi = 0, sum_xi2 = 0, pops = 0;
        for (int i = 0; i < N; ++i) {
            int l = (mask >> i) & 1, m = (mask >> (N + i)) & 1;
            if (l != m) w *= l ? std::conj(step_phase[i]) : step_phase[i];
            xi += (l - m) * mu;
            sum_xi += xi;
            sum_xi2 += xi * xi;
            pops += l + m;
        }
        double a = nth * sum_xi;
        w *= std::exp(-0.5 * nth * sum_xi2 + a * a / S);
        terms.push_back({w, 0.0, 0.5 * pops * mu, S, xi - 2 * a / S, 0.0});
    }
    return normalize(hermitize(merge_terms(PhaseSpaceState(std::move(terms), false))));
}

}  // namespace catgrow
