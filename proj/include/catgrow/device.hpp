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
#include <limits>
#include <optional>
#include <string>

#include "catgrow/decoherence.hpp"
#include "catgrow/errors.hpp"
#include "catgrow/heralding.hpp"
#include "catgrow/measures.hpp"
#include "catgrow/protocol.hpp"
#include "catgrow/pulse.hpp"

namespace catgrow {

/// Physical description of one device.  The coupling is either given
/// directly (`mu`) or derived from (g0, kappa) with a pulse envelope.
struct DeviceParams {
    std::string label;
    std::optional<double> mu;
    std::optional<double> g0;     // rad/s
    std::optional<double> kappa;  // rad/s
    std::string envelope = "matched";
    double frequency_hz = 1e6;      // omega / 2 pi
    double quality_factor = 1e6;
    double bath_temperature = 0;    // K; 0 means an empty bath
    double initial_occupation = 0;
    double efficiency = 0.9;
    InputKind input = InputKind::single_photon;
    double alpha = 0;               // |alpha| for coherent input
    int steps = 3;
    int runs = 1000;

    void validate() const {
        if (mu.has_value() == (g0.has_value() || kappa.has_value())) {
            throw ValidationError("mu", "give exactly one of mu or (g0, kappa)");
        }
        if (!mu && !(g0 && kappa)) throw ValidationError("kappa", "g0 and kappa must be given together");
        if (mu && !(std::isfinite(*mu) && *mu > 0)) throw ValidationError("mu", "must be positive");
        if (kappa && !(*kappa > 0)) throw ValidationError("kappa", "must be positive");
        if (g0 && !(std::isfinite(*g0) && *g0 > 0)) throw ValidationError("g0", "must be positive");
        if (envelope != "matched") throw ValidationError("envelope", "only the matched envelope is supported");
        if (!(frequency_hz > 0)) throw ValidationError("frequency_hz", "must be positive");
        if (!(quality_factor > 0)) throw ValidationError("quality_factor", "must be positive");
        if (!(bath_temperature >= 0)) throw ValidationError("bath_temperature", "must be nonnegative");
        if (!(initial_occupation >= 0)) throw ValidationError("initial_occupation", "must be nonnegative");
        if (!(efficiency > 0 && efficiency <= 1)) throw ValidationError("efficiency", "must lie in (0, 1]");
        if (input == InputKind::coherent && !(alpha > 0)) throw ValidationError("alpha", "coherent input needs alpha > 0");
        if (steps < 1 || steps > 12) throw ValidationError("steps", "must lie in 1..12");
        if (runs < 1) throw ValidationError("runs", "must be at least 1");
    }

    double omega() const { return 2 * kPi * frequency_hz; }

    double coupling() const {
        if (mu) return *mu;
        return coupling_from_pulse({*g0, *kappa, matched_envelope(*kappa)});
    }

    ThermalEnvironment environment() const {
        double nb = bath_temperature > 0 ? bath_occupancy(bath_temperature, omega()) : 0.0;
        ThermalEnvironment env{nb, quality_factor, omega()};
        env.validate();
        return env;
    }

    double thermal_per_step() const { return phonons_per_period(environment()); }

    ProtocolConfig config() const {
        ProtocolConfig c = cat_config(steps, coupling(), initial_occupation, thermal_per_step());
        c.input = input;
        c.alpha = alpha;
        c.efficiency = efficiency;
        return c;
    }

    TimingParams timing() const { return {runs, steps, omega(), environment().intrinsic_decay()}; }
};

struct DeviceReport {
    std::string label;
    double coupling = 0;
    double thermal_per_step = 0;
    double herald_probability = 0;  // closed form
    double operator_trace = 0;      // trace of the composed operators
    double total_time = 0;          // seconds, from the closed form
    MeasureReport measures;
};

inline DeviceReport evaluate_device(const DeviceParams &device, bool with_measures = true) {
    device.validate();
    DeviceReport r;
    r.label = device.label;
    ProtocolConfig cfg = device.config();
    r.coupling = cfg.coupling;
    r.thermal_per_step = cfg.thermal_per_step;
    r.herald_probability = herald_probability(cfg);
    r.operator_trace = operator_trace_probability(cfg);
    r.total_time = total_time(r.herald_probability, device.timing());
    if (with_measures) {
        r.measures = compute_measures(decohered_protocol_state(cfg));
        r.measures.herald_probability = r.herald_probability;
        r.measures.total_time = r.total_time;
    }
    return r;
}

}  // namespace catgrow
