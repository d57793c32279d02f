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

#include "catgrow/phase_space.hpp"

namespace catgrow {

/// Isotropic Gaussian smoothing that adds nth phonons: each quadrature
/// variance grows by nth.  Exact per term: convolving
/// exp(i k.r) exp(-|r-c|^2/s) with the kernel exp(-|b|^2/(2 nth))/(2 pi nth)
/// gives (s/s') exp(-|k|^2 s nth/(2 s')) exp(i k.c (1 - s/s'))
/// times exp(i (s/s') k.r) exp(-|r-c|^2/s') with s' = s + 2 nth.
inline PhaseSpaceState thermal_channel(const PhaseSpaceState &state, double nth) {
    if (!(nth >= 0) || !std::isfinite(nth)) {
        throw std::invalid_argument("thermal_channel: n_th must be nonnegative");
    }
    if (nth == 0) {
        return state;
    }
    auto out = state.terms();
    for (auto &t : out) {
        double s1 = t.s + 2 * nth;
        double r = t.s / s1;
        double k2 = t.kx * t.kx + t.kp * t.kp;
        double phase = (t.kx * t.x0 + t.kp * t.p0) * (1 - r);
        t.weight *= std::polar(r * std::exp(-k2 * t.s * nth / (2 * s1)), phase);
        t.s = s1;
        t.kx *= r;
        t.kp *= r;
    }
    return PhaseSpaceState(std::move(out), state.normalized());
}

}  // namespace catgrow
