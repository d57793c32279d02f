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

// Grows a cat over three heralded steps and prints the measures after each.

#include <cstdio>

#include "catgrow/catgrow.hpp"

int main() {
    using namespace catgrow;
    const double mu = 1.0, nbar = 0.1, nth = 1e-3;
    std::printf("%-3s %-10s %-10s %-10s %-10s\n", "N", "min W", "delta", "I", "M");
    for (int N = 1; N <= 3; ++N) {
        auto state = decohered_protocol_state(cat_config(N, mu, nbar, nth));
        auto m = compute_measures(state);
        std::printf("%-3d %-10.5f %-10.5f %-10.5f %-10.5f\n", N, m.min_w, m.delta, m.lee_jeong, m.macroscopicity);
    }
    auto run = run_sequence(cat_config(3, mu, nbar, nth));
    std::printf("step probabilities:");
    for (double p : run.step_probabilities) std::printf(" %.6f", p);
    std::printf("\n");
}
