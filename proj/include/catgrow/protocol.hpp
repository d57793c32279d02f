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
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "catgrow/errors.hpp"
#include "catgrow/phase_space.hpp"
#include "catgrow/thermal_channel.hpp"

namespace catgrow {

/// A phase either held exactly as a rational number of turns (num/den of 2pi)
/// or as raw radians.  Exact phases are reduced to [0, 1) turns.
class Phase {
   public:
    Phase() = default;

    static Phase turns(long long num, long long den) {
        if (den <= 0) throw std::invalid_argument("Phase::turns: denominator must be positive");
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g == 0) g = 1;
        num /= g;
        den /= g;
        num %= den;
        if (num < 0) num += den;
        Phase p;
        p.exact_ = true;
        p.num_ = num;
        p.den_ = den;
        return p;
    }

    static Phase radians(double r) {
        Phase p;
        p.exact_ = false;
        p.rad_ = r;
        return p;
    }

    bool exact() const { return exact_; }
    long long numerator() const { return num_; }
    long long denominator() const { return den_; }

    double value() const { return exact_ ? 2 * kPi * (double)num_ / (double)den_ : rad_; }

    /// exp(i phi); quarter turns come out exactly.
    cplx unit() const {
        if (exact_ && (4 * num_) % den_ == 0) {
            switch ((4 * num_ / den_) % 4) {
                case 0: return {1, 0};
                case 1: return {0, 1};
                case 2: return {-1, 0};
                default: return {0, -1};
            }
        }
        return std::polar(1.0, value());
    }

    Phase plus_half_turn() const {
        if (exact_) return turns(2 * num_ + den_, 2 * den_);
        return radians(rad_ + kPi);
    }

    std::string to_string() const {
        if (exact_) return std::to_string(num_) + "/" + std::to_string(den_) + " turn";
        return std::to_string(rad_) + " rad";
    }

    bool operator==(const Phase &o) const {
        if (exact_ && o.exact_) return num_ == o.num_ && den_ == o.den_;
        return std::abs(std::remainder(value() - o.value(), 2 * kPi)) < 1e-15;
    }

   private:
    bool exact_ = true;
    long long num_ = 0, den_ = 1;
    double rad_ = 0;
};

enum class InputKind { single_photon, coherent };

/// Photon counts (m, n) at the two detectors for one step.
struct ClickOutcome {
    int m = 0;
    int n = 1;
    bool operator==(const ClickOutcome &) const = default;
};

enum class CatBranch { click01, click10 };

struct ProtocolConfig {
    int steps = 1;
    double coupling = 1;
    double initial_occupation = 0;
    std::vector<Phase> phases;
    std::vector<ClickOutcome> clicks;
    InputKind input = InputKind::single_photon;
    cplx alpha{0.0, 0.0};
    double efficiency = 1;
    double thermal_per_step = 0;

    void validate() const {
        if (steps < 1) throw ValidationError("steps", "must be a positive integer");
        if (!(coupling > 0) || !std::isfinite(coupling)) throw ValidationError("coupling", "must be positive");
        if (!(initial_occupation >= 0)) throw ValidationError("initial_occupation", "must be nonnegative");
        if ((int)phases.size() != steps) throw ValidationError("phases", "length must equal steps");
        if ((int)clicks.size() != steps) throw ValidationError("clicks", "length must equal steps");
        if (!(efficiency > 0 && efficiency <= 1)) throw ValidationError("efficiency", "must lie in (0, 1]");
        if (!(thermal_per_step >= 0)) throw ValidationError("thermal_per_step", "must be nonnegative");
        for (const auto &c : clicks) {
            if (c.m < 0 || c.n < 0) throw ValidationError("clicks", "photon counts must be nonnegative");
            if (input == InputKind::single_photon && c.m + c.n != 1) {
                throw ValidationError("clicks", "single-photon input allows only (1,0) or (0,1)");
            }
        }
        if (input == InputKind::coherent && alpha == cplx(0)) {
            throw ValidationError("alpha", "coherent input needs nonzero amplitude");
        }
    }
};

/// phi_j = 2 pi j / N (click01) or 2 pi j / N + pi (click10), j = 1..N, reduced mod 2 pi.
inline std::vector<Phase> cat_phase_schedule(int N, CatBranch branch) {
    if (N < 1) throw std::invalid_argument("cat_phase_schedule: N must be positive");
    std::vector<Phase> out;
    for (int j = 1; j <= N; ++j) {
        Phase p = Phase::turns(j, N);
        out.push_back(branch == CatBranch::click01 ? p : p.plus_half_turn());
    }
    return out;
}

/// Cat-growing configuration: every step clicks (0,1) under the plain schedule,
/// or (1,0) under the shifted one.  Both yield the odd cat.
inline ProtocolConfig cat_config(int N, double mu, double nbar, double nth = 0,
                                 CatBranch branch = CatBranch::click01) {
    ProtocolConfig c;
    c.steps = N;
    c.coupling = mu;
    c.initial_occupation = nbar;
    c.thermal_per_step = nth;
    c.phases = cat_phase_schedule(N, branch);
    c.clicks.assign(N, branch == CatBranch::click01 ? ClickOutcome{0, 1} : ClickOutcome{1, 0});
    return c;
}

struct DisplacementTerm {
    cplx coefficient{0.0, 0.0};
    int power = 0;
};

/// sum_k c_k exp(i k mu X).
struct OperatorDescriptor {
    double mu = 1;
    std::vector<DisplacementTerm> terms;

    void validate() const {
        for (const auto &t : terms) {
            if (t.power < 0) throw std::invalid_argument("OperatorDescriptor: negative exponent");
            if (t.coefficient != cplx(0)) return;
        }
        throw std::invalid_argument("OperatorDescriptor: no nonzero coefficient");
    }

    static OperatorDescriptor identity(double mu, cplx scale = 1) { return {mu, {{scale, 0}}}; }

    cplx coefficient(int power) const {
        cplx c = 0;
        for (const auto &t : terms)
            if (t.power == power) c += t.coefficient;
        return c;
    }
};

namespace detail {

inline std::vector<cplx> poly_mul(const std::vector<cplx> &a, const std::vector<cplx> &b) {
    std::vector<cplx> r(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

}  // namespace detail

/// Step operator for outcome (m, n) with a coherent pulse of amplitude alpha:
/// e^{-|a|^2}/sqrt(m! n!) (a/sqrt2)^{m+n} (z + e^{i phi})^m (z - e^{i phi})^n, z = e^{i mu X}.
inline OperatorDescriptor coherent_operator(double mu, cplx alpha, ClickOutcome outcome, const Phase &phi) {
    if (outcome.m < 0 || outcome.n < 0) throw std::invalid_argument("coherent_operator: negative photon count");
    cplx e = phi.unit();
    std::vector<cplx> poly{1.0};
    for (int i = 0; i < outcome.m; ++i) poly = detail::poly_mul(poly, {e, 1.0});
    for (int i = 0; i < outcome.n; ++i) poly = detail::poly_mul(poly, {-e, 1.0});
    int total = outcome.m + outcome.n;
    double lognorm = -std::norm(alpha) - 0.5 * (detail::log_factorial(outcome.m) + detail::log_factorial(outcome.n));
    cplx pre = std::exp(lognorm) * std::pow(alpha / std::sqrt(2.0), total);
    OperatorDescriptor op{mu, {}};
    for (size_t k = 0; k < poly.size(); ++k) {
        op.terms.push_back({pre * poly[k], (int)k});
    }
    return op;
}

/// Single-photon step operator: (z + e^{i phi})/2 for (1,0), (z - e^{i phi})/2 for (0,1).
inline OperatorDescriptor single_photon_operator(double mu, ClickOutcome outcome, const Phase &phi) {
    cplx e = phi.unit();
    if (outcome == ClickOutcome{1, 0}) return {mu, {{0.5 * e, 0}, {0.5, 1}}};
    if (outcome == ClickOutcome{0, 1}) return {mu, {{-0.5 * e, 0}, {0.5, 1}}};
    throw std::invalid_argument("single_photon_operator: outcome must be (1,0) or (0,1)");
}

/// Operator for step j (1-based) of the configuration, ignoring loss.
inline OperatorDescriptor measurement_operator(const ProtocolConfig &config, int j) {
    if (j < 1 || j > config.steps) throw std::out_of_range("measurement_operator: step index out of range");
    const auto &c = config.clicks.at(j - 1);
    const auto &phi = config.phases.at(j - 1);
    if (config.input == InputKind::single_photon) {
        return single_photon_operator(config.coupling, c, phi);
    }
    return coherent_operator(config.coupling, config.alpha, c, phi);
}

/// Sum_{k,k'} c_k conj(c_k') exp(i k mu X) rho exp(-i k' mu X), merged.
inline PhaseSpaceState apply_step(const PhaseSpaceState &state, const OperatorDescriptor &op) {
    op.validate();
    std::vector<WignerTerm> out;
    out.reserve(state.size() * op.terms.size() * op.terms.size());
    for (const auto &a : op.terms) {
        for (const auto &b : op.terms) {
            cplx c = a.coefficient * std::conj(b.coefficient);
            if (c == cplx(0)) continue;
            double left = a.power * op.mu, right = b.power * op.mu;
            double shift = 0.5 * (left + right), dk = left - right;
            for (const auto &t : state.terms()) {
                WignerTerm u = t;
                u.weight *= c;
                if (u.kp != 0) u.weight *= std::polar(1.0, -u.kp * shift);
                u.p0 += shift;
                u.kx += dk;
                out.push_back(u);
            }
        }
    }
    return hermitize(merge_terms(PhaseSpaceState(std::move(out), false)));
}

/// Thermal state with mean occupation nbar: exp(-(X^2+P^2)/S)/(pi S), S = 1 + 2 nbar.
inline PhaseSpaceState thermal_state(double nbar) {
    if (!(nbar >= 0)) throw std::invalid_argument("thermal_state: nbar must be nonnegative");
    double S = 1 + 2 * nbar;
    return PhaseSpaceState({{1.0 / (kPi * S), 0, 0, S, 0, 0}}, true);
}

/// Odd cat of a thermal state: components at P = 0 and P = N mu, fringes at N mu / 2.
inline PhaseSpaceState build_scs(int N, double mu, double nbar) {
    double D = N * mu;
    if (!(D > 0)) throw std::invalid_argument("build_scs: N mu must be positive");
    if (!(nbar >= 0)) throw std::invalid_argument("build_scs: nbar must be nonnegative");
    double S = 1 + 2 * nbar;
    double norm = 1.0 / (2.0 * -std::expm1(-D * D * S / 4));
    double w = norm / (kPi * S);
    std::vector<WignerTerm> t{
        {w, 0, 0, S, 0, 0},
        {-w, 0, D / 2, S, -D, 0},
        {-w, 0, D / 2, S, D, 0},
        {w, 0, D, S, 0, 0},
    };
    return PhaseSpaceState(std::move(t), true);
}

struct SequenceResult {
    PhaseSpaceState state;
    double success_weight = 1;
    std::vector<double> step_probabilities;
    std::vector<PhaseSpaceState> history;  // initial state then one entry per step, if requested
};

/// Operator applied at step j including the small-loss substitution alpha -> sqrt(eta) alpha.
inline OperatorDescriptor effective_step_operator(const ProtocolConfig &config, int j) {
    if (config.input == InputKind::coherent && config.efficiency < 1) {
        return coherent_operator(config.coupling, std::sqrt(config.efficiency) * config.alpha,
                                 config.clicks.at(j - 1), config.phases.at(j - 1));
    }
    return measurement_operator(config, j);
}

/// Runs the N steps on the initial thermal state.  Each step applies the
/// heralded operator, renormalizes, then the thermal channel (if n_th > 0).
/// success_weight is the product of the conditional step probabilities;
/// single-photon input also carries the per-step detection factor eta.
inline SequenceResult run_sequence(const ProtocolConfig &config, bool keep_history = false) {
    config.validate();
    SequenceResult r;
    r.state = thermal_state(config.initial_occupation);
    if (keep_history) r.history.push_back(r.state);
    for (int j = 1; j <= config.steps; ++j) {
        auto raw = apply_step(r.state, effective_step_operator(config, j));
        double p = total_integral(raw).real();
        if (!(p > 0) || raw.empty()) {
            throw std::domain_error("run_sequence: heralding sequence has zero probability at step " +
                                    std::to_string(j));
        }
        if (config.input == InputKind::single_photon) p *= config.efficiency;
        r.step_probabilities.push_back(p);
        r.success_weight *= p;
        r.state = normalize(raw);
        if (config.thermal_per_step > 0) {
            r.state = hermitize(merge_terms(thermal_channel(r.state, config.thermal_per_step)));
        }
        if (keep_history) r.history.push_back(r.state);
    }
    return r;
}

enum class CatParity { even_cat, odd_cat };

inline const char *to_string(CatParity p) { return p == CatParity::even_cat ? "even_cat" : "odd_cat"; }

/// Parity of the cat produced when every step gives `outcome` under the given
/// schedule: the composed operator is proportional to z^N + c, c = +1 even, -1 odd.
inline CatParity parity_class(int N, double mu, ClickOutcome outcome, CatBranch schedule) {
    (void)mu;
    if (N < 1) throw std::invalid_argument("parity_class: N must be positive");
    auto phases = cat_phase_schedule(N, schedule);
    std::vector<cplx> poly{1.0};
    for (const auto &ph : phases) {
        auto op = single_photon_operator(1.0, outcome, ph);
        poly = detail::poly_mul(poly, {op.coefficient(0), op.coefficient(1)});
    }
    cplx lead = poly.back();
    for (size_t k = 1; k + 1 < poly.size(); ++k) {
        if (std::abs(poly[k]) > 1e-9 * std::abs(lead)) {
            throw std::invalid_argument("parity_class: schedule does not cancel the intermediate components");
        }
    }
    cplx c = poly.front() / lead;
    if (std::abs(c - 1.0) < 1e-9) return CatParity::even_cat;
    if (std::abs(c + 1.0) < 1e-9) return CatParity::odd_cat;
    throw std::invalid_argument("parity_class: composed operator is not an even or odd cat");
}

}  // namespace catgrow
