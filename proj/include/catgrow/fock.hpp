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

// Truncated number-basis simulation of the protocol.  Used to cross-check
// the phase-space engine; it shares no physics code with it.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "catgrow/errors.hpp"
#include "catgrow/measures.hpp"
#include "catgrow/phase_space.hpp"
#include "catgrow/protocol.hpp"
#include "catgrow/quadrature.hpp"

namespace catgrow {

using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

/// Leakage (population in the top five levels) above which a density is
/// considered truncated.
inline constexpr double kFockLeakage = 1e-8;

class TruncationError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct FockDensity {
    CMatrix rho;

    int dim() const { return (int)rho.rows(); }
    double trace() const { return rho.trace().real(); }
    double leakage() const {
        double s = 0;
        for (int n = std::max(0, dim() - 5); n < dim(); ++n) s += rho(n, n).real();
        return s / std::max(trace(), 1e-300);
    }
    double hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }
    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
    FockDensity normalized() const {
        double t = trace();
        if (!(t > 0)) throw std::domain_error("FockDensity: zero trace");
        return {rho / t};
    }
    double purity() const { return (rho * rho).trace().real(); }
};

/// D = ceil((N mu)^2 / 2 + 6 N mu + 30).
inline int fock_dimension(int N, double mu) {
    double D = N * std::abs(mu);
    return (int)std::ceil(D * D / 2 + 6 * D + 30);
}

inline double trace_distance(const FockDensity &a, const FockDensity &b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a.rho - b.rho, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// Eigen-decomposition of the truncated position operator
/// X = (b + b^dagger)/sqrt 2, cached per dimension.
class PositionBasis {
   public:
    explicit PositionBasis(int D) : D_(D) {
        RMatrix X = RMatrix::Zero(D, D);
        for (int n = 0; n + 1 < D; ++n) X(n, n + 1) = X(n + 1, n) = std::sqrt((n + 1) / 2.0);
        Eigen::SelfAdjointEigenSolver<RMatrix> es(X);
        x_ = es.eigenvalues();
        V_ = es.eigenvectors();
    }
    int dim() const { return D_; }
    const Eigen::VectorXd &eigenvalues() const { return x_; }
    const RMatrix &eigenvectors() const { return V_; }

    /// V diag(f(x_i)) V^T.
    template <class Fn>
    CMatrix function_of_x(Fn &&f) const {
        Eigen::VectorXcd d(D_);
        for (int i = 0; i < D_; ++i) d[i] = f(x_[i]);
        return V_.cast<cplx>() * d.asDiagonal() * V_.transpose().cast<cplx>();
    }
    /// e^{i a X}.
    CMatrix exp_ix(double a) const {
        return function_of_x([a](double x) { return std::exp(cplx(0, a * x)); });
    }
    /// e^{i a P} = T e^{i a X} T^dagger with T = diag(i^n).
    CMatrix exp_ip(double a) const {
        CMatrix M = exp_ix(a);
        for (int m = 0; m < D_; ++m)
            for (int n = 0; n < D_; ++n) M(m, n) *= ipow(m - n);
        return M;
    }

    static const PositionBasis &get(int D) {
        static std::mutex mu;
        static std::map<int, std::unique_ptr<PositionBasis>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto &slot = cache[D];
        if (!slot) slot = std::make_unique<PositionBasis>(D);
        return *slot;
    }

   private:
    static cplx ipow(int k) {
        switch (((k % 4) + 4) % 4) {
            case 0: return 1;
            case 1: return {0, 1};
            case 2: return -1;
            default: return {0, -1};
        }
    }
    int D_;
    Eigen::VectorXd x_;
    RMatrix V_;
};

inline CMatrix position_operator(int D) {
    CMatrix X = CMatrix::Zero(D, D);
    for (int n = 0; n + 1 < D; ++n) X(n, n + 1) = X(n + 1, n) = std::sqrt((n + 1) / 2.0);
    return X;
}

inline CMatrix momentum_operator(int D) {
    CMatrix P = CMatrix::Zero(D, D);
    for (int n = 0; n + 1 < D; ++n) {
        double a = std::sqrt((n + 1) / 2.0);
        P(n, n + 1) = cplx(0, -a);
        P(n + 1, n) = cplx(0, a);
    }
    return P;
}

inline FockDensity thermal_density(double nbar, int D) {
    if (!(nbar >= 0)) throw std::invalid_argument("thermal_density: nbar must be nonnegative");
    if (D < 6) throw TruncationError("thermal_density: dimension too small");
    double q = nbar / (1 + nbar);
    if (std::pow(q, D) > 1e-10) {
        throw TruncationError("thermal_density: Boltzmann tail exceeds 1e-10 at D = " + std::to_string(D));
    }
    CMatrix rho = CMatrix::Zero(D, D);
    for (int n = 0; n < D; ++n) rho(n, n) = std::pow(q, n) / (1 + nbar);
    return {rho};
}

/// rho -> M rho M^dagger, M = sum_k c_k e^{i k mu X}.  Not normalized.
inline FockDensity apply_descriptor(const FockDensity &state, const OperatorDescriptor &op) {
    op.validate();
    const auto &basis = PositionBasis::get(state.dim());
    CMatrix M = basis.function_of_x([&](double x) {
        cplx v = 0;
        for (const auto &t : op.terms) v += t.coefficient * std::exp(cplx(0, t.power * op.mu * x));
        return v;
    });
    FockDensity out{M * state.rho * M.adjoint()};
    if (out.leakage() > kFockLeakage) {
        throw TruncationError("apply_descriptor: truncation leakage " + std::to_string(out.leakage()));
    }
    return out;
}

namespace detail {

inline FockDensity thermal_channel_fock_order(const FockDensity &state, double nth, int order) {
    const auto &basis = PositionBasis::get(state.dim());
    const auto &gh = gauss_hermite(order);
    const double scale = std::sqrt(2 * nth);
    const double norm = 1 / std::sqrt(kPi);
    // D(beta) = e^{i sqrt2 (Im beta X - Re beta P)}; the Weyl phases cancel
    // under conjugation, so the two Gaussian averages factorize.
    CMatrix mid = CMatrix::Zero(state.dim(), state.dim());
    for (int i = 0; i < order; ++i) {
        CMatrix U = basis.exp_ip(-scale * gh.nodes[i]);
        mid += (norm * gh.weights[i]) * (U * state.rho * U.adjoint());
    }
    CMatrix out = CMatrix::Zero(state.dim(), state.dim());
    for (int i = 0; i < order; ++i) {
        CMatrix U = basis.exp_ix(scale * gh.nodes[i]);
        out += (norm * gh.weights[i]) * (U * mid * U.adjoint());
    }
    return {out};
}

}  // namespace detail

/// Phase-space averaged displacement channel with n_th added phonons.
/// Order-40 Gauss-Hermite in each quadrature, checked against order 80.
inline FockDensity thermal_channel_fock(const FockDensity &state, double nth) {
    if (!(nth >= 0)) throw std::invalid_argument("thermal_channel_fock: n_th must be nonnegative");
    if (nth == 0) return state;
    auto a = detail::thermal_channel_fock_order(state, nth, 40);
    auto b = detail::thermal_channel_fock_order(state, nth, 80);
    double change = (a.rho - b.rho).cwiseAbs().maxCoeff();
    if (change > 1e-8) {
        throw std::runtime_error("thermal_channel_fock: quadrature not converged (change " + std::to_string(change) +
                                 ")");
    }
    if (b.leakage() > kFockLeakage) throw TruncationError("thermal_channel_fock: truncation leakage");
    return b;
}

/// W(x, p) = sum_{mn} rho_mn W_mn(x, p) by the Laguerre recursion
/// W_mn ~ (2A)^{n-m} L_m^{n-m}(4|A|^2), A = (x + ip)/sqrt 2, run for a batch
/// of points at once.
inline void fock_wigner_batch(const CMatrix &rho, std::span<const double> xs, std::span<const double> ps,
                              std::span<double> out) {
    const int M = (int)rho.rows();
    const size_t K = xs.size();
    std::vector<double> ar(K), ai(K), wr(size_t(M) * K), wi(size_t(M) * K), tr(K), ti(K);
    std::vector<double> isq(M + 1, 0.0), sq(M + 1, 0.0);
    for (int n = 1; n <= M; ++n) {
        sq[n] = std::sqrt((double)n);
        isq[n] = 1 / sq[n];
    }
    const double r2 = std::sqrt(2.0);
    for (size_t k = 0; k < K; ++k) {
        ar[k] = r2 * xs[k];  // 2A
        ai[k] = r2 * ps[k];
        wr[k] = std::exp(-(xs[k] * xs[k] + ps[k] * ps[k])) / kPi;
        wi[k] = 0;
        out[k] = rho(0, 0).real() * wr[k];
    }
    for (int n = 1; n < M; ++n) {
        double *cr = &wr[size_t(n) * K], *ci = &wi[size_t(n) * K];
        const double *pr = &wr[size_t(n - 1) * K], *pi = &wi[size_t(n - 1) * K];
        const double rr = 2 * rho(0, n).real(), ri = 2 * rho(0, n).imag(), s = isq[n];
        for (size_t k = 0; k < K; ++k) {
            cr[k] = (ar[k] * pr[k] - ai[k] * pi[k]) * s;
            ci[k] = (ar[k] * pi[k] + ai[k] * pr[k]) * s;
            out[k] += rr * cr[k] - ri * ci[k];
        }
    }
    for (int m = 1; m < M; ++m) {
        const double sm = sq[m], ism = isq[m];
        double *cr = &wr[size_t(m) * K], *ci = &wi[size_t(m) * K];
        const double *pr = &wr[size_t(m - 1) * K], *pi = &wi[size_t(m - 1) * K];
        const double d = rho(m, m).real();
        for (size_t k = 0; k < K; ++k) {
            tr[k] = cr[k];
            ti[k] = ci[k];
            // conj(2A) * temp
            cr[k] = (ar[k] * tr[k] + ai[k] * ti[k] - sm * pr[k]) * ism;
            ci[k] = (ar[k] * ti[k] - ai[k] * tr[k] - sm * pi[k]) * ism;
            out[k] += d * cr[k];
        }
        for (int n = m + 1; n < M; ++n) {
            double *nr = &wr[size_t(n) * K], *ni = &wi[size_t(n) * K];
            const double *qr = &wr[size_t(n - 1) * K], *qi = &wi[size_t(n - 1) * K];
            const double rr = 2 * rho(m, n).real(), ri = 2 * rho(m, n).imag(), s = isq[n];
            for (size_t k = 0; k < K; ++k) {
                double xr = (ar[k] * qr[k] - ai[k] * qi[k] - sm * tr[k]) * s;
                double xi = (ar[k] * qi[k] + ai[k] * qr[k] - sm * ti[k]) * s;
                tr[k] = nr[k];
                ti[k] = ni[k];
                nr[k] = xr;
                ni[k] = xi;
                out[k] += rr * xr - ri * xi;
            }
        }
    }
}

/// Drops trailing levels whose total population is below `tail`.
inline CMatrix trim_levels(const CMatrix &rho, double tail = 1e-20) {
    int D = (int)rho.rows();
    double acc = 0;
    while (D > 1 && acc + std::abs(rho(D - 1, D - 1).real()) < tail) {
        acc += std::abs(rho(D - 1, D - 1).real());
        --D;
    }
    return rho.topLeftCorner(D, D);
}

inline Field wigner_of(const FockDensity &state, const Grid &grid) {
    grid.validate();
    if (std::abs(state.trace() - 1) > 1e-10) throw std::invalid_argument("wigner_of: density must be normalized");
    if (state.leakage() > kFockLeakage) throw TruncationError("wigner_of: truncation leakage");
    Field f{grid, std::vector<double>(size_t(grid.nx) * grid.np)};
    auto ps = grid.ps();
    std::vector<double> xs(grid.np);
    for (int i = 0; i < grid.nx; ++i) {
        std::fill(xs.begin(), xs.end(), grid.x(i));
        fock_wigner_batch(state.rho, xs, ps, std::span<double>(f.values.data() + size_t(i) * grid.np, grid.np));
    }
    return f;
}

/// Number-basis density exposed as a PhaseSpaceField.  Fringe wavenumbers
/// are supplied by the caller; the box comes from the quadrature moments.
class FockField {
   public:
    FockField(const FockDensity &state, double kx, double kp) : rho_(trim_levels(state.rho, 1e-14)), kx_(kx), kp_(kp) {
        const int D = state.dim();
        CMatrix X = position_operator(D), P = momentum_operator(D);
        auto ev = [&](const CMatrix &A) { return (A * state.rho).trace().real(); };
        double mx = ev(X), mp = ev(P);
        double vx = std::max(ev(X * X) - mx * mx, 0.5), vp = std::max(ev(P * P) - mp * mp, 0.5);
        // Width of the narrowest lobe; the positive tails beyond 6 widths do
        // not enter the negative part.
        double spread = std::sqrt(std::min(vx, vp));
        double hx = std::sqrt(vx) + 6 * spread, hp = std::sqrt(vp) + 6 * spread;
        box_ = {mx - hx, mx + hx, mp - hp, mp + hp};
        sigma_ = spread;
    }
    double operator()(double x, double p) const {
        double out = 0;
        fock_wigner_batch(rho_, std::span<const double>(&x, 1), std::span<const double>(&p, 1),
                          std::span<double>(&out, 1));
        return out;
    }
    std::vector<double> tensor(std::span<const double> xs, std::span<const double> ps) const {
        const size_t n = xs.size() * ps.size();
        std::vector<double> out(n), bx(n), bp(n);
        for (size_t i = 0; i < xs.size(); ++i)
            for (size_t j = 0; j < ps.size(); ++j) {
                bx[i * ps.size() + j] = xs[i];
                bp[i * ps.size() + j] = ps[j];
            }
        const size_t chunk = 4096;
        for (size_t s = 0; s < n; s += chunk) {
            size_t e = std::min(n, s + chunk);
            fock_wigner_batch(rho_, std::span<const double>(bx.data() + s, e - s),
                              std::span<const double>(bp.data() + s, e - s), std::span<double>(out.data() + s, e - s));
        }
        return out;
    }
    FieldGeometry geometry() const { return {box_, kx_, kp_, sigma_}; }
    int effective_dimension() const { return (int)rho_.rows(); }

   private:
    CMatrix rho_;
    double kx_, kp_;
    Box box_;
    double sigma_;
};

/// Optical amplitudes on modes (1, 2, 3, 4) for one mechanical position x:
/// 50:50 splitter, phases e^{i mu x} (arm 1) and e^{i phi} (arm 2), loss
/// splitters with transmission eta into environment modes 3, 4, then the
/// second 50:50 splitter.  Columns map a unit input in mode 1.
inline std::array<cplx, 4> optical_output_column(double mu_x, cplx phase, double eta) {
    const double r = 1 / std::sqrt(2.0);
    // a1^dagger -> (a1^dagger + a2^dagger)/sqrt2
    cplx arm1 = r * std::exp(cplx(0, mu_x)), arm2 = r * phase;
    cplx env3 = std::sqrt(1 - eta) * arm1, env4 = std::sqrt(1 - eta) * arm2;
    arm1 *= std::sqrt(eta);
    arm2 *= std::sqrt(eta);
    // second splitter: a1^dagger -> (a1^dagger + a2^dagger)/sqrt2, a2^dagger -> (a1^dagger - a2^dagger)/sqrt2
    return {r * (arm1 + arm2), r * (arm1 - arm2), env3, env4};
}

/// One lossy step from the four-mode model: the amplitude for detecting
/// (m, n) with (k, l) photons in the environment, summed incoherently over
/// k, l.  Coherent inputs carry amplitude sqrt2 alpha in mode 1.  Not normalized.
inline FockDensity lossy_step_fock(const FockDensity &state, double eta, InputKind input, cplx alpha,
                                   ClickOutcome outcome, const Phase &phi, double mu, int max_env_photons = 60) {
    if (!(eta > 0 && eta <= 1)) throw std::invalid_argument("lossy_step_fock: eta must lie in (0, 1]");
    if (outcome.m < 0 || outcome.n < 0) throw std::invalid_argument("lossy_step_fock: negative photon count");
    const int D = state.dim();
    const auto &basis = PositionBasis::get(D);
    const RMatrix &V = basis.eigenvectors();
    const Eigen::VectorXd &xs = basis.eigenvalues();
    CMatrix rx = V.transpose().cast<cplx>() * state.rho * V.cast<cplx>();
    const cplx ph = phi.unit();

    std::vector<std::array<cplx, 4>> cols(D);
    for (int i = 0; i < D; ++i) cols[i] = optical_output_column(mu * xs[i], ph, eta);

    auto lfact = [](int n) { return std::lgamma(n + 1.0); };
    CMatrix kernel = CMatrix::Zero(D, D);
    if (input == InputKind::single_photon) {
        // One photon total: exactly one of (m, n, k, l) equals 1.
        std::vector<std::array<int, 4>> patterns;
        if (outcome.m + outcome.n == 1) {
            patterns.push_back({outcome.m, outcome.n, 0, 0});
        } else if (outcome.m + outcome.n == 0) {
            patterns.push_back({0, 0, 1, 0});
            patterns.push_back({0, 0, 0, 1});
        }
        for (const auto &pat : patterns) {
            int mode = int(std::find(pat.begin(), pat.end(), 1) - pat.begin());
            for (int i = 0; i < D; ++i)
                for (int j = 0; j < D; ++j) kernel(i, j) += cols[i][mode] * std::conj(cols[j][mode]);
        }
    } else {
        const cplx a0 = std::sqrt(2.0) * alpha;
        const double pre = std::exp(-std::norm(a0) / 2);
        std::vector<cplx> base(D);
        std::vector<std::array<cplx, 4>> beta(D);
        for (int i = 0; i < D; ++i) {
            for (int c = 0; c < 4; ++c) beta[i][c] = a0 * cols[i][c];
            base[i] = pre * std::pow(beta[i][0], outcome.m) * std::pow(beta[i][1], outcome.n) *
                      std::exp(-0.5 * (lfact(outcome.m) + lfact(outcome.n)));
        }
        // sum_{k,l} <k|b3><b3'|k> <l|b4><b4'|l>, each truncated explicitly
        double env = std::norm(a0) * (1 - eta) / 2;
        int kmax = std::min(max_env_photons, (int)std::ceil(env + 12 * std::sqrt(env + 1) + 20));
        for (int i = 0; i < D; ++i) {
            for (int j = 0; j < D; ++j) {
                cplx s3 = 0, s4 = 0, t3 = 1, t4 = 1;
                cplx z3 = beta[i][2] * std::conj(beta[j][2]), z4 = beta[i][3] * std::conj(beta[j][3]);
                for (int k = 0; k <= kmax; ++k) {
                    if (k > 0) {
                        t3 *= z3 / double(k);
                        t4 *= z4 / double(k);
                    }
                    s3 += t3;
                    s4 += t4;
                }
                kernel(i, j) = base[i] * std::conj(base[j]) * s3 * s4;
            }
        }
    }
    CMatrix out = V.cast<cplx>() * rx.cwiseProduct(kernel) * V.transpose().cast<cplx>();
    FockDensity r{out};
    if (r.trace() > 0 && r.leakage() > kFockLeakage) throw TruncationError("lossy_step_fock: truncation leakage");
    return r;
}

struct FockRun {
    FockDensity state;
    std::vector<double> step_probabilities;
    int dimension = 0;
};

/// Runs the protocol in the number basis with the same step and channel
/// placement as the phase-space engine; the dimension doubles on leakage.
inline FockRun fock_run(const ProtocolConfig &config, int dimension = 0) {
    config.validate();
    int D = dimension > 0 ? dimension : fock_dimension(config.steps, config.coupling);
    D = std::max(D, (int)std::ceil(std::log(1e-10) / std::log(std::max(config.initial_occupation, 1e-300) /
                                                             (1 + config.initial_occupation))) + 1);
    for (int attempt = 0; attempt < 4; ++attempt, D *= 2) {
        try {
            FockRun run;
            run.dimension = D;
            run.state = thermal_density(config.initial_occupation, D);
            for (int j = 1; j <= config.steps; ++j) {
                auto raw = apply_descriptor(run.state, effective_step_operator(config, j));
                double p = raw.trace();
                if (!(p > 0)) throw std::domain_error("fock_run: zero heralding probability");
                if (config.input == InputKind::single_photon) p *= config.efficiency;
                run.step_probabilities.push_back(p);
                run.state = raw.normalized();
                if (config.thermal_per_step > 0) run.state = thermal_channel_fock(run.state, config.thermal_per_step);
            }
            run.state.rho = 0.5 * (run.state.rho + run.state.rho.adjoint());
            return run;
        } catch (const TruncationError &) {
            if (attempt == 3) throw;
        }
    }
    throw TruncationError("fock_run: unreachable");
}

/// -1/4 tr([X,rho]^2 + [P,rho]^2) - 1/2 tr rho^2.
inline double fock_lee_jeong(const FockDensity &state) {
    const int D = state.dim();
    CMatrix X = position_operator(D), P = momentum_operator(D);
    CMatrix cx = X * state.rho - state.rho * X, cp = P * state.rho - state.rho * P;
    return -0.25 * ((cx * cx).trace().real() + (cp * cp).trace().real()) - 0.5 * state.purity();
}

/// Marginal of the quadrature X cos(lambda) + P sin(lambda) with derivatives,
/// from Hermite functions.
class FockMarginal {
   public:
    FockMarginal(const FockDensity &state, double lambda) : D_(state.dim()) {
        rho_ = state.rho;
        for (int m = 0; m < D_; ++m)
            for (int n = 0; n < D_; ++n) rho_(m, n) *= std::exp(cplx(0, -(m - n) * lambda));
    }
    DensityDerivs derivs(double u) const {
        Eigen::VectorXd psi(D_), dpsi(D_);
        psi[0] = std::pow(kPi, -0.25) * std::exp(-u * u / 2);
        if (D_ > 1) psi[1] = std::sqrt(2.0) * u * psi[0];
        for (int n = 2; n < D_; ++n)
            psi[n] = std::sqrt(2.0 / n) * u * psi[n - 1] - std::sqrt((n - 1.0) / n) * psi[n - 2];
        for (int n = 0; n < D_; ++n) {
            // psi_n' = sqrt(n/2) psi_{n-1} - sqrt((n+1)/2) psi_{n+1}
            double a = n > 0 ? std::sqrt(n / 2.0) * psi[n - 1] : 0.0;
            double b = n + 1 < D_ ? std::sqrt((n + 1) / 2.0) * psi[n + 1] : u * psi[n] - a;
            dpsi[n] = a - b;
        }
        Eigen::VectorXcd rp = rho_ * psi.cast<cplx>();
        double p = psi.cast<cplx>().dot(rp).real();
        double dp = 2 * dpsi.cast<cplx>().dot(rp).real();
        return {p, dp, 0.0};
    }

   private:
    int D_;
    CMatrix rho_;
};

/// Fisher information of the shifted marginal, int p'^2 / p over [-L, L].
inline double fock_cfi(const FockDensity &state, double lambda, double half_width) {
    FockMarginal m(state, lambda);
    double pmax = 0;
    for (double u = -half_width; u <= half_width; u += 0.05) pmax = std::max(pmax, m.derivs(u).p);
    double thr = 1e-14 * pmax;
    auto bp = panel_edges(-half_width, half_width, 0.25);
    auto r = integrate_adaptive(
        [&](double u) {
            auto d = m.derivs(u);
            return d.p > thr ? d.dp * d.dp / d.p : 0.0;
        },
        bp, 1e-12, 1e-10, 8000);
    return r.value;
}

inline MacroscopicityResult fock_macroscopicity(const FockDensity &state) {
    const int D = state.dim();
    CMatrix N = CMatrix::Zero(D, D);
    for (int n = 0; n < D; ++n) N(n, n) = n;
    double nmean = (N * state.rho).trace().real();
    double L = std::sqrt(2 * nmean + 1) + 10;
    const int scan = 90;
    double step = kPi / scan;
    int best = 0;
    std::vector<double> F(scan);
    for (int i = 0; i < scan; ++i) {
        F[i] = fock_cfi(state, i * step, L);
        if (F[i] > F[best]) best = i;
    }
    auto [lam, fmax] = golden_section_max([&](double l) { return fock_cfi(state, l, L); }, best * step - step,
                                          best * step + step, 1e-8);
    if (F[best] > fmax) {
        lam = best * step;
        fmax = F[best];
    }
    return {0.5 * fmax, wrap_half_turn(lam), 0};
}

/// All four measures of a number-basis state.  min W and the negative
/// volume use the generic drivers on the number-basis Wigner function.
inline MeasureReport fock_measures(const FockDensity &state, double kx, double kp) {
    FockField field(state, kx, kp);
    MeasureReport r;
    auto m = min_wigner(field);
    r.min_w = m.value;
    r.min_w_x = m.x;
    r.min_w_p = m.p;
    auto d = negative_volume(field, 1e-5);
    r.delta = d.value;
    r.delta_error = d.error;
    r.lee_jeong = fock_lee_jeong(state);
    auto mc = fock_macroscopicity(state);
    r.macroscopicity = mc.value;
    r.optimal_lambda = mc.optimal_lambda;
    return r;
}

struct OracleCell {
    int steps = 0;
    double coupling = 0, initial_occupation = 0, thermal_per_step = 0;
    int dimension = 0;
    double wigner_sup_norm = 0;      // engine vs number basis on the engine's default grid
    double probability_error = 0;    // largest step-probability difference
    MeasureReport engine, oracle;
    double measure_error = 0;        // largest of the four absolute differences

    bool pass(double wigner_tol = 1e-7, double measure_tol = 1e-4, double prob_tol = 1e-10) const {
        return wigner_sup_norm <= wigner_tol && measure_error <= measure_tol && probability_error <= prob_tol;
    }
};

/// Runs one configuration through both the phase-space engine and the
/// number basis and compares fields, step probabilities and measures.
inline OracleCell oracle_cell(int N, double mu, double nbar, double nth, bool with_measures = true) {
    OracleCell c{N, mu, nbar, nth};
    ProtocolConfig cfg = cat_config(N, mu, nbar, nth);
    auto eng = run_sequence(cfg);
    auto fock = fock_run(cfg);
    c.dimension = fock.dimension;
    for (size_t j = 0; j < eng.step_probabilities.size(); ++j) {
        c.probability_error =
            std::max(c.probability_error, std::abs(eng.step_probabilities[j] - fock.step_probabilities[j]));
    }
    Grid g = default_grid(eng.state);
    c.wigner_sup_norm = sup_norm_difference(evaluate(eng.state, g), wigner_of(fock.state, g));
    if (with_measures) {
        c.engine = compute_measures(eng.state);
        c.oracle = fock_measures(fock.state, max_abs_kx(eng.state), max_abs_kp(eng.state));
        c.measure_error = std::max({std::abs(c.engine.min_w - c.oracle.min_w), std::abs(c.engine.delta - c.oracle.delta),
                                    std::abs(c.engine.lee_jeong - c.oracle.lee_jeong),
                                    std::abs(c.engine.macroscopicity - c.oracle.macroscopicity)});
    }
    return c;
}

}  // namespace catgrow
