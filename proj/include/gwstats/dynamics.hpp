// Copyright 2025 The gwstats Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "gwstats/gaussian_core.hpp"

namespace gwstats {

// Mode order everywhere in this header: (gw, bar).
struct CouplingContext {
    double gamma_g = 0.0;    // rad/s
    double omega_ell = 0.0;  // rad/s
    double nu = 0.0;         // rad/s
    double t = 0.0;          // s

    double detuning() const { return omega_ell - nu; }
    double gamma_t() const { return gamma_g * t; }
};

struct OpenChannelParams {
    double kappa = 0.0;  // 1/s
    double Nbar = 0.0;
};

struct DetunedCoefficients {
    cplx f;
    cplx g_plus;   // gw self-coefficient
    cplx g_minus;  // bar self-coefficient
    cplx phase;    // common factor exp(-i (omega_ell + nu) t / 2), not folded into the above
    double lambda = 0.0;
};

struct BeyondRwaCoefficients {
    cplx A, B, D, E;
    double Omega_plus = 0.0;
    double Omega_minus = 0.0;
    double omega_g = 0.0;
    double delta_g = 0.0;
};

struct SqueezingTransfer {
    double min_var = 0.0;
    double max_var = 0.0;
    double theta_min = 0.0;
};

namespace detail {

inline double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

inline RMat rot_half_pi() {
    RMat r(2, 2);
    r << 0.0, -1.0, 1.0, 0.0;
    return r;
}

// local phase on the bar that removes the -i of the beamsplitter
inline SymplecticMap bar_phase_fix() {
    RMat m = RMat::Identity(4, 4);
    m.block<2, 2>(2, 2) = rot_half_pi();
    return SymplecticMap(m);
}

inline void require_single_mode(const GaussianState& s, const char* what) {
    if (s.num_modes() != 1) throw std::invalid_argument(std::string(what) + ": expected a single-mode state");
}

}  // namespace detail

inline SymplecticMap beamsplitter_map(double gamma_t) {
    const double c = std::cos(gamma_t);
    const double s = std::sin(gamma_t);
    RMat m(4, 4);
    m << c, 0, 0, s,
         0, c, -s, 0,
         0, s, c, 0,
         -s, 0, 0, c;
    return SymplecticMap(m);
}

// Joint (gw, bar) state after the resonant beamsplitter, with the bar phase
// convention applied so that sigma_bar(t) = cos^2 sigma_bar(0) + sin^2 sigma_gw(0)
// for phase-insensitive detector states.
inline GaussianState evolve_closed(const GaussianState& gw, const GaussianState& bar, double gamma_t) {
    detail::require_single_mode(gw, "evolve_closed");
    detail::require_single_mode(bar, "evolve_closed");
    const GaussianState joint = apply_symplectic(tensor(gw, bar), beamsplitter_map(gamma_t));
    return apply_symplectic(joint, detail::bar_phase_fix());
}

inline GaussianState bar_marginal(const GaussianState& gw, const GaussianState& bar, double gamma_t) {
    return reduce(evolve_closed(gw, bar, gamma_t), {1});
}

inline DetunedCoefficients detuned_coefficients(const CouplingContext& ctx) {
    if (ctx.gamma_g < 0.0) throw std::invalid_argument("detuned_coefficients: gamma_g must be >= 0");
    const double delta = ctx.detuning();
    const double lambda = std::sqrt(4.0 * ctx.gamma_g * ctx.gamma_g + delta * delta);
    const double half = 0.5 * lambda * ctx.t;
    const double sc = detail::sinc(half);
    const double c = std::cos(half);
    // (Delta / lambda) sin(lambda t / 2) written through sinc so lambda = 0 is regular
    const double ds = 0.5 * delta * ctx.t * sc;
    DetunedCoefficients out;
    out.lambda = lambda;
    out.f = cplx(0.0, -ctx.gamma_g * ctx.t * sc);
    out.g_plus = cplx(c, ds);
    out.g_minus = cplx(c, -ds);
    out.phase = std::polar(1.0, -0.5 * (ctx.omega_ell + ctx.nu) * ctx.t);
    return out;
}

// 2x2 map (a(t), b(t)) = phase * [[g_plus, f], [f, g_minus]] (a(0), b(0))
inline Eigen::Matrix2cd detuned_mode_map(const CouplingContext& ctx, bool include_phase = false) {
    const DetunedCoefficients k = detuned_coefficients(ctx);
    Eigen::Matrix2cd m;
    m << k.g_plus, k.f, k.f, k.g_minus;
    return include_phase ? (k.phase * m).eval() : m;
}

inline BeyondRwaCoefficients beyond_rwa_coefficients(const CouplingContext& ctx) {
    const double w = ctx.omega_ell;
    if (!(w > 0.0)) throw std::invalid_argument("beyond_rwa_coefficients: omega_ell must be > 0");
    if (std::abs(ctx.detuning()) > 1e-12 * w) {
        throw std::invalid_argument("beyond_rwa_coefficients: requires resonance nu = omega_ell");
    }
    const double g = ctx.gamma_g;
    const double dg = 2.0 * g / w;
    if (dg >= 1.0) throw std::domain_error("beyond_rwa_coefficients: delta_g >= 1 (ultrastrong coupling)");
    BeyondRwaCoefficients k;
    k.delta_g = dg;
    k.Omega_plus = w * std::sqrt(1.0 + dg);
    k.Omega_minus = w * std::sqrt(1.0 - dg);
    k.omega_g = w * std::sqrt(1.0 - dg * dg);
    const double t = ctx.t;
    const double sp = std::sin(k.Omega_plus * t);
    const double sm = std::sin(k.Omega_minus * t);
    const double op = k.Omega_plus;
    const double om = k.Omega_minus;
    const double wg = k.omega_g;
    const cplx I(0.0, 1.0);
    k.A = I * (g / wg) * (op / w * sm - om / w * sp);
    k.B = -I / wg * (op * sm + om * sp);
    k.D = -I * (g / wg) * (op / w * sm + om / w * sp);
    k.E = I / wg * (op * sm - om * sp);
    return k;
}

// 4x4 ladder map on (a, a^dagger, b, b^dagger), a = gw, b = bar, lab frame.
inline CMat beyond_rwa_mode_map(const CouplingContext& ctx) {
    const BeyondRwaCoefficients k = beyond_rwa_coefficients(ctx);
    const double cp = std::cos(k.Omega_plus * ctx.t);
    const double cm = std::cos(k.Omega_minus * ctx.t);
    const cplx self = 0.5 * (cp + cm + k.A + k.B);
    const cplx cross = 0.5 * (cp - cm + k.D + k.E);
    const cplx self_c = 0.5 * k.A;
    const cplx cross_c = 0.5 * k.D;
    CMat u = CMat::Zero(4, 4);
    u.row(0) << self, self_c, cross, cross_c;
    u.row(2) << cross, cross_c, self, self_c;
    // dagger rows: conjugate and swap the (op, op^dagger) columns
    for (int r : {0, 2}) {
        for (int m = 0; m < 2; ++m) {
            u(r + 1, 2 * m) = std::conj(u(r, 2 * m + 1));
            u(r + 1, 2 * m + 1) = std::conj(u(r, 2 * m));
        }
    }
    return u;
}

inline SymplecticMap beyond_rwa_symplectic(const CouplingContext& ctx) {
    const CMat m = detail::ladder_transform(2);
    const CMat s = m.adjoint() * beyond_rwa_mode_map(ctx) * m;
    return SymplecticMap(s.real());
}

// Bar marginal under uniform Markovian damping of both modes. Closed form only
// covers an initially empty detector.
inline GaussianState evolve_open(const GaussianState& gw, const GaussianState& bar, double gamma_t,
                                 const OpenChannelParams& ch, double t) {
    detail::require_single_mode(gw, "evolve_open");
    detail::require_single_mode(bar, "evolve_open");
    if (ch.kappa < 0.0 || ch.Nbar < 0.0) throw std::invalid_argument("evolve_open: kappa and Nbar must be >= 0");
    if (t < 0.0) throw std::invalid_argument("evolve_open: t must be >= 0");
    if (!bar.is_vacuum(1e-15)) throw std::invalid_argument("evolve_open: detector must start in the vacuum");
    const double kt = ch.kappa * t;
    const double decay = std::exp(-kt);
    const double fill = -std::expm1(-kt);
    const double c = std::cos(gamma_t);
    const double s = std::sin(gamma_t);
    RMat e = decay * (c * c * bar.excess() + s * s * gw.excess()) + fill * ch.Nbar * RMat::Identity(2, 2);
    RVec d = std::exp(-0.5 * kt) * s * gw.disp();
    return GaussianState::from_excess(e, d);
}

// RK4 integration of d sigma/dt = A sigma + sigma A^T + D for the damped
// beamsplitter, A = Omega H - kappa/2, D = kappa (Nbar + 1/2) I. Works on the
// excess, for which the drift reduces to kappa Nbar I. Returns the bar marginal
// with the same phase convention as evolve_closed.
inline GaussianState integrate_lyapunov(const GaussianState& gw, const GaussianState& bar, double gamma_t,
                                        const OpenChannelParams& ch, double t, int steps = 4000) {
    detail::require_single_mode(gw, "integrate_lyapunov");
    detail::require_single_mode(bar, "integrate_lyapunov");
    const GaussianState joint0 = tensor(gw, bar);
    if (t <= 0.0) return reduce(apply_symplectic(joint0, detail::bar_phase_fix()), {1});
    const double g = gamma_t / t;
    RMat H = RMat::Zero(4, 4);
    H.block<2, 2>(0, 2) = g * RMat::Identity(2, 2);
    H.block<2, 2>(2, 0) = g * RMat::Identity(2, 2);
    const RMat A = detail::omega(2) * H - 0.5 * ch.kappa * RMat::Identity(4, 4);
    const RMat drive = ch.kappa * ch.Nbar * RMat::Identity(4, 4);
    auto f = [&](const RMat& e) -> RMat { return A * e + e * A.transpose() + drive; };
    RMat e = joint0.excess();
    RVec d = joint0.disp();
    const double h = t / steps;
    for (int i = 0; i < steps; ++i) {
        const RMat k1 = f(e);
        const RMat k2 = f(e + 0.5 * h * k1);
        const RMat k3 = f(e + 0.5 * h * k2);
        const RMat k4 = f(e + h * k3);
        e += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const RVec q1 = A * d;
        const RVec q2 = A * (d + 0.5 * h * q1);
        const RVec q3 = A * (d + 0.5 * h * q2);
        const RVec q4 = A * (d + h * q3);
        d += (h / 6.0) * (q1 + 2.0 * q2 + 2.0 * q3 + q4);
    }
    e = 0.5 * (e + e.transpose()).eval();
    const GaussianState joint = GaussianState::from_excess(e, d);
    return reduce(apply_symplectic(joint, detail::bar_phase_fix()), {1});
}

// Extremal quadrature variances of the bar for a squeezed-vacuum input.
inline SqueezingTransfer squeezing_transfer_variance(double r, double gamma_t, double theta = 0.0) {
    if (r < 0.0) throw std::invalid_argument("squeezing_transfer_variance: r must be >= 0");
    const double s2 = std::pow(std::sin(gamma_t), 2);
    SqueezingTransfer out;
    out.min_var = 0.5 * (1.0 + s2 * std::expm1(-2.0 * r));
    out.max_var = 0.5 * (1.0 + s2 * std::expm1(2.0 * r));
    out.theta_min = 0.5 * theta;
    return out;
}

// Variance of x cos(th) + p sin(th) for a single-mode state.
inline double quadrature_variance(const GaussianState& s, double th) {
    const RMat cov = s.cov();
    const double c = std::cos(th);
    const double sn = std::sin(th);
    return c * c * cov(0, 0) + 2.0 * c * sn * cov(0, 1) + sn * sn * cov(1, 1);
}

}  // namespace gwstats
