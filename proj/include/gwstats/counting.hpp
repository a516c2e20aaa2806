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
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gwstats/dynamics.hpp"
#include "gwstats/gaussian_core.hpp"
#include "gwstats/loop_hafnian.hpp"

namespace gwstats {

struct CountingMatrices {
    Eigen::Matrix2cd SigmaQ;
    Eigen::Matrix2cd Amat;
    Eigen::Vector2cd Fvec;
    double prefactor = 1.0;
    double log_prefactor = 0.0;
};

struct ProbabilityTable {
    std::vector<double> probs;  // probs[n]
    int truncation_n = 0;
    double tail_bound = 0.0;
};

struct P012 {
    double P0 = 1.0;
    double P1 = 0.0;
    double P2 = 0.0;
};

struct DeltaPn {
    double p_exact = 0.0;
    double p_coherent = 0.0;
    double delta = 0.0;
    double ratio = 0.0;
    bool ratio_defined = false;
};

enum class SplitKind { thermal, squeezed };

inline constexpr double kNegativeProbabilityTolerance = 1e-12;

namespace detail {

inline double clamp_probability(double p, const char* what) {
    if (p < -kNegativeProbabilityTolerance) {
        throw std::runtime_error(std::string(what) + ": negative probability " + std::to_string(p));
    }
    return p < 0.0 ? 0.0 : p;
}

inline double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

}  // namespace detail

inline double poisson_pn(double mean, int n) {
    if (mean < 0.0) throw std::invalid_argument("poisson_pn: mean must be >= 0");
    if (n < 0) return 0.0;
    if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(-mean + n * std::log(mean) - detail::log_factorial(n));
}

// Detector moments after resonant exchange with the gw mode, detector initially
// thermal with occupation n_th (vacuum by default).
inline LadderMoments detector_moments(const GwSignalParams& p, double gamma_t, double n_th = 0.0) {
    if (n_th < 0.0) throw std::invalid_argument("detector_moments: n_th must be >= 0");
    const GaussianState bar0 = GaussianState::from_excess(n_th * RMat::Identity(2, 2), RVec::Zero(2));
    return to_ladder(bar_marginal(make_gw_state(p), bar0, gamma_t));
}

inline LadderMoments gw_moments(const GwSignalParams& p) { return to_ladder(make_gw_state(p)); }

inline CountingMatrices counting_matrices(const LadderMoments& bar) {
    if (bar.num_modes() != 1) throw std::invalid_argument("counting_matrices: single-mode state required");
    const Eigen::Matrix2cd Nn = bar.sigma_normal;
    const Eigen::Matrix2cd SQ = Nn + Eigen::Matrix2cd::Identity();
    // det SigmaQ = 1 + tr N + det N, kept in log1p form for near-vacuum states
    const cplx x = Nn.trace() + Nn.determinant();
    const cplx det = 1.0 + x;
    if (!(det.real() > 0.0) || std::abs(det.imag()) > 1e-10 * std::abs(det)) {
        throw std::domain_error("counting_matrices: singular or unphysical SigmaQ");
    }
    Eigen::Matrix2cd inv;
    inv << SQ(1, 1), -SQ(0, 1), -SQ(1, 0), SQ(0, 0);
    inv /= det;
    const Eigen::Vector2cd& a = bar.abar;
    CountingMatrices cm;
    cm.SigmaQ = SQ;
    Eigen::Matrix2cd X;
    X << 0, 1, 1, 0;
    cm.Amat = X * inv * Nn;
    cm.Fvec = (a.adjoint() * inv).transpose();
    const double quad = (a.adjoint() * inv * a)(0, 0).real();
    cm.log_prefactor = -0.5 * quad - 0.5 * std::log1p(x.real());
    cm.prefactor = std::exp(cm.log_prefactor);
    return cm;
}

// Counting matrix A^(n): n repetitions of the (a, a^dagger) index pair, every
// off-diagonal pair coupled through A, diagonal replaced by F.
inline CMat assemble_counting_matrix(const CountingMatrices& cm, int n) {
    CMat B(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) B(2 * k + i, 2 * l + j) = cm.Amat(i, j);
            }
        }
    }
    for (int k = 0; k < n; ++k) {
        B(2 * k, 2 * k) = cm.Fvec(0);
        B(2 * k + 1, 2 * k + 1) = cm.Fvec(1);
    }
    return B;
}

inline double prob_n_hafnian(const LadderMoments& bar, int n) {
    if (n < 0) throw std::invalid_argument("prob_n_hafnian: n must be >= 0");
    if (n > kLoopHafnianMaxK) throw std::out_of_range("prob_n_hafnian: n exceeds enumeration bound");
    const CountingMatrices cm = counting_matrices(bar);
    const cplx lh = loop_hafnian(assemble_counting_matrix(cm, n));
    const double p = std::exp(cm.log_prefactor - detail::log_factorial(n)) * lh.real();
    return detail::clamp_probability(p, "prob_n_hafnian");
}

// Mixed derivatives of the generating function exp(A11 x^2/2 + A22 y^2/2 + A12 x y
// + F1 x + F2 y) through the normalised table g(i,j) = d^i_x d^j_y G(0) / sqrt(i! j!),
//   sqrt(i+1) g(i+1,j) = A11 sqrt(i) g(i-1,j) + A12 sqrt(j) g(i,j-1) + F1 g(i,j),
// so that P_n = P_0 g(n,n).
inline std::vector<double> probabilities_generating(const LadderMoments& bar, int n_max) {
    if (n_max < 0) throw std::invalid_argument("probabilities_generating: n_max must be >= 0");
    const CountingMatrices cm = counting_matrices(bar);
    const cplx A11 = cm.Amat(0, 0), A22 = cm.Amat(1, 1), A12 = cm.Amat(0, 1);
    const cplx F1 = cm.Fvec(0), F2 = cm.Fvec(1);
    const int K = n_max + 1;
    CMat g = CMat::Zero(K, K);
    g(0, 0) = 1.0;
    for (int j = 0; j + 1 < K; ++j) {
        const cplx prev = j > 0 ? g(0, j - 1) : cplx(0.0);
        g(0, j + 1) = (A22 * std::sqrt(double(j)) * prev + F2 * g(0, j)) / std::sqrt(double(j + 1));
    }
    for (int i = 0; i + 1 < K; ++i) {
        for (int j = 0; j < K; ++j) {
            const cplx up = i > 0 ? g(i - 1, j) : cplx(0.0);
            const cplx left = j > 0 ? g(i, j - 1) : cplx(0.0);
            g(i + 1, j) = (A11 * std::sqrt(double(i)) * up + A12 * std::sqrt(double(j)) * left + F1 * g(i, j)) /
                          std::sqrt(double(i + 1));
        }
    }
    std::vector<double> out(K);
    for (int n = 0; n < K; ++n) {
        out[n] = detail::clamp_probability(cm.prefactor * g(n, n).real(), "probabilities_generating");
    }
    return out;
}

inline double prob_n_generating(const LadderMoments& bar, int n) {
    if (n < 0) throw std::invalid_argument("prob_n_generating: n must be >= 0");
    return probabilities_generating(bar, n)[n];
}

inline ProbabilityTable probability_table(const LadderMoments& bar, int n_max) {
    ProbabilityTable t;
    t.probs = probabilities_generating(bar, n_max);
    t.truncation_n = n_max;
    double sum = 0.0;
    for (double p : t.probs) sum += p;
    const double tail = 1.0 - sum;
    t.tail_bound = (tail < 0.0 && tail > -1e-8) ? 0.0 : tail;
    return t;
}

// Closed-form P0, P1, P2 for the detector after exchange with the gw mode.
// Only the relative phase theta - 2 arg(alpha) enters.
inline P012 closed_form_p012(const GwSignalParams& p, double gamma_t) {
    validate(p);
    const double s = std::sin(gamma_t);
    const double s2 = s * s;
    const double a = std::abs(p.alpha);
    const double th = p.theta - 2.0 * std::arg(p.alpha);
    const double N = p.nbar + 0.5;
    const double sh = std::sinh(2.0 * p.r);
    const double Cg = p.n_q();
    const double d = 1.0 + s2 * Cg;
    const double lo = 1.0 + s2 * (N * std::exp(-2.0 * p.r) - 0.5);
    const double hi = d + s2 * N * sh;
    const double det = lo * hi;
    const cplx o = -s2 * N * sh * std::polar(1.0, th);
    const double expo = -s2 * a * a * (d + s2 * N * sh * std::cos(th)) / det;
    P012 out;
    out.P0 = std::exp(expo) / std::sqrt(det);
    const cplx A11 = std::conj(o) / det;
    const cplx A22 = o / det;
    const double A12 = (d * s2 * Cg - std::norm(o)) / det;
    const cplx F1 = s * a * (d - std::conj(o)) / det;
    const cplx F2 = s * a * (d - o) / det;
    const double f12 = (F1 * F2).real();
    out.P1 = out.P0 * (A12 + f12);
    out.P2 = 0.5 * out.P0 * ((A11 + F1 * F1) * (A22 + F2 * F2) + 4.0 * f12 * A12 + 2.0 * A12 * A12).real();
    return out;
}

// Compact closed forms of P0 and P1, valid for theta = 0 and real alpha.
inline P012 compact_p01(const GwSignalParams& p, double gamma_t) {
    const double s2 = std::pow(std::sin(gamma_t), 2);
    const double c2 = std::pow(std::cos(gamma_t), 2);
    const double c2g = std::cos(2.0 * gamma_t);
    const double e2 = std::exp(2.0 * p.r);
    const double e4 = std::exp(4.0 * p.r);
    const double a2 = std::norm(p.alpha);
    const double m = 2.0 * p.nbar + 1.0;
    const double den = 2.0 * m * s2 + e2 * (c2g + 3.0);
    P012 out;
    out.P0 = 2.0 * std::exp(-4.0 * a2 * e2 * s2 / den) /
             std::sqrt(m * std::cosh(2.0 * p.r) * s2 * (c2g + 3.0) + m * m * s2 * s2 + (c2 + 1.0) * (c2 + 1.0));
    out.P1 = out.P0 * (1.0 - 2.0 / (2.0 * m * e2 * s2 + c2g + 3.0) -
                       (4.0 * m * e2 * s2 + 2.0 * e4 * ((4.0 * a2 + 1.0) * c2g + 3.0 - 4.0 * a2)) / (den * den));
    out.P2 = std::numeric_limits<double>::quiet_NaN();
    return out;
}

// Coefficient form of P0..P2 with (cos^2 + 2) denominators. Does not match the
// hafnian; kept for the adjudication report only. P0 is the compact form.
inline P012 coefficient_form_p012(const GwSignalParams& p, double gamma_t) {
    const double s = std::sin(gamma_t);
    const double s2 = s * s;
    const double c2 = std::cos(gamma_t) * std::cos(gamma_t);
    const double ch = std::cosh(2.0 * p.r);
    const double sh = std::sinh(2.0 * p.r);
    const double N = p.nbar + 0.5;
    const double nb = p.nbar;
    const double a = std::abs(p.alpha);
    const cplx eth = std::polar(1.0, p.theta);
    const double den_a = N * ch * s2 * (c2 + 2.0) + N * N * s2 * s2 + 0.25 * (c2 + 2.0) * (c2 + 2.0);
    const double a1 = 1.0 - (N * ch * s2 + 0.5 * (c2 + 2.0)) / den_a;
    const double a2 = -N * sh * s2 / den_a;
    const double den_f = -8.0 * (nb * nb + nb - 1.0) * std::cos(2.0 * gamma_t) +
                         4.0 * (2.0 * nb + 1.0) * ch * s2 * (std::cos(2.0 * gamma_t) + 5.0) +
                         (2.0 * nb * (nb + 1.0) + 1.0) * std::cos(4.0 * gamma_t) + 6.0 * nb * (nb + 1.0) + 27.0;
    const cplx f1 = 8.0 * a * std::conj(eth) * s *
                    ((2.0 * nb + 1.0) * s2 * (sh + eth * ch) + eth * (c2 + 2.0)) / den_f;
    const cplx f2 = 8.0 * a * s * ((2.0 * nb + 1.0) * s2 * (ch + eth * sh) + c2 + 2.0) / den_f;
    P012 out;
    out.P0 = compact_p01(p, gamma_t).P0;
    out.P1 = out.P0 * (a1 + f1 * f2).real();
    out.P2 = 0.5 * out.P0 * ((a2 + f2 * f2) * (a2 + f1 * f1) + 4.0 * f1 * f2 * a1 + 2.0 * a1 * a1).real();
    return out;
}

// Delta P_n = P_{n,c} - P_n against a coherent input of the same total n_grav.
inline DeltaPn delta_pn(const GwSignalParams& p, double gamma_t, int n) {
    DeltaPn out;
    const double mu = p.mean_occupation() * std::pow(std::sin(gamma_t), 2);
    out.p_coherent = poisson_pn(mu, n);
    out.p_exact = prob_n_generating(detector_moments(p, gamma_t), n);
    out.delta = out.p_coherent - out.p_exact;
    out.ratio_defined = out.p_coherent > 0.0;
    out.ratio = out.ratio_defined ? out.delta / out.p_coherent : 0.0;
    return out;
}

// Lowest-order expansion of Delta P_1 / P_{1,c} in (gamma t)^2 at fixed n_grav (gamma t)^2.
inline double delta_p1_ratio_expansion(double n_q, double n_grav, double gamma_t) {
    const double y = n_q * gamma_t * gamma_t;
    const double frac = n_grav > 0.0 ? n_q / n_grav : 0.0;
    return 1.0 - (2.0 * (1.0 - frac) * y + 1.0) / std::pow(2.0 * y + 1.0, 1.5) * std::exp(y);
}

// Realise n_grav (gamma t)^2 = x_total with a fraction fraction_q of non-coherent
// quanta, either as thermal (r = 0) or squeezed (nbar = 0) noise. theta = 0, alpha real.
inline GwSignalParams scaled_params(double x_total, double fraction_q, SplitKind split, double gamma_t) {
    if (!(fraction_q >= 0.0 && fraction_q <= 1.0)) throw std::invalid_argument("scaled_params: fraction_q must lie in [0,1]");
    if (!(x_total >= 0.0)) throw std::invalid_argument("scaled_params: x_total must be >= 0");
    if (!(gamma_t > 0.0)) throw std::invalid_argument("scaled_params: gamma_t must be > 0");
    const double n_grav = x_total / (gamma_t * gamma_t);
    if (!std::isfinite(n_grav)) throw std::invalid_argument("scaled_params: n_grav overflows");
    const double n_q = fraction_q * n_grav;
    GwSignalParams p;
    p.alpha = std::sqrt((1.0 - fraction_q) * n_grav);
    if (split == SplitKind::thermal) {
        p.nbar = n_q;
    } else {
        p.r = std::asinh(std::sqrt(n_q));
    }
    return p;
}

}  // namespace gwstats
