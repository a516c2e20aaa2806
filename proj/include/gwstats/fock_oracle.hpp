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

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gwstats/gaussian_core.hpp"

// Brute-force Fock-space reference. Nothing in here uses the Gaussian formalism:
// states are built by exponentiating truncated generators and the beamsplitter
// acts block by block on fixed total excitation number.
namespace gwstats::fock {

inline constexpr int kDefaultCap = 400;
inline constexpr double kDefaultTailTol = 1e-8;

struct TruncatedState {
    int dim = 1;        // per-mode cutoff
    int modes = 1;      // 1: rho is dim x dim, 2: rho is dim^2 x dim^2 (index n_gw * dim + n_bar)
    CMat rho;
    double tail_mass = 0.0;
};

struct OracleMoments {
    double mean_n = 0.0;
    double mean_n2 = 0.0;
    double g2 = 0.0;
    bool defined = false;
};

namespace detail {

// J_0..J_kmax at x >= 0 by Miller's downward recurrence, normalised with
// J_0 + 2 sum J_2k = 1.
inline std::vector<double> bessel_j_sequence(double x, int kmax) {
    std::vector<double> out(kmax + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const int start = std::max(kmax, static_cast<int>(std::ceil(x))) + 40 + static_cast<int>(std::sqrt(40.0 * (x + kmax)));
    std::vector<double> j(start + 2, 0.0);
    j[start + 1] = 0.0;
    j[start] = 1e-280;
    for (int k = start; k >= 1; --k) {
        j[k - 1] = (2.0 * k / x) * j[k] - j[k + 1];
        if (std::abs(j[k - 1]) > 1e250) {
            for (int q = k - 1; q <= start; ++q) j[q] *= 1e-250;
        }
    }
    double norm = j[0];
    for (int k = 2; k <= start; k += 2) norm += 2.0 * j[k];
    for (int k = 0; k <= kmax; ++k) out[k] = j[k] / norm;
    return out;
}

// exp(-i tau H) X for Hermitian H with spectrum inside [-bound, bound], applied
// to every column of X, by Chebyshev expansion with Bessel coefficients.
inline CMat expmi_apply(const std::function<void(const CMat&, CMat&)>& H, double bound, double tau, const CMat& X) {
    if (bound <= 0.0 || tau == 0.0) return X;
    const double z = std::abs(tau) * bound;
    const int K = static_cast<int>(z + 12.0 * std::cbrt(z) + 40.0);
    const std::vector<double> J = bessel_j_sequence(z, K);
    const double sgn = tau > 0.0 ? 1.0 : -1.0;
    CMat t0 = X;
    CMat t1(X.rows(), X.cols());
    CMat t2(X.rows(), X.cols());
    H(t0, t1);
    t1 /= bound;
    CMat acc = J[0] * t0;
    cplx ph(0.0, -sgn);  // (-i)^k
    acc += (2.0 * J[1]) * ph * t1;
    for (int k = 2; k <= K; ++k) {
        H(t1, t2);
        t2 = (2.0 / bound) * t2 - t0;
        ph *= cplx(0.0, -sgn);
        acc += (2.0 * J[k]) * ph * t2;
        t0.swap(t1);
        t1.swap(t2);
        if (k > z && std::abs(J[k]) < 1e-22) break;
    }
    return acc;
}

inline CVec expmi_apply(const std::function<void(const CMat&, CMat&)>& H, double bound, double tau, const CVec& v) {
    return expmi_apply(H, bound, tau, CMat(v)).col(0);
}

// plain complex product, skipping the inf/nan recovery path of operator*
inline cplx cmul(const cplx& a, const cplx& b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// Same expansion for a single-band generator
//   (H x)[n + s] += up[n] x[n],  (H x)[n] += dn[n] x[n + s],
// with the recurrence and accumulation fused into one pass per column.
inline CMat expmi_banded(int s, const std::vector<cplx>& up, const std::vector<cplx>& dn, double bound, double tau,
                         const CMat& X) {
    if (bound <= 0.0 || tau == 0.0) return X;
    const int P = static_cast<int>(X.rows());
    const int B = P - s;
    const double z = std::abs(tau) * bound;
    const int K = static_cast<int>(z + 12.0 * std::cbrt(z) + 40.0);
    const std::vector<double> J = bessel_j_sequence(z, K);
    const double sgn = tau > 0.0 ? 1.0 : -1.0;
    CMat acc(P, X.cols());
    std::vector<cplx> t0(P), t1(P), t2(P);
    for (int c = 0; c < X.cols(); ++c) {
        for (int n = 0; n < P; ++n) t0[n] = X(n, c);
        auto apply = [&](const std::vector<cplx>& x, std::vector<cplx>& y, double scale) {
            for (int n = 0; n < P; ++n) y[n] = 0.0;
            for (int n = 0; n < B; ++n) {
                y[n + s] += cmul(up[n], x[n]);
                y[n] += cmul(dn[n], x[n + s]);
            }
            for (int n = 0; n < P; ++n) y[n] *= scale;
        };
        apply(t0, t1, 1.0 / bound);
        cplx ph(0.0, -sgn);
        const cplx c1 = (2.0 * J[1]) * ph;
        for (int n = 0; n < P; ++n) acc(n, c) = J[0] * t0[n] + cmul(c1, t1[n]);
        const double two_b = 2.0 / bound;
        for (int k = 2; k <= K; ++k) {
            ph = cmul(ph, cplx(0.0, -sgn));
            const cplx ck = (2.0 * J[k]) * ph;
            for (int n = 0; n < P; ++n) t2[n] = -t0[n];
            for (int n = 0; n < B; ++n) {
                t2[n + s] += two_b * cmul(up[n], t1[n]);
                t2[n] += two_b * cmul(dn[n], t1[n + s]);
            }
            for (int n = 0; n < P; ++n) acc(n, c) += cmul(ck, t2[n]);
            t0.swap(t1);
            t1.swap(t2);
            if (k > z && std::abs(J[k]) < 1e-22) break;
        }
    }
    return acc;
}

// Generators act on rows (Fock index); columns are independent vectors.
inline CMat apply_displacement(const cplx& alpha, const CMat& X) {
    const int P = static_cast<int>(X.rows());
    if (alpha == 0.0 || P < 2) return X;
    // H = i (alpha a^dagger - alpha* a)
    std::vector<cplx> up(P - 1), dn(P - 1);
    for (int n = 0; n + 1 < P; ++n) {
        up[n] = cplx(0.0, 1.0) * alpha * std::sqrt(double(n + 1));
        dn[n] = -cplx(0.0, 1.0) * std::conj(alpha) * std::sqrt(double(n + 1));
    }
    return expmi_banded(1, up, dn, 2.0 * std::abs(alpha) * std::sqrt(double(P)), 1.0, X);
}

inline CMat apply_squeezing(const cplx& xi, const CMat& X) {
    const int P = static_cast<int>(X.rows());
    if (xi == 0.0 || P < 3) return X;
    // H = (i/2)(xi* a^2 - xi a^dagger^2)
    std::vector<cplx> up(P - 2), dn(P - 2);
    for (int n = 0; n + 2 < P; ++n) {
        const double sq = std::sqrt(double(n + 1) * (n + 2));
        up[n] = -cplx(0.0, 0.5) * xi * sq;
        dn[n] = cplx(0.0, 0.5) * std::conj(xi) * sq;
    }
    return expmi_banded(2, up, dn, std::abs(xi) * (P + 1.0), 1.0, X);
}

inline double thermal_weight(double nbar, int n) {
    if (nbar == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(n * std::log(nbar / (nbar + 1.0))) / (nbar + 1.0);
}

// columns psi_n = D S |n> weighted by sqrt(p_n) in a padded space of size P
inline CMat gw_factor(const GwSignalParams& p, int P) {
    std::vector<int> ns;
    const double p0 = thermal_weight(p.nbar, 0);
    for (int n = 0; n < P; ++n) {
        const double w = thermal_weight(p.nbar, n);
        if (n > 0 && w < 1e-17 * p0) break;
        ns.push_back(n);
    }
    CMat Psi = CMat::Zero(P, static_cast<int>(ns.size()));
    for (std::size_t c = 0; c < ns.size(); ++c) Psi(ns[c], static_cast<int>(c)) = std::sqrt(thermal_weight(p.nbar, ns[c]));
    return apply_displacement(p.alpha, apply_squeezing(std::polar(p.r, p.theta), Psi));
}

// tridiagonal beamsplitter generator on the block of total number T, basis |T-k, k>
// (k = detector quanta): off-diagonal sqrt((T-k)(k+1)), spectrum in [-T, T]
inline CVec block_column(int T, int j, double gamma_t) {
    CVec e = CVec::Zero(T + 1);
    e(j) = 1.0;
    if (T == 0) return e;
    std::vector<cplx> h(T);
    for (int k = 0; k < T; ++k) h[k] = std::sqrt(double(T - k) * (k + 1));
    return expmi_banded(1, h, h, static_cast<double>(T), gamma_t, CMat(e)).col(0);
}

inline int estimate_cutoff(const GwSignalParams& p) {
    const double vmax = (p.nbar + 0.5) * std::exp(2.0 * p.r);
    const double reach = std::sqrt(2.0) * std::abs(p.alpha) + 6.0 * std::sqrt(vmax);
    return static_cast<int>(0.5 * reach * reach) + 20;
}

}  // namespace detail

// D(alpha) S(xi) rho_th S^dagger D^dagger on a fixed cutoff `dim`. The state is
// built in a padded space and cut; the discarded population is tail_mass and the
// kept block is left unnormalised so low-n entries stay exact.
inline TruncatedState build_gw_density(const GwSignalParams& p, int dim, double tail_tol = kDefaultTailTol) {
    validate(p);
    if (dim < 1) throw std::invalid_argument("build_gw_density: dim must be >= 1");
    const int P = std::max(dim + 60, detail::estimate_cutoff(p) + 60);
    const CMat Psi = detail::gw_factor(p, P);
    const CMat top = Psi.topRows(dim);
    TruncatedState s;
    s.dim = dim;
    s.rho = top * top.adjoint();
    const double kept = s.rho.trace().real();
    s.tail_mass = std::max(0.0, 1.0 - kept);
    if (s.tail_mass > tail_tol) {
        throw std::runtime_error("build_gw_density: tail mass " + std::to_string(s.tail_mass) + " exceeds tolerance");
    }
    return s;
}

// Smallest cutoff whose discarded weight sum_{n >= D} (n+1)^weight_power p_n is
// below tol, capped at `cap`.
inline TruncatedState build_gw_density_auto(const GwSignalParams& p, double tol = kDefaultTailTol, int cap = kDefaultCap,
                                            int weight_power = 0) {
    validate(p);
    const int guess = detail::estimate_cutoff(p);
    // the estimate overshoots the needed cutoff by well under 2x
    if (guess > 2 * cap) {
        throw std::runtime_error("build_gw_density_auto: estimated cutoff " + std::to_string(guess) + " exceeds cap " +
                                 std::to_string(cap));
    }
    int P = guess + 60;
    for (int attempt = 0; attempt < 4; ++attempt) {
        const CMat Psi = detail::gw_factor(p, P);
        std::vector<double> pop(P);
        for (int n = 0; n < P; ++n) pop[n] = Psi.row(n).squaredNorm();
        // the padding must be empty, otherwise the truncated generators leaked
        double edge = 0.0;
        for (int n = P - 30; n < P; ++n) edge += pop[n];
        if (edge > 1e-15) {
            P *= 2;
            continue;
        }
        std::vector<double> tail(P + 1, 0.0);
        for (int n = P - 1; n >= 0; --n) tail[n] = tail[n + 1] + std::pow(n + 1.0, weight_power) * pop[n];
        int D = 1;
        while (D < P && tail[D] >= tol) ++D;
        if (D > cap) {
            throw std::runtime_error("build_gw_density_auto: cutoff " + std::to_string(D) + " exceeds cap " +
                                     std::to_string(cap));
        }
        TruncatedState s;
        s.dim = D;
        const CMat top = Psi.topRows(D);
        s.rho = top * top.adjoint();
        const double kept = s.rho.trace().real();
        s.tail_mass = std::max(0.0, 1.0 - kept);
        return s;
    }
    throw std::runtime_error("build_gw_density_auto: padded space did not converge");
}

inline TruncatedState thermal_density(double n_th, int dim) {
    TruncatedState s;
    s.dim = dim;
    s.rho = CMat::Zero(dim, dim);
    double kept = 0.0;
    for (int n = 0; n < dim; ++n) {
        s.rho(n, n) = detail::thermal_weight(n_th, n);
        kept += s.rho(n, n).real();
    }
    s.tail_mass = std::max(0.0, 1.0 - kept);
    return s;
}

inline int thermal_cutoff(double n_th, double tol = 1e-14) {
    if (n_th == 0.0) return 1;
    const double q = n_th / (n_th + 1.0);
    return static_cast<int>(std::ceil(std::log(tol) / std::log(q))) + 1;
}

// exp(-i gamma_t (a b^dagger + a^dagger b)) on the two-mode truncated space,
// index n_gw * dim + n_bar, exponentiated per total-number block through a
// Hermitian eigendecomposition. Blocks with total number < dim are exact.
inline CMat beamsplitter_unitary(double gamma_t, int dim) {
    if (dim < 1) throw std::invalid_argument("beamsplitter_unitary: dim must be >= 1");
    const int D2 = dim * dim;
    CMat U = CMat::Zero(D2, D2);
    for (int T = 0; T <= 2 * (dim - 1); ++T) {
        std::vector<int> ks;
        for (int k = 0; k <= T; ++k) {
            if (k < dim && T - k < dim) ks.push_back(k);
        }
        const int m = static_cast<int>(ks.size());
        RMat H = RMat::Zero(m, m);
        for (int i = 0; i + 1 < m; ++i) {
            const int k = ks[i];
            H(i + 1, i) = H(i, i + 1) = std::sqrt(double(T - k) * (k + 1));
        }
        Eigen::SelfAdjointEigenSolver<RMat> es(H);
        CVec ph(m);
        for (int i = 0; i < m; ++i) ph(i) = std::polar(1.0, -gamma_t * es.eigenvalues()(i));
        const CMat V = es.eigenvectors().cast<cplx>();
        const CMat blk = V * ph.asDiagonal() * V.adjoint();
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                const int ri = (T - ks[i]) * dim + ks[i];
                const int cj = (T - ks[j]) * dim + ks[j];
                U(ri, cj) = blk(i, j);
            }
        }
    }
    return U;
}

inline TruncatedState tensor(const TruncatedState& gw, const TruncatedState& bar) {
    if (gw.dim != bar.dim || gw.modes != 1 || bar.modes != 1) {
        throw std::invalid_argument("fock::tensor: expected single-mode states with equal cutoff");
    }
    TruncatedState s;
    s.dim = gw.dim;
    s.modes = 2;
    const int D = gw.dim;
    s.rho = CMat(D * D, D * D);
    for (int i = 0; i < D; ++i) {
        for (int j = 0; j < D; ++j) s.rho.block(i * D, j * D, D, D) = gw.rho(i, j) * bar.rho;
    }
    s.tail_mass = gw.tail_mass + bar.tail_mass;
    return s;
}

// Full two-mode evolution through the dense unitary; small cutoffs only.
inline TruncatedState evolve_two_mode(const TruncatedState& joint, double gamma_t) {
    if (joint.modes != 2) throw std::invalid_argument("evolve_two_mode: two-mode state required");
    const CMat U = beamsplitter_unitary(gamma_t, joint.dim);
    TruncatedState out = joint;
    out.rho = U * joint.rho * U.adjoint();
    return out;
}

inline TruncatedState partial_trace(const TruncatedState& joint, int keep) {
    if (joint.modes != 2) throw std::invalid_argument("partial_trace: two-mode state required");
    const int D = joint.dim;
    TruncatedState s;
    s.dim = D;
    s.rho = CMat::Zero(D, D);
    s.tail_mass = joint.tail_mass;
    for (int i = 0; i < D; ++i) {
        for (int j = 0; j < D; ++j) {
            cplx acc = 0.0;
            for (int q = 0; q < D; ++q) {
                acc += keep == 1 ? joint.rho(q * D + i, q * D + j) : joint.rho(i * D + q, j * D + q);
            }
            s.rho(i, j) = acc;
        }
    }
    return s;
}

// Detector marginal after the beamsplitter for a gw state and a diagonal
// (thermal) detector state with occupation n_th. Only the block columns that the
// input populates are propagated, so the cost is O(D^3) per detector level.
inline TruncatedState evolve_bar_marginal(const TruncatedState& gw, double gamma_t, double n_th = 0.0) {
    if (gw.modes != 1) throw std::invalid_argument("evolve_bar_marginal: single-mode gw state required");
    const int Dg = gw.dim;
    const int Db = thermal_cutoff(n_th);
    const int Dout = Dg + Db - 1;
    TruncatedState out;
    out.dim = Dout;
    out.rho = CMat::Zero(Dout, Dout);
    double bar_kept = 0.0;
    for (int j = 0; j < Db; ++j) bar_kept += detail::thermal_weight(n_th, j);
    for (int j = 0; j < Db; ++j) {
        const double pj = detail::thermal_weight(n_th, j) / bar_kept;
        if (pj == 0.0) continue;
        // u[n] = column j of block T = n + j, for gw input n
        std::vector<CVec> u(Dg);
        for (int n = 0; n < Dg; ++n) u[n] = detail::block_column(n + j, j, gamma_t);
        for (int k = 0; k < Dout; ++k) {
            for (int l = 0; l < Dout; ++l) {
                cplx acc = 0.0;
                // gw output q: inputs n = q + k - j, m = q + l - j
                const int qmin = std::max({0, j - k, j - l});
                for (int q = qmin;; ++q) {
                    const int n = q + k - j;
                    const int m = q + l - j;
                    if (n >= Dg || m >= Dg) break;
                    if (k > n + j || l > m + j) continue;
                    acc += gw.rho(n, m) * u[n](k) * std::conj(u[m](l));
                }
                out.rho(k, l) += pj * acc;
            }
        }
    }
    out.tail_mass = gw.tail_mass;
    return out;
}

// tr(rho a^dagger^k a^l)
inline cplx normal_moment(const TruncatedState& s, int k, int l) {
    if (s.modes != 1) throw std::invalid_argument("fock::normal_moment: single-mode state required");
    const int D = s.dim;
    cplx acc = 0.0;
    // <m| a^dagger^k a^l |n> nonzero for m - k = n - l = q
    for (int q = 0; q < D; ++q) {
        const int n = q + l;
        const int m = q + k;
        if (n >= D || m >= D) break;
        double amp = 1.0;
        for (int i = 1; i <= l; ++i) amp *= std::sqrt(double(q + i));
        for (int i = 1; i <= k; ++i) amp *= std::sqrt(double(q + i));
        acc += amp * s.rho(n, m);
    }
    return acc;
}

inline double population(const TruncatedState& s, int n) {
    if (n < 0 || n >= s.dim) return 0.0;
    return s.rho(n, n).real();
}

inline double purity(const TruncatedState& s) { return (s.rho * s.rho).trace().real(); }

inline OracleMoments moments_and_g2(const TruncatedState& s) {
    OracleMoments out;
    out.mean_n = normal_moment(s, 1, 1).real();
    const double a22 = normal_moment(s, 2, 2).real();
    out.mean_n2 = a22 + out.mean_n;
    out.defined = out.mean_n > 0.0;
    out.g2 = out.defined ? a22 / (out.mean_n * out.mean_n) : 0.0;
    return out;
}

inline TruncatedState detector_state(const GwSignalParams& p, double gamma_t, int dim = 0, double n_th = 0.0,
                                     double tol = kDefaultTailTol, int weight_power = 0) {
    const TruncatedState gw = dim > 0 ? build_gw_density(p, dim, tol) : build_gw_density_auto(p, tol, kDefaultCap, weight_power);
    return evolve_bar_marginal(gw, gamma_t, n_th);
}

inline double oracle_pn(const GwSignalParams& p, double gamma_t, int n, int dim = 0) {
    return population(detector_state(p, gamma_t, dim), n);
}

inline OracleMoments oracle_moments_and_g2(const GwSignalParams& p, double gamma_t, int dim = 0) {
    const OracleMoments m = moments_and_g2(detector_state(p, gamma_t, dim, 0.0, 1e-13, 4));
    if (!m.defined) throw std::domain_error("oracle_moments_and_g2: <n> = 0");
    return m;
}

// Variance of (e^{-i th} a + e^{i th} a^dagger)/sqrt2.
inline double quadrature_variance(const TruncatedState& s, double th) {
    const cplx a1 = normal_moment(s, 0, 1);
    const cplx a2 = normal_moment(s, 0, 2);
    const double n = normal_moment(s, 1, 1).real();
    const cplx e = std::polar(1.0, -th);
    const double mean = std::sqrt(2.0) * (e * a1).real();
    const double second = 0.5 * (2.0 * (e * e * a2).real() + 2.0 * n + 1.0);
    return second - mean * mean;
}

// Minimum quadrature variance over th in [0, pi): coarse grid, then golden section.
inline std::pair<double, double> minimize_quadrature_variance(const TruncatedState& s) {
    const int grid = 64;
    int best = 0;
    double bv = quadrature_variance(s, 0.0);
    for (int i = 1; i < grid; ++i) {
        const double v = quadrature_variance(s, kPi * i / grid);
        if (v < bv) {
            bv = v;
            best = i;
        }
    }
    double lo = kPi * (best - 1) / grid;
    double hi = kPi * (best + 1) / grid;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = quadrature_variance(s, x1);
    double f2 = quadrature_variance(s, x2);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = quadrature_variance(s, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = quadrature_variance(s, x2);
        }
    }
    const double th = 0.5 * (lo + hi);
    return {th, quadrature_variance(s, th)};
}

}  // namespace gwstats::fock
