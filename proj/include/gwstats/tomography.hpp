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
#include <random>
#include <stdexcept>
#include <vector>

#include "gwstats/correlations.hpp"
#include "gwstats/gaussian_core.hpp"

namespace gwstats {

// phi is measured in the gw frame, i.e. the detector drive phase plus pi/2.
struct LocalOscillator {
    double beta_mag = 0.0;
    double phi = 0.0;
    double epsilon = 0.0;      // (delta beta)^2 / |beta|^2
    double kappa_fluct = 0.0;  // 1/s
    bool epsilon_warning() const { return epsilon >= 0.1; }
};

struct TomographyTerms {
    double dG0 = 0.0;
    double dG1 = 0.0;
    double dG2 = 0.0;
    double dG3 = 0.0;
    double dG4_noise = 0.0;
    double total = 0.0;
};

struct SnrResult {
    double snr = 0.0;
    bool infinite = false;
};

struct BetaSeparation {
    std::vector<double> coefficients;  // c_k multiplying |beta|^k, k = 0..4
    double residual = 0.0;
};

struct PhaseSample {
    double phi = 0.0;
    double dG1 = 0.0;
    double dG2 = 0.0;
};

struct ReconstructionResult {
    double alpha_mag = 0.0;
    double alpha_phase = 0.0;
    double r = 0.0;
    double theta = 0.0;
    double nbar = 0.0;
    double residual = 0.0;
    int phase_grid_size = 0;
    bool theta_identifiable = true;
    bool alpha_identifiable = true;
};

inline double quadrature_variance_normal(const GwSignalParams& p, double phi) {
    const double sr = std::sinh(p.r);
    const double x = std::cos(p.theta - 2.0 * phi);
    const double sh = std::sinh(2.0 * p.r);
    return p.nbar * (std::cosh(2.0 * p.r) - sh * x) + sr * sr - 0.5 * sh * x;
}

// <:dh_phi dn:> = sqrt2 Re[e^{-i phi} (alpha C + alpha* M)], C = <da^dagger da>, M = <da da>
inline double quadrature_number_correlation(const GwSignalParams& p, double phi) {
    const double C = p.n_q();
    const cplx M = -(p.nbar + 0.5) * std::sinh(2.0 * p.r) * std::polar(1.0, p.theta);
    const cplx w = p.alpha * C + std::conj(p.alpha) * M;
    return std::sqrt(2.0) * (std::polar(1.0, -phi) * w).real();
}

// Variant with e^{-i(phi + theta)} in the squeezing part. Differs from the exact term.
inline double quadrature_number_correlation_uncorrected(const GwSignalParams& p, double phi) {
    const double N = p.nbar + 0.5;
    const cplx a = p.alpha;
    const double t1 = (a * std::polar(1.0, -phi) + std::conj(a) * std::polar(1.0, phi)).real() / std::sqrt(2.0) *
                      (N * std::cosh(2.0 * p.r) - 0.5);
    const double t2 = (a * std::polar(1.0, -(phi + p.theta)) + std::conj(a) * std::polar(1.0, phi + p.theta)).real() /
                      std::sqrt(2.0) * std::sinh(2.0 * p.r) * N;
    return t1 - t2;
}

inline double classical_lo_noise(const LocalOscillator& lo, double gamma_t) {
    if (lo.epsilon < 0.0) throw std::invalid_argument("classical_lo_noise: epsilon must be >= 0");
    const double c2 = std::pow(std::cos(gamma_t), 2);
    const double b2 = lo.beta_mag * lo.beta_mag;
    return 4.0 * c2 * c2 * b2 * (lo.epsilon * b2);
}

// Stationary decomposition of G2(0) - G2(inf); dG3 vanishes under stationarity.
inline TomographyTerms delta_g2_terms(const GwSignalParams& p, const LocalOscillator& lo, double gamma_t,
                                      bool stationary = true) {
    if (!stationary) throw std::invalid_argument("delta_g2_terms: only the stationary decomposition is modelled");
    const double s = std::sin(gamma_t);
    const double c = std::cos(gamma_t);
    const double b = lo.beta_mag;
    TomographyTerms t;
    t.dG0 = std::pow(s, 4) * normal_number_variance(gw_moments(p));
    t.dG1 = s * s * s * c * b * quadrature_number_correlation(p, lo.phi);
    t.dG2 = s * s * c * c * b * b * quadrature_variance_normal(p, lo.phi);
    t.dG3 = 0.0;
    t.dG4_noise = classical_lo_noise(lo, gamma_t);
    t.total = t.dG0 + t.dG1 + t.dG2 + t.dG3 + t.dG4_noise;
    return t;
}

// Large-squeezing forms for nbar = 0, theta = 0.
inline double dG1_large_squeezing_limit(const GwSignalParams& p, const LocalOscillator& lo, double gamma_t) {
    return 0.5 * lo.beta_mag * std::pow(std::sin(gamma_t), 3) * std::cos(lo.phi) * std::abs(p.alpha) *
           std::exp(2.0 * p.r);
}

inline double dG2_large_squeezing_limit(const GwSignalParams& p, const LocalOscillator& lo, double gamma_t) {
    return 0.5 * lo.beta_mag * lo.beta_mag * std::pow(std::sin(gamma_t), 2) * std::pow(std::sin(lo.phi), 2) *
           std::exp(2.0 * p.r);
}

inline SnrResult snr_quadrature(const GwSignalParams& p, const LocalOscillator& lo, double gamma_t) {
    if (!(lo.beta_mag > 0.0)) throw std::invalid_argument("snr_quadrature: beta must be > 0");
    const double signal = std::pow(std::sin(gamma_t), 2) * std::abs(quadrature_variance_normal(p, lo.phi));
    SnrResult out;
    if (lo.epsilon == 0.0) {
        out.infinite = true;
        out.snr = std::numeric_limits<double>::infinity();
        return out;
    }
    out.snr = signal / (4.0 * lo.epsilon * lo.beta_mag * lo.beta_mag);
    return out;
}

// Degree-4 least-squares fit of Delta G2 against |beta|.
inline BetaSeparation separate_terms_by_beta(const std::vector<std::pair<double, double>>& sweep) {
    const int m = static_cast<int>(sweep.size());
    if (m < 5) throw std::invalid_argument("separate_terms_by_beta: need at least 5 beta values");
    double bmax = 0.0;
    for (const auto& s : sweep) bmax = std::max(bmax, std::abs(s.first));
    if (!(bmax > 0.0)) throw std::invalid_argument("separate_terms_by_beta: rank-deficient design");
    // columns scaled by bmax^k for conditioning
    RMat V(m, 5);
    RVec y(m);
    for (int i = 0; i < m; ++i) {
        const double u = sweep[i].first / bmax;
        double pw = 1.0;
        for (int k = 0; k < 5; ++k) {
            V(i, k) = pw;
            pw *= u;
        }
        y(i) = sweep[i].second;
    }
    Eigen::ColPivHouseholderQR<RMat> qr(V);
    qr.setThreshold(1e-12);
    if (qr.rank() < 5) throw std::invalid_argument("separate_terms_by_beta: rank-deficient design");
    const RVec c = qr.solve(y);
    BetaSeparation out;
    out.coefficients.resize(5);
    for (int k = 0; k < 5; ++k) out.coefficients[k] = c(k) / std::pow(bmax, k);
    out.residual = (V * c - y).norm();
    return out;
}

inline std::vector<PhaseSample> simulate_phase_sweep(const GwSignalParams& p, const LocalOscillator& lo, double gamma_t,
                                                     int n_phases, std::mt19937_64* rng = nullptr) {
    if (n_phases < 1) throw std::invalid_argument("simulate_phase_sweep: need at least one phase");
    std::vector<PhaseSample> out;
    std::normal_distribution<double> noise(0.0, std::sqrt(lo.epsilon));
    for (int i = 0; i < n_phases; ++i) {
        LocalOscillator l = lo;
        l.phi = 2.0 * kPi * i / n_phases;
        LocalOscillator l1 = l, l2 = l;
        if (rng && lo.epsilon > 0.0) {
            l1.beta_mag = lo.beta_mag * (1.0 + noise(*rng));
            l2.beta_mag = lo.beta_mag * (1.0 + noise(*rng));
        }
        out.push_back({l.phi, delta_g2_terms(p, l1, gamma_t).dG1, delta_g2_terms(p, l2, gamma_t).dG2});
    }
    return out;
}

// Linear least-squares reconstruction. dG2 (pi-periodic) fixes (nbar + 1/2) cosh 2r,
// (nbar + 1/2) sinh 2r and theta; dG1 (2 pi-periodic) then fixes alpha through the
// 2x2 system Re/Im of alpha C + alpha* M. dG0 enters the residual as a consistency check.
inline ReconstructionResult reconstruct_gaussian(const std::vector<PhaseSample>& sweep, double gamma_t, double beta_mag,
                                                 double dG0) {
    const int m = static_cast<int>(sweep.size());
    if (m < 8) throw std::invalid_argument("reconstruct_gaussian: need at least 8 phases");
    if (!(beta_mag > 0.0)) throw std::invalid_argument("reconstruct_gaussian: beta must be > 0");
    const double s = std::sin(gamma_t);
    const double c = std::cos(gamma_t);
    if (std::abs(s * c) < 1e-300) throw std::invalid_argument("reconstruct_gaussian: gamma_t gives no signal");
    const double k2 = s * s * c * c * beta_mag * beta_mag;
    const double k1 = s * s * s * c * beta_mag;

    RMat V2(m, 3), V1(m, 2);
    RVec y2(m), y1(m);
    for (int i = 0; i < m; ++i) {
        const double ph = sweep[i].phi;
        V2(i, 0) = 1.0;
        V2(i, 1) = -std::cos(2.0 * ph);
        V2(i, 2) = -std::sin(2.0 * ph);
        y2(i) = sweep[i].dG2 / k2;
        V1(i, 0) = std::sqrt(2.0) * std::cos(ph);
        V1(i, 1) = std::sqrt(2.0) * std::sin(ph);
        y1(i) = sweep[i].dG1 / k1;
    }
    Eigen::ColPivHouseholderQR<RMat> qr2(V2);
    Eigen::ColPivHouseholderQR<RMat> qr1(V1);
    if (qr2.rank() < 3 || qr1.rank() < 2) throw std::invalid_argument("reconstruct_gaussian: phases do not resolve the harmonics");
    const RVec P = qr2.solve(y2);
    const RVec W = qr1.solve(y1);

    ReconstructionResult out;
    out.phase_grid_size = m;
    const double Nch = P(0) + 0.5;
    const double Nsh = std::hypot(P(1), P(2));
    const double scale = std::max(1.0, Nch);
    out.theta_identifiable = Nsh > 1e-9 * scale;
    out.theta = out.theta_identifiable ? std::atan2(P(2), P(1)) : 0.0;
    if (out.theta < 0.0) out.theta += 2.0 * kPi;
    const double N2 = (Nch - Nsh) * (Nch + Nsh);
    const double N = std::sqrt(std::max(N2, 0.25));
    out.nbar = std::max(N - 0.5, 0.0);
    out.r = 0.5 * std::atanh(std::min(Nsh / Nch, 1.0 - 1e-16));
    if (!out.theta_identifiable) out.r = 0.0;

    const double C = Nch - 0.5;
    const cplx M = -Nsh * std::polar(1.0, out.theta);
    Eigen::Matrix2d K;
    K << C + M.real(), M.imag(), M.imag(), C - M.real();
    const double detK = K.determinant();
    out.alpha_identifiable = std::abs(detK) > 1e-12 * std::max(1.0, C * C);
    if (out.alpha_identifiable) {
        const Eigen::Vector2d xy = K.partialPivLu().solve(Eigen::Vector2d(W(0), W(1)));
        out.alpha_mag = std::hypot(xy(0), xy(1));
        out.alpha_phase = std::atan2(xy(1), xy(0));
    }

    GwSignalParams est;
    est.alpha = std::polar(out.alpha_mag, out.alpha_phase);
    est.r = out.r;
    est.theta = out.theta;
    est.nbar = out.nbar;
    const double r2 = (V2 * P - y2).squaredNorm() + (V1 * W - y1).squaredNorm();
    const double pred0 = std::pow(s, 4) * normal_number_variance(gw_moments(est));
    const double d0 = (pred0 - dG0) / std::max(std::abs(dG0), std::pow(s, 4));
    out.residual = std::sqrt(r2 / m + d0 * d0);
    return out;
}

}  // namespace gwstats
