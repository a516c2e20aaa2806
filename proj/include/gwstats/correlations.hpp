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
#include <optional>
#include <stdexcept>
#include <vector>

#include "gwstats/counting.hpp"
#include "gwstats/dynamics.hpp"
#include "gwstats/gaussian_core.hpp"
#include "gwstats/loop_hafnian.hpp"

namespace gwstats {

enum class Ordering { normal, symmetric, antinormal };

inline double ordering_s(Ordering o) {
    switch (o) {
        case Ordering::normal: return 1.0;
        case Ordering::symmetric: return 0.0;
        case Ordering::antinormal: return -1.0;
    }
    return 1.0;
}

inline constexpr int kMaxMomentOrder = 4;

struct MomentRequest {
    int n_dagger = 0;
    int n_plain = 0;
    Ordering ordering = Ordering::normal;
};

enum class G2Variant { ideal, thermal_detector, open };
enum class G2Status { ok, undefined_vacuum, discontinuity_t0 };

struct G2Report {
    std::optional<double> g2;
    double mean_n = 0.0;
    double mean_n2 = 0.0;
    G2Variant variant = G2Variant::ideal;
    G2Status status = G2Status::ok;
    GwSignalParams params;
    double gamma_t = 0.0;
    double n_th = 0.0;
    OpenChannelParams channel;
    double t = 0.0;
    // closed-form evaluation of the same quantity and |closed form - g2|
    std::optional<double> secondary;
    std::optional<double> secondary_discrepancy;
    // open dynamics only: n_grav (gamma t)^2 / (Gamma_th t) with Gamma_th = kappa Nbar
    std::optional<double> heating_margin;
    bool heating_ok = true;
};

// s-ordered moment of a^dagger^k a^l for one mode, by Wick expansion of the
// Gaussian s-ordered characteristic function: a loop hafnian over the k + l
// operator slots with means on the diagonal and s-ordered pair covariances
// <da^dagger da>_s = C + (1-s)/2, <da da> = M, <da^dagger da^dagger> = M*.
inline cplx s_ordered_moment(const LadderMoments& m, const MomentRequest& req, int mode = 0) {
    if (req.n_dagger < 0 || req.n_plain < 0) throw std::invalid_argument("s_ordered_moment: negative order");
    if (req.n_dagger + req.n_plain > kMaxMomentOrder) throw std::out_of_range("s_ordered_moment: order above 4 not supported");
    if (mode < 0 || mode >= m.num_modes()) throw std::out_of_range("s_ordered_moment: mode index out of range");
    const double s = ordering_s(req.ordering);
    const cplx al = m.alpha(mode);
    const cplx Mm = m.M(mode);
    const cplx cross = m.sigma_normal(2 * mode, 2 * mode) + 0.5 * (1.0 - s);
    const int k = req.n_dagger;
    const int n = k + req.n_plain;
    CMat B(n, n);
    for (int i = 0; i < n; ++i) {
        const bool di = i < k;
        for (int j = 0; j < n; ++j) {
            const bool dj = j < k;
            if (i == j) {
                B(i, j) = di ? std::conj(al) : al;
            } else if (di && dj) {
                B(i, j) = std::conj(Mm);
            } else if (!di && !dj) {
                B(i, j) = Mm;
            } else {
                B(i, j) = cross;
            }
        }
    }
    // odd dimension: pad with an isolated unit loop
    if (n % 2 == 1) {
        CMat P = CMat::Zero(n + 1, n + 1);
        P.topLeftCorner(n, n) = B;
        P(n, n) = 1.0;
        return loop_hafnian(P);
    }
    return loop_hafnian(B);
}

inline cplx normal_moment(const LadderMoments& m, int n_dagger, int n_plain, int mode = 0) {
    return s_ordered_moment(m, MomentRequest{n_dagger, n_plain, Ordering::normal}, mode);
}

// <:(dn)^2:> = <a^dagger^2 a^2> - <n>^2, expanded so that no large terms cancel
inline double normal_number_variance(const LadderMoments& m, int mode = 0) {
    const cplx al = m.alpha(mode);
    const double C = m.C(mode);
    const cplx M = m.M(mode);
    return 2.0 * std::norm(al) * C + 2.0 * (std::conj(al) * std::conj(al) * M).real() + C * C + std::norm(M);
}

namespace detail {

inline G2Report g2_from_moments(const LadderMoments& m, G2Variant variant) {
    G2Report rep;
    rep.variant = variant;
    const double n = normal_moment(m, 1, 1).real();
    const double a22 = normal_moment(m, 2, 2).real();
    rep.mean_n = n;
    rep.mean_n2 = a22 + n;
    if (!(n > 0.0)) {
        rep.status = G2Status::undefined_vacuum;
        return rep;
    }
    rep.g2 = a22 / (n * n);
    return rep;
}

inline double relative_phase(const GwSignalParams& p) { return p.theta - 2.0 * std::arg(p.alpha); }

}  // namespace detail

enum class CrossTerm { sin2theta, cos_theta };

// Closed-form g2 of a displaced squeezed thermal mode with a sin(2 theta) cross term,
// or with the cross term replaced by cos(theta_rel). Only the latter is exact.
inline double g2_closed_form(const GwSignalParams& p, CrossTerm cross) {
    const double a2 = std::norm(p.alpha);
    const double N = p.nbar + 0.5;
    const double ch = std::cosh(2.0 * p.r);
    const double sh = std::sinh(2.0 * p.r);
    const double x = cross == CrossTerm::sin2theta ? std::sin(2.0 * p.theta) : std::cos(detail::relative_phase(p));
    const double num = 2.0 * (2.0 * a2 - 1.0) * N * ch - 4.0 * a2 * N * sh * x - 2.0 * a2 +
                       2.0 * N * N * std::cosh(4.0 * p.r) + 0.5;
    const double den = 2.0 * a2 + 2.0 * N * ch - 1.0;
    return 1.0 + 2.0 * num / (den * den);
}

// <a^dagger^2 a^2> from the characteristic function (real alpha).
inline double a2a2_closed_form(const GwSignalParams& p) {
    const double a2 = std::norm(p.alpha);
    const double m = 2.0 * p.nbar + 1.0;
    return (8.0 * a2 * (a2 - 2.0) - 8.0 * a2 * m * std::cos(p.theta) * std::sinh(2.0 * p.r) +
            8.0 * (2.0 * a2 - 1.0) * m * std::cosh(2.0 * p.r) + 3.0 * m * m * std::cosh(4.0 * p.r) +
            4.0 * p.nbar * (p.nbar + 1.0) + 5.0) / 8.0;
}

inline G2Report g2_ideal(const GwSignalParams& p) {
    G2Report rep = detail::g2_from_moments(gw_moments(p), G2Variant::ideal);
    rep.params = p;
    if (rep.g2) {
        rep.secondary = g2_closed_form(p, CrossTerm::sin2theta);
        rep.secondary_discrepancy = std::abs(*rep.secondary - *rep.g2);
    }
    return rep;
}

// g2 of the detector marginal after exchange with the gw mode (vacuum detector).
inline G2Report g2_detector(const GwSignalParams& p, double gamma_t) {
    G2Report rep = detail::g2_from_moments(detector_moments(p, gamma_t), G2Variant::ideal);
    rep.params = p;
    rep.gamma_t = gamma_t;
    if (!rep.g2 && std::sin(gamma_t) == 0.0) rep.status = G2Status::discontinuity_t0;
    return rep;
}

inline double g2_ratio_estimator(double P0, double P1, double P2) {
    if (!(P1 > 0.0)) throw std::domain_error("g2_ratio_estimator: P1 must be > 0");
    return 2.0 * P0 * P2 / (P1 * P1);
}

inline double mandel_q(const GwSignalParams& p, double gamma_t) {
    const LadderMoments m = gw_moments(p);
    const double n = m.C() + std::norm(m.alpha());
    if (!(n > 0.0)) return 0.0;
    return std::pow(std::sin(gamma_t), 2) * normal_number_variance(m) / n;
}

// Noisy-detector closed form I1 + I2 + I3 (real alpha, theta relative).
inline double g2_thermal_detector_closed_form(const GwSignalParams& p, double n_th, double gamma_t) {
    const double s2 = std::pow(std::sin(gamma_t), 2);
    const double c2 = std::pow(std::cos(gamma_t), 2);
    const double a2 = std::norm(p.alpha);
    const double m = 2.0 * p.nbar + 1.0;
    const double mt = 2.0 * n_th + 1.0;
    const double ch = std::cosh(2.0 * p.r);
    const double I1 = 4.0 * m * ch * s2 * (2.0 * a2 + (mt - 2.0 * a2) * std::cos(2.0 * gamma_t) + 2.0 * n_th - 1.0);
    const double I2 = s2 * s2 * (8.0 * a2 * a2 - 8.0 * a2 * m * std::cos(detail::relative_phase(p)) * std::sinh(2.0 * p.r) +
                                 3.0 * m * m * std::cosh(4.0 * p.r) + m * m);
    const double I3 = 4.0 * (mt * c2 - 1.0) * (mt * c2 + 4.0 * a2 * s2 - 1.0);
    const double den = n_th + s2 * (p.mean_occupation() - n_th);
    return (I1 + I2 + I3) / (8.0 * den * den);
}

// nbar = 0 reduction of the noisy-detector g2,
//   2 - s^4 [|alpha|^4 + |alpha|^2 sinh(2r) cos(theta_rel) - sinh^2(2r)/4] / <n>^2.
// At theta_rel = pi the bracket is (|alpha|^2 - sinh(2r)/2)^2 - sinh^2(2r)/2;
// square_only = true keeps only the square (and ignores the phase).
inline double g2_thermal_detector_nbar0(const GwSignalParams& p, double n_th, double gamma_t, bool square_only = false) {
    const double s2 = std::pow(std::sin(gamma_t), 2);
    const double a2 = std::norm(p.alpha);
    const double sh = std::sinh(2.0 * p.r);
    const double sr = std::sinh(p.r);
    const double den = n_th + s2 * (a2 + sr * sr - n_th);
    const double num = square_only ? (a2 - 0.5 * sh) * (a2 - 0.5 * sh)
                               : a2 * a2 + a2 * sh * std::cos(detail::relative_phase(p)) - 0.25 * sh * sh;
    return 2.0 - s2 * s2 * num / (den * den);
}

inline G2Report g2_thermal_detector(const GwSignalParams& p, double n_th, double gamma_t) {
    G2Report rep = detail::g2_from_moments(detector_moments(p, gamma_t, n_th), G2Variant::thermal_detector);
    rep.params = p;
    rep.n_th = n_th;
    rep.gamma_t = gamma_t;
    if (!rep.g2) {
        if (std::sin(gamma_t) == 0.0) rep.status = G2Status::discontinuity_t0;
        return rep;
    }
    rep.secondary = g2_thermal_detector_closed_form(p, n_th, gamma_t);
    rep.secondary_discrepancy = std::abs(*rep.secondary - *rep.g2);
    return rep;
}

// Open-dynamics closed form. alt_form = true uses a 2[...]^2 denominator and
// drops the phase dependence of the cross term.
inline double g2_open_closed_form(const GwSignalParams& p, const OpenChannelParams& ch, double gamma_t, double t,
                                  bool alt_form = false) {
    const double s2 = std::pow(std::sin(gamma_t), 2);
    const double a2 = std::norm(p.alpha);
    const double N = p.nbar + 0.5;
    const double sh = std::sinh(2.0 * p.r);
    const double den = ch.Nbar * std::expm1(ch.kappa * t) + p.mean_occupation() * s2;
    if (alt_form) {
        const double m = 2.0 * p.nbar + 1.0;
        return 2.0 + s2 * s2 * (m * sh * (m * sh - 4.0 * a2) - 4.0 * a2 * a2) / (2.0 * den * den);
    }
    const double cs = std::cos(detail::relative_phase(p));
    return 2.0 + s2 * s2 * (N * N * sh * sh - 2.0 * a2 * N * sh * cs - a2 * a2) / (den * den);
}

inline G2Report g2_open(const GwSignalParams& p, const OpenChannelParams& ch, double gamma_t, double t) {
    const GaussianState bar = evolve_open(make_gw_state(p), make_vacuum(1), gamma_t, ch, t);
    G2Report rep = detail::g2_from_moments(to_ladder(bar), G2Variant::open);
    rep.params = p;
    rep.channel = ch;
    rep.gamma_t = gamma_t;
    rep.t = t;
    const double signal = p.mean_occupation() * gamma_t * gamma_t;
    const double heating = ch.kappa * ch.Nbar * t;
    rep.heating_margin = heating > 0.0 ? signal / heating : std::numeric_limits<double>::infinity();
    rep.heating_ok = *rep.heating_margin > 1.0;
    if (!rep.g2) {
        if (std::sin(gamma_t) == 0.0) rep.status = G2Status::discontinuity_t0;
        return rep;
    }
    rep.secondary = g2_open_closed_form(p, ch, gamma_t, t);
    rep.secondary_discrepancy = std::abs(*rep.secondary - *rep.g2);
    return rep;
}

// least-squares slope of log(y) against log(x)
inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_loglog_slope: need >= 2 paired points");
    const int n = static_cast<int>(x.size());
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

struct RatioTestSweep {
    std::vector<double> gamma_t;
    std::vector<double> ratio;
    std::vector<double> error;
    double g2 = 0.0;
    double order = 0.0;
};

// 2 P0 P2 / P1^2 of the detector against the gw g2 over a gamma_t ladder.
inline RatioTestSweep ratio_test_sweep(const GwSignalParams& p, const std::vector<double>& gammas) {
    RatioTestSweep out;
    const G2Report ideal = g2_ideal(p);
    if (!ideal.g2) throw std::domain_error("ratio_test_sweep: g2 undefined for the vacuum");
    out.g2 = *ideal.g2;
    for (double gt : gammas) {
        const std::vector<double> pr = probabilities_generating(detector_moments(p, gt), 2);
        const double R = g2_ratio_estimator(pr[0], pr[1], pr[2]);
        out.gamma_t.push_back(gt);
        out.ratio.push_back(R);
        out.error.push_back(std::abs(R - out.g2));
    }
    out.order = fit_loglog_slope(out.gamma_t, out.error);
    return out;
}

}  // namespace gwstats
