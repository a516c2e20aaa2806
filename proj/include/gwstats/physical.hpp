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
#include <optional>
#include <stdexcept>

#include "gwstats/gaussian_core.hpp"

namespace gwstats::physical {

// CODATA 2018, SI
struct PhysicalConstants {
    double G = 6.67430e-11;
    double c = 299792458.0;
    double hbar = 1.054571817e-34;
    double k_B = 1.380649e-23;
    double t_P() const { return std::sqrt(hbar * G / (c * c * c * c * c)); }
};

inline constexpr PhysicalConstants kSI{};

struct DetectorConfig {
    double mass = 0.0;             // kg
    double length = 0.0;           // m
    double omega_ell = 0.0;        // rad/s
    int ell = 1;                   // odd mode index
    double gw_volume = 0.0;        // m^3
    double quality_factor = 0.0;
    double temperature = 0.0;      // K

    void validate() const {
        if (ell < 1 || ell % 2 == 0) throw std::invalid_argument("DetectorConfig: ell must be an odd positive integer");
        if (!(mass > 0.0) || !(length > 0.0) || !(omega_ell > 0.0) || !(gw_volume > 0.0) || !(quality_factor > 0.0)) {
            throw std::invalid_argument("DetectorConfig: mass, length, omega_ell, gw_volume, quality_factor must be positive");
        }
        if (!(temperature >= 0.0)) throw std::invalid_argument("DetectorConfig: temperature must be non-negative");
    }
};

// gamma_g = sqrt(8 pi G M nu^3 L^3 / (omega_ell c^2 V pi^4 ell^4)); the sign
// factor (-1)^(ell-1) is +1 for the odd modes that couple.
inline double coupling_gamma(const DetectorConfig& cfg, double nu, const PhysicalConstants& k = kSI) {
    cfg.validate();
    if (!(nu > 0.0)) throw std::invalid_argument("coupling_gamma: nu must be positive");
    const double l4 = std::pow(static_cast<double>(cfg.ell), 4);
    const double num = 8.0 * kPi * k.G * cfg.mass * nu * nu * nu * cfg.length * cfg.length * cfg.length;
    const double den = cfg.omega_ell * k.c * k.c * cfg.gw_volume * std::pow(kPi, 4) * l4;
    return std::sqrt(num / den);
}

// n_grav = h^2 / (32 pi nu^2 t_P^2), nu angular
inline double graviton_flux(double h_strain, double nu, const PhysicalConstants& k = kSI) {
    if (!(h_strain > 0.0) || !(nu > 0.0)) throw std::invalid_argument("graviton_flux: h and nu must be positive");
    const double tp = k.t_P();
    return std::exp(2.0 * std::log(h_strain) - std::log(32.0 * kPi) - 2.0 * std::log(nu) - 2.0 * std::log(tp));
}

struct NqDecomposition {
    double n_grav = 0.0;
    double n_q = 0.0;
    double fraction = 0.0;
    bool percent_regime = false;  // fraction within half a decade of 0.01
};

inline NqDecomposition nq_decomposition(const GwSignalParams& p) {
    validate(p);
    NqDecomposition d;
    d.n_q = p.n_q();
    d.n_grav = std::norm(p.alpha) + d.n_q;
    if (d.n_grav == 0.0) throw std::domain_error("nq_decomposition: n_grav = 0");
    d.fraction = d.n_q / d.n_grav;
    d.percent_regime = d.fraction > 0.0 && std::abs(std::log10(d.fraction) + 2.0) <= 0.5;
    return d;
}

struct NoiseThresholds {
    double Gamma_th = 0.0;    // k_B T / (hbar Q), 1/s
    double t = 0.0;           // s
    double signal = 0.0;      // n_grav (gamma t)^2
    double n_th = 0.0;
    double heating_margin = 0.0;    // signal / (Gamma_th t)
    double occupation_margin = 0.0; // signal / n_th
    bool heating_ok = false;
    bool occupation_ok = false;
};

inline double bose_occupation(double omega, double temperature, const PhysicalConstants& k = kSI) {
    if (temperature <= 0.0) return 0.0;
    return 1.0 / std::expm1(k.hbar * omega / (k.k_B * temperature));
}

// Both inequalities Gamma_th t << n_grav (gamma t)^2 and n_th << n_grav (gamma t)^2.
// t defaults to gamma_t / gamma_g and n_th to the Bose occupation of the bar mode.
inline NoiseThresholds noise_thresholds(const DetectorConfig& cfg, double nu, double gamma_t, double n_grav,
                                        std::optional<double> n_th = std::nullopt,
                                        std::optional<double> t = std::nullopt, const PhysicalConstants& k = kSI) {
    cfg.validate();
    NoiseThresholds r;
    r.Gamma_th = k.k_B * cfg.temperature / (k.hbar * cfg.quality_factor);
    r.t = t ? *t : gamma_t / coupling_gamma(cfg, nu, k);
    r.signal = n_grav * gamma_t * gamma_t;
    r.n_th = n_th ? *n_th : bose_occupation(cfg.omega_ell, cfg.temperature, k);
    const double heat = r.Gamma_th * r.t;
    r.heating_margin = heat > 0.0 ? r.signal / heat : INFINITY;
    r.occupation_margin = r.n_th > 0.0 ? r.signal / r.n_th : INFINITY;
    r.heating_ok = r.heating_margin > 1.0;
    r.occupation_ok = r.occupation_margin > 1.0;
    return r;
}

}  // namespace gwstats::physical
