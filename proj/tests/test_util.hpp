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

#include <random>

#include "gwstats/gaussian_core.hpp"

namespace gwstats::testutil {

struct Draw {
    GwSignalParams p;
    double gamma_t = 0.0;
};

// uniform over |alpha| <= amax, r <= rmax, nbar <= nmax, theta, arg alpha, gamma_t in (0, pi/2)
inline Draw random_draw(std::mt19937_64& rng, double amax = 2.0, double rmax = 1.0, double nmax = 2.0) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Draw d;
    d.p.alpha = std::polar(amax * U(rng), 2.0 * kPi * U(rng));
    d.p.r = rmax * U(rng);
    d.p.theta = 2.0 * kPi * U(rng);
    d.p.nbar = nmax * U(rng);
    d.gamma_t = 0.5 * kPi * (0.005 + 0.99 * U(rng));
    return d;
}

inline RMat random_symplectic(std::mt19937_64& rng, int n_modes) {
    std::normal_distribution<double> N(0.0, 0.4);
    // exp(Omega H) with H symmetric is symplectic
    RMat H(2 * n_modes, 2 * n_modes);
    for (int i = 0; i < H.rows(); ++i) {
        for (int j = 0; j <= i; ++j) H(i, j) = H(j, i) = N(rng);
    }
    const RMat A = detail::omega(n_modes) * H;
    // scaling and squaring of the Taylor series
    RMat term = RMat::Identity(A.rows(), A.cols());
    RMat sum = term;
    const RMat As = A / 16.0;
    for (int k = 1; k < 30; ++k) {
        term = term * As / k;
        sum += term;
    }
    for (int k = 0; k < 4; ++k) sum = sum * sum;
    return sum;
}

}  // namespace gwstats::testutil
