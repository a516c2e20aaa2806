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
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace gwstats {

inline constexpr int kLoopHafnianMaxK = 8;

// Loop hafnian: sum over all partitions of {0..2k-1} into singletons and pairs,
// a singleton i weighted by B(i,i), a pair (i,j) by B(i,j). The enumeration is
// memoised over the set of indices still to be matched.
template <typename Derived>
typename Derived::Scalar loop_hafnian(const Eigen::MatrixBase<Derived>& B, int max_k = kLoopHafnianMaxK) {
    using Scalar = typename Derived::Scalar;
    const int n = static_cast<int>(B.rows());
    if (B.cols() != n) throw std::invalid_argument("loop_hafnian: matrix must be square");
    if (n % 2 != 0) throw std::invalid_argument("loop_hafnian: dimension must be even");
    if (n / 2 > max_k) throw std::out_of_range("loop_hafnian: k exceeds enumeration bound");
    if (n == 0) return Scalar(1);
    double scale = 0.0;
    double asym = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            scale = std::max(scale, static_cast<double>(std::abs(B(i, j))));
            asym = std::max(asym, static_cast<double>(std::abs(B(i, j) - B(j, i))));
        }
    }
    if (asym > 1e-12 * std::max(1.0, scale)) throw std::invalid_argument("loop_hafnian: matrix must be symmetric");

    const std::uint32_t full = (n == 32) ? 0xffffffffu : ((1u << n) - 1u);
    // memo[mask] = loop hafnian of the submatrix on the indices in mask
    std::vector<Scalar> memo(std::size_t(1) << n, Scalar(0));
    std::vector<char> done(std::size_t(1) << n, 0);
    memo[0] = Scalar(1);
    done[0] = 1;
    auto rec = [&](auto&& self, std::uint32_t mask) -> Scalar {
        if (done[mask]) return memo[mask];
        int i = 0;
        while (!(mask & (1u << i))) ++i;
        const std::uint32_t rest = mask & ~(1u << i);
        Scalar acc = B(i, i) * self(self, rest);
        for (int j = i + 1; j < n; ++j) {
            if (rest & (1u << j)) acc += B(i, j) * self(self, rest & ~(1u << j));
        }
        memo[mask] = acc;
        done[mask] = 1;
        return acc;
    };
    return rec(rec, full);
}

}  // namespace gwstats
