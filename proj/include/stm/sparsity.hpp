// Copyright 2026 The Shared Transform Authors. All Rights Reserved.
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
#include <numeric>
#include <vector>

#include "stm/types.hpp"

namespace stm {

/// Keeps the tau largest-magnitude entries of every column and zeroes the
/// rest. Equal magnitudes keep the smaller row index, so the kept support is
/// a pure function of the input.
inline RealMatrix hard_threshold(const RealMatrix& m, const SparsityPolicy& policy) {
  using detail::require;
  require(policy.tau >= 1, ErrorCategory::dimension, "sparsity tau must be at least 1");
  require(policy.tau <= static_cast<std::size_t>(m.rows()), ErrorCategory::dimension,
          "sparsity tau " + std::to_string(policy.tau) + " exceeds row count " +
              std::to_string(m.rows()));
  require_finite(m, "hard_threshold input");

  const auto rows = static_cast<std::size_t>(m.rows());
  if (policy.tau == rows) return m;

  RealMatrix out = RealMatrix::Zero(m.rows(), m.cols());
  std::vector<Eigen::Index> order(rows);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    auto stronger = [&](Eigen::Index a, Eigen::Index b) {
      const double ma = std::abs(m(a, c));
      const double mb = std::abs(m(b, c));
      return ma > mb || (ma == mb && a < b);
    };
    const auto kth = order.begin() + static_cast<std::ptrdiff_t>(policy.tau);
    std::nth_element(order.begin(), kth - 1, order.end(), stronger);
    // nth_element leaves [begin, kth) as the tau strongest under the total order.
    for (auto it = order.begin(); it != kth; ++it) out(*it, c) = m(*it, c);
  }
  return out;
}

inline bool satisfies(const RealMatrix& m, const SparsityPolicy& policy) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (static_cast<std::size_t>((m.col(c).array() != 0.0).count()) > policy.tau) return false;
  }
  return true;
}

}  // namespace stm
