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

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "stm/error.hpp"

namespace stm {

/// Dense 64-bit matrix, one sample per column.
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

enum class SparsityScope { PerColumn };

struct SparsityPolicy {
  SparsityScope scope = SparsityScope::PerColumn;
  std::size_t tau = 1;
};

struct HyperParams {
  double lambda1 = 1.0;   // Frobenius penalty on the transform
  double lambda2 = 1.0;   // log-determinant penalty
  double lambda3 = 0.5;   // coupling between domain codes
  std::size_t tau = 0;    // 0 means ceil(n / 2), resolved at fit time
  std::size_t max_iters = 50;
  double rel_tol = 1e-6;

  SparsityPolicy policy() const { return {SparsityScope::PerColumn, tau}; }

  bool operator==(const HyperParams&) const = default;
};

inline std::size_t default_tau(std::size_t n) { return (n + 1) / 2; }

/// Fills in tau and checks every field against feature dimension n.
inline HyperParams resolve(HyperParams h, std::size_t n) {
  using detail::require;
  if (h.tau == 0) h.tau = default_tau(n);
  require(std::isfinite(h.lambda1) && h.lambda1 > 0, ErrorCategory::ill_posed,
          "lambda1 must be positive");
  require(std::isfinite(h.lambda2) && h.lambda2 > 0, ErrorCategory::ill_posed,
          "lambda2 must be positive");
  require(std::isfinite(h.lambda3) && h.lambda3 >= 0, ErrorCategory::config,
          "lambda3 must be nonnegative");
  require(h.tau <= n, ErrorCategory::dimension,
          "tau " + std::to_string(h.tau) + " exceeds feature dimension " + std::to_string(n));
  require(h.max_iters > 0, ErrorCategory::config, "max_iters must be positive");
  require(std::isfinite(h.rel_tol) && h.rel_tol > 0, ErrorCategory::config,
          "rel_tol must be positive");
  return h;
}

inline bool all_finite(const RealMatrix& m) { return m.allFinite(); }

inline void require_finite(const RealMatrix& m, const char* what) {
  detail::require(m.allFinite(), ErrorCategory::numeric_input,
                  std::string(what) + " contains non-finite entries");
}

inline std::string shape(const RealMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace stm
