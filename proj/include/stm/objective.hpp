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
#include <limits>

#include "stm/types.hpp"

namespace stm {

/// log|det T| via LU; -infinity when T is singular.
inline double log_abs_det(const RealMatrix& t) {
  detail::require(t.rows() == t.cols() && t.rows() > 0, ErrorCategory::dimension,
                  "transform must be square, got " + shape(t));
  const Eigen::PartialPivLU<RealMatrix> lu(t);
  const auto& u = lu.matrixLU();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double d = std::abs(u(i, i));
    if (d == 0.0) return -std::numeric_limits<double>::infinity();
    acc += std::log(d);
  }
  return acc;
}

namespace detail {

inline void check_fit_shapes(const RealMatrix& t, const RealMatrix& x, const RealMatrix& a) {
  require(t.rows() == t.cols(), ErrorCategory::dimension, "transform must be square, got " + shape(t));
  require(x.rows() == t.cols(), ErrorCategory::dimension,
          "data rows " + std::to_string(x.rows()) + " do not match transform " + shape(t));
  require(a.rows() == t.rows() && a.cols() == x.cols(), ErrorCategory::dimension,
          "code shape " + shape(a) + " does not match data " + shape(x));
}

inline double regularizers(const RealMatrix& t, double lambda1, double lambda2) {
  const double lad = log_abs_det(t);
  if (!std::isfinite(lad)) return std::numeric_limits<double>::infinity();
  return lambda1 * t.squaredNorm() - lambda2 * lad;
}

}  // namespace detail

/// ||TX - A||_F^2 + lambda1 ||T||_F^2 - lambda2 log|det T|.
///
/// A singular T yields +infinity; callers treat that value as a failure flag.
inline double tl_objective(const RealMatrix& t, const RealMatrix& x, const RealMatrix& a,
                           double lambda1, double lambda2) {
  detail::check_fit_shapes(t, x, a);
  const double reg = detail::regularizers(t, lambda1, lambda2);
  if (!std::isfinite(reg)) return reg;
  return (t * x - a).squaredNorm() + reg;
}

/// Full coupled objective over both domains:
/// ||T Xs - As||^2 + ||T Xd - Ad||^2 + lambda1 ||T||^2 - lambda2 log|det T|
///   + lambda3 ||Ad - As||^2.
inline double shared_objective(const RealMatrix& t, const RealMatrix& xs, const RealMatrix& xd,
                               const RealMatrix& as, const RealMatrix& ad,
                               const HyperParams& hyper) {
  detail::require(xs.cols() == xd.cols(), ErrorCategory::pairing,
                  "domains have " + std::to_string(xs.cols()) + " and " +
                      std::to_string(xd.cols()) + " columns; mated pairs must align");
  detail::check_fit_shapes(t, xs, as);
  detail::check_fit_shapes(t, xd, ad);
  const double reg = detail::regularizers(t, hyper.lambda1, hyper.lambda2);
  if (!std::isfinite(reg)) return reg;
  return (t * xs - as).squaredNorm() + (t * xd - ad).squaredNorm() + reg +
         hyper.lambda3 * (ad - as).squaredNorm();
}

/// Gradient of tl_objective with respect to T:
/// 2 (TX - A) X^T + 2 lambda1 T - lambda2 T^{-T}.
inline RealMatrix tl_gradient(const RealMatrix& t, const RealMatrix& x, const RealMatrix& a,
                              double lambda1, double lambda2) {
  detail::check_fit_shapes(t, x, a);
  const RealMatrix inv_t = t.partialPivLu().inverse();
  return 2.0 * (t * x - a) * x.transpose() + 2.0 * lambda1 * t - lambda2 * inv_t.transpose();
}

}  // namespace stm
