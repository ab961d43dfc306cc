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
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "stm/objective.hpp"

namespace stm {

/// Closed-form minimizer of ||TX - A||^2 + lambda1 ||T||^2 - lambda2 log|det T|.
///
/// With X X^T + lambda1 I = L L^T and L^{-1} X A^T = U S V^T, the minimizer is
///
///   T = 1/2 V (S + (S^2 + 2 lambda2 I)^{1/2}) U^T L^{-1}.
///
/// Every singular value of the middle factor is at least sqrt(lambda2 / 2),
/// so the result is nonsingular. N < n is fine because lambda1 > 0.
inline RealMatrix update_transform(const RealMatrix& x, const RealMatrix& a, double lambda1,
                                   double lambda2) {
  using detail::require;
  require(lambda1 > 0 && std::isfinite(lambda1), ErrorCategory::ill_posed,
          "transform update requires lambda1 > 0");
  require(lambda2 > 0 && std::isfinite(lambda2), ErrorCategory::ill_posed,
          "transform update requires lambda2 > 0");
  require(x.rows() > 0 && x.cols() > 0, ErrorCategory::empty_input, "transform update needs data");
  require(a.rows() == x.rows() && a.cols() == x.cols(), ErrorCategory::dimension,
          "code shape " + shape(a) + " does not match data " + shape(x));
  require_finite(x, "transform update data");
  require_finite(a, "transform update codes");

  const Eigen::Index n = x.rows();
  RealMatrix gram = x * x.transpose();
  gram.diagonal().array() += lambda1;

  const Eigen::LLT<RealMatrix> chol(gram);
  if (chol.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "Cholesky factorization of the regularized Gram matrix failed (n=" << n
        << ", diagonal range [" << gram.diagonal().minCoeff() << ", "
        << gram.diagonal().maxCoeff() << "])";
    detail::fail(ErrorCategory::numeric, msg.str());
  }
  const auto lower = chol.matrixL();

  // L^{-1} X A^T
  const RealMatrix cross = lower.solve(x * a.transpose());
  const Eigen::BDCSVD<RealMatrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) {
    detail::fail(ErrorCategory::numeric, "singular value decomposition did not converge");
  }
  const RealVector& s = svd.singularValues();
  const RealVector middle = 0.5 * (s.array() + (s.array().square() + 2.0 * lambda2).sqrt()).matrix();

  const RealMatrix core = svd.matrixV() * middle.asDiagonal() * svd.matrixU().transpose();
  // core * L^{-1}, computed as (L^{-T} core^T)^T.
  RealMatrix t = chol.matrixU().solve(core.transpose()).transpose();

  if (!t.allFinite()) {
    std::ostringstream msg;
    msg << "transform update produced non-finite entries; smallest Cholesky pivot "
        << lower.toDenseMatrix().diagonal().minCoeff();
    detail::fail(ErrorCategory::numeric, msg.str());
  }
  return t;
}

}  // namespace stm
