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
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "stm/objective.hpp"
#include "stm/rng.hpp"
#include "stm/sparsity.hpp"
#include "stm/transform_update.hpp"

namespace stm {

/// A single n x n transform applied to both domains.
class SharedTransformModel {
 public:
  SharedTransformModel(RealMatrix transform, HyperParams hyper, std::string feature_space_tag)
      : transform_(std::move(transform)),
        hyper_(hyper),
        feature_space_tag_(std::move(feature_space_tag)) {
    using detail::require;
    require(transform_.rows() > 0 && transform_.rows() == transform_.cols(),
            ErrorCategory::dimension, "model transform must be square, got " + shape(transform_));
    require_finite(transform_, "model transform");
    require(std::isfinite(log_abs_det(transform_)), ErrorCategory::numeric,
            "model transform is singular");
    hyper_ = resolve(hyper_, feature_dim());
  }

  const RealMatrix& transform() const noexcept { return transform_; }
  const HyperParams& hyper() const noexcept { return hyper_; }
  std::size_t feature_dim() const noexcept { return static_cast<std::size_t>(transform_.rows()); }
  const std::string& feature_space_tag() const noexcept { return feature_space_tag_; }
  SparsityPolicy policy() const { return hyper_.policy(); }

  /// Learned parameters: exactly n^2, one transform for both domains.
  std::size_t parameter_count() const noexcept { return feature_dim() * feature_dim(); }

  bool operator==(const SharedTransformModel&) const = default;

 private:
  RealMatrix transform_;
  HyperParams hyper_;
  std::string feature_space_tag_;
};

struct FitReport {
  std::vector<double> objective_trace;  // one entry per completed outer iteration
  std::size_t iterations_run = 0;
  bool converged = false;
  double initial_objective = 0.0;
  double final_objective = 0.0;
};

struct InitPolicy {
  enum class Kind { Identity, RandomOrthonormal };
  Kind kind = Kind::Identity;
  std::uint64_t seed = 0;

  static InitPolicy identity() { return {}; }
  static InitPolicy random_orthonormal(std::uint64_t seed) { return {Kind::RandomOrthonormal, seed}; }
};

/// Which block an observer callback follows.
enum class FitStage { Initial, Transform, SkullCodes, FaceCodes };

struct FitState {
  std::size_t iteration;  // 0 for the initial state
  FitStage stage;
  const RealMatrix& transform;
  const RealMatrix& skull_codes;
  const RealMatrix& face_codes;
};

using FitObserver = std::function<void(const FitState&)>;

namespace detail {

/// Closed-form code step shared by both domains: the unconstrained minimizer of
/// ||P - C||^2 + lambda3 ||O - C||^2 is (P + lambda3 O) / (1 + lambda3) and the
/// objective separates per entry with equal curvature, so keeping the largest
/// entries of that average solves the sparse problem exactly.
inline RealMatrix coupled_code_update(const RealMatrix& t, const RealMatrix& x,
                                      const RealMatrix& other, double lambda3,
                                      const SparsityPolicy& policy) {
  require(std::isfinite(lambda3) && lambda3 >= 0, ErrorCategory::config,
          "lambda3 must be nonnegative");
  require(t.rows() == t.cols() && x.rows() == t.cols(), ErrorCategory::dimension,
          "data " + shape(x) + " does not match transform " + shape(t));
  require(other.rows() == t.rows() && other.cols() == x.cols(), ErrorCategory::dimension,
          "partner codes " + shape(other) + " do not match data " + shape(x));
  if (lambda3 == 0.0) return hard_threshold(t * x, policy);
  return hard_threshold((t * x + lambda3 * other) / (1.0 + lambda3), policy);
}

inline RealMatrix initial_transform(Eigen::Index n, const InitPolicy& init) {
  if (init.kind == InitPolicy::Kind::Identity) return RealMatrix::Identity(n, n);
  Rng rng(init.seed);
  const RealMatrix g = gaussian_matrix(n, n, rng);
  const Eigen::HouseholderQR<RealMatrix> qr(g);
  RealMatrix q = qr.householderQ() * RealMatrix::Identity(n, n);
  // Fix column signs so Q is unique for a given Gaussian draw.
  const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  return q;
}

}  // namespace detail

/// Skull-code step: argmin over per-column tau-sparse As of
/// ||T Xs - As||^2 + lambda3 ||Ad - As||^2.
inline RealMatrix update_code_skull(const RealMatrix& t, const RealMatrix& xs,
                                    const RealMatrix& ad, double lambda3,
                                    const SparsityPolicy& policy) {
  return detail::coupled_code_update(t, xs, ad, lambda3, policy);
}

/// Face-code step, the mirror image of update_code_skull.
inline RealMatrix update_code_face(const RealMatrix& t, const RealMatrix& xd,
                                   const RealMatrix& as, double lambda3,
                                   const SparsityPolicy& policy) {
  return detail::coupled_code_update(t, xd, as, lambda3, policy);
}

/// Alternating minimization of the coupled objective over (T, As, Ad).
///
/// Column i of xs and column i of xd must be the two views of the same
/// subject. Each outer iteration runs the transform step on the stacked
/// domains, then the skull codes, then the face codes. Stops when the relative
/// objective change drops below rel_tol or after max_iters iterations.
inline std::pair<SharedTransformModel, FitReport> fit(const RealMatrix& xs, const RealMatrix& xd,
                                                      HyperParams hyper,
                                                      const InitPolicy& init = {},
                                                      std::string feature_space_tag = "",
                                                      const FitObserver& observer = {}) {
  using detail::require;
  require(xs.rows() > 0 && xs.cols() > 0, ErrorCategory::empty_input,
          "fit needs a nonempty skull matrix, got " + shape(xs));
  require(xd.rows() > 0 && xd.cols() > 0, ErrorCategory::empty_input,
          "fit needs a nonempty face matrix, got " + shape(xd));
  require(xs.cols() == xd.cols(), ErrorCategory::pairing,
          "skull and face matrices have " + std::to_string(xs.cols()) + " and " +
              std::to_string(xd.cols()) + " columns; mated pairs must align");
  require(xs.rows() == xd.rows(), ErrorCategory::dimension,
          "skull and face feature dimensions differ: " + shape(xs) + " vs " + shape(xd));
  require_finite(xs, "skull features");
  require_finite(xd, "face features");

  const Eigen::Index n = xs.rows();
  const Eigen::Index cols = xs.cols();
  hyper = resolve(hyper, static_cast<std::size_t>(n));
  const SparsityPolicy policy = hyper.policy();

  RealMatrix t = detail::initial_transform(n, init);
  RealMatrix as = hard_threshold(t * xs, policy);
  RealMatrix ad = hard_threshold(t * xd, policy);
  auto notify = [&](std::size_t it, FitStage stage) {
    if (observer) observer(FitState{it, stage, t, as, ad});
  };
  notify(0, FitStage::Initial);

  RealMatrix stacked_x(n, 2 * cols);
  stacked_x << xs, xd;
  RealMatrix stacked_a(n, 2 * cols);

  FitReport report;
  double previous = shared_objective(t, xs, xd, as, ad, hyper);
  report.initial_objective = previous;
  report.final_objective = previous;

  for (std::size_t it = 1; it <= hyper.max_iters; ++it) {
    stacked_a << as, ad;
    t = update_transform(stacked_x, stacked_a, hyper.lambda1, hyper.lambda2);
    notify(it, FitStage::Transform);
    as = update_code_skull(t, xs, ad, hyper.lambda3, policy);
    notify(it, FitStage::SkullCodes);
    ad = update_code_face(t, xd, as, hyper.lambda3, policy);
    notify(it, FitStage::FaceCodes);

    const double current = shared_objective(t, xs, xd, as, ad, hyper);
    if (!std::isfinite(current)) {
      detail::fail(ErrorCategory::numeric,
                   "objective became non-finite at iteration " + std::to_string(it));
    }
    report.objective_trace.push_back(current);
    report.iterations_run = it;
    report.final_objective = current;

    const double scale = std::max(std::abs(previous), std::numeric_limits<double>::min());
    if (std::abs(previous - current) / scale < hyper.rel_tol) {
      report.converged = true;
      break;
    }
    previous = current;
  }

  return {SharedTransformModel(std::move(t), hyper, std::move(feature_space_tag)), report};
}

/// Sparse codes of the columns of x under the model's transform.
inline RealMatrix encode(const SharedTransformModel& model, const RealMatrix& x) {
  detail::require(static_cast<std::size_t>(x.rows()) == model.feature_dim(),
                  ErrorCategory::feature_space,
                  "features have " + std::to_string(x.rows()) + " rows but the model expects " +
                      std::to_string(model.feature_dim()));
  require_finite(x, "features to encode");
  return hard_threshold(model.transform() * x, model.policy());
}

inline RealVector encode(const SharedTransformModel& model, const RealVector& x) {
  const RealMatrix column = x;
  return encode(model, column).col(0);
}

}  // namespace stm
