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
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stm/shared_transform.hpp"

namespace stm {

/// Encoded enrolment set: one code column per enrolled image.
class Gallery {
 public:
  Gallery(RealMatrix codes, std::vector<std::string> labels, std::string feature_space_tag)
      : codes_(std::move(codes)),
        labels_(std::move(labels)),
        feature_space_tag_(std::move(feature_space_tag)) {
    detail::require(!labels_.empty(), ErrorCategory::empty_input, "gallery is empty");
    detail::require(static_cast<std::size_t>(codes_.cols()) == labels_.size(),
                    ErrorCategory::dimension,
                    "gallery has " + std::to_string(codes_.cols()) + " codes but " +
                        std::to_string(labels_.size()) + " labels");
  }

  const RealMatrix& codes() const noexcept { return codes_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& feature_space_tag() const noexcept { return feature_space_tag_; }
  std::size_t size() const noexcept { return labels_.size(); }

  std::size_t identity_count() const {
    std::vector<std::string> ids = labels_;
    std::sort(ids.begin(), ids.end());
    return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
  }

 private:
  RealMatrix codes_;
  std::vector<std::string> labels_;
  std::string feature_space_tag_;
};

struct Candidate {
  std::string identity;
  double distance;

  bool operator==(const Candidate&) const = default;
};

/// Gallery identities by ascending squared distance; one entry per identity.
using RankedList = std::vector<Candidate>;

/// Encodes gallery features (one column per image) through the model.
inline Gallery build_gallery(const SharedTransformModel& model, const RealMatrix& features,
                             std::vector<std::string> labels,
                             const std::string& feature_space_tag) {
  detail::require(feature_space_tag == model.feature_space_tag(), ErrorCategory::feature_space,
                  "gallery features are '" + feature_space_tag + "' but the model was trained on '" +
                      model.feature_space_tag() + "'");
  detail::require(static_cast<std::size_t>(features.cols()) == labels.size(),
                  ErrorCategory::dimension,
                  std::to_string(features.cols()) + " gallery columns but " +
                      std::to_string(labels.size()) + " labels");
  return Gallery(encode(model, features), std::move(labels), feature_space_tag);
}

inline Gallery build_gallery(const SharedTransformModel& model, const RealMatrix& features,
                             std::vector<std::string> labels) {
  return build_gallery(model, features, std::move(labels), model.feature_space_tag());
}

/// Ranks every gallery identity against an already encoded probe.
inline RankedList rank_code(const RealVector& probe_code, const Gallery& gallery) {
  detail::require(probe_code.size() == gallery.codes().rows(), ErrorCategory::dimension,
                  "probe code length " + std::to_string(probe_code.size()) +
                      " does not match gallery rows " + std::to_string(gallery.codes().rows()));
  std::map<std::string, double> best;
  const auto& codes = gallery.codes();
  for (Eigen::Index c = 0; c < codes.cols(); ++c) {
    const double d = (codes.col(c) - probe_code).squaredNorm();
    auto [it, inserted] = best.try_emplace(gallery.labels()[static_cast<std::size_t>(c)], d);
    if (!inserted) it->second = std::min(it->second, d);
  }
  RankedList ranked;
  ranked.reserve(best.size());
  for (auto& [id, d] : best) ranked.push_back({id, d});
  // best is keyed by identity, so a stable sort leaves equal distances in
  // lexicographic order.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });
  return ranked;
}

/// Encodes the probe and ranks the gallery identities by least distance.
inline RankedList identify(const SharedTransformModel& model, const RealVector& probe,
                           const Gallery& gallery) {
  detail::require(gallery.size() > 0, ErrorCategory::empty_input, "gallery is empty");
  detail::require(static_cast<std::size_t>(probe.size()) == model.feature_dim(),
                  ErrorCategory::dimension,
                  "probe length " + std::to_string(probe.size()) + " does not match model dimension " +
                      std::to_string(model.feature_dim()));
  return rank_code(encode(model, probe), gallery);
}

/// 1-based position of true_identity in the ranking.
inline std::size_t rank_of_true_match(const RankedList& ranked, const std::string& true_identity) {
  const auto it = std::find_if(ranked.begin(), ranked.end(),
                               [&](const Candidate& c) { return c.identity == true_identity; });
  detail::require(it != ranked.end(), ErrorCategory::not_enrolled,
                  "identity '" + true_identity + "' is not enrolled in the gallery");
  return static_cast<std::size_t>(it - ranked.begin()) + 1;
}

}  // namespace stm
