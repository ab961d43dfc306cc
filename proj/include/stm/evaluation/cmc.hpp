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
#include <vector>

#include "stm/error.hpp"

namespace stm {

/// accuracy_at_rank[k - 1] is the fraction of probes whose true identity
/// ranked at k or better.
struct CmcCurve {
  std::vector<double> accuracy_at_rank;

  std::size_t size() const noexcept { return accuracy_at_rank.size(); }

  /// Rank-k accuracy; ranks past the gallery size saturate at the last entry.
  double at(std::size_t k) const {
    detail::require(k >= 1 && !accuracy_at_rank.empty(), ErrorCategory::dimension,
                    "CMC rank must be at least 1");
    return accuracy_at_rank[std::min(k, accuracy_at_rank.size()) - 1];
  }

  bool operator==(const CmcCurve&) const = default;
};

inline CmcCurve compute_cmc(const std::vector<std::size_t>& ranks,
                            std::size_t n_gallery_identities) {
  using detail::require;
  require(!ranks.empty(), ErrorCategory::empty_input, "CMC needs at least one rank");
  require(n_gallery_identities >= 1, ErrorCategory::empty_input, "CMC needs a nonempty gallery");
  std::vector<std::size_t> hits(n_gallery_identities, 0);
  for (std::size_t r : ranks) {
    require(r >= 1 && r <= n_gallery_identities, ErrorCategory::dimension,
            "rank " + std::to_string(r) + " outside [1, " + std::to_string(n_gallery_identities) +
                "]");
    ++hits[r - 1];
  }
  CmcCurve curve;
  curve.accuracy_at_rank.reserve(n_gallery_identities);
  std::size_t cumulative = 0;
  const auto total = static_cast<double>(ranks.size());
  for (std::size_t k = 0; k < n_gallery_identities; ++k) {
    cumulative += hits[k];
    curve.accuracy_at_rank.push_back(cumulative == ranks.size() ? 1.0 : cumulative / total);
  }
  return curve;
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // population convention, divisor = count
};

inline MeanStd population_mean_std(const std::vector<double>& values) {
  detail::require(!values.empty(), ErrorCategory::empty_input, "no values to summarize");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

}  // namespace stm
