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
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "stm/error.hpp"
#include "stm/rng.hpp"

namespace stm {

struct FoldSplit {
  std::size_t fold_index = 0;
  std::vector<std::string> train_subjects;
  std::vector<std::string> test_subjects;

  bool operator==(const FoldSplit&) const = default;
};

/// Seeded shuffle followed by a contiguous partition into n_folds test sets
/// whose sizes differ by at most one. Training subjects keep input order.
inline std::vector<FoldSplit> make_folds(const std::vector<std::string>& subjects,
                                         std::size_t n_folds, std::uint64_t seed) {
  using detail::require;
  require(n_folds >= 2, ErrorCategory::config,
          "cross validation needs at least 2 folds, got " + std::to_string(n_folds));
  require(n_folds <= subjects.size(), ErrorCategory::config,
          std::to_string(n_folds) + " folds requested for " + std::to_string(subjects.size()) +
              " subjects");
  require(std::set<std::string>(subjects.begin(), subjects.end()).size() == subjects.size(),
          ErrorCategory::manifest, "subject list contains duplicates");

  std::vector<std::string> order = subjects;
  Rng rng(seed);
  rng.shuffle(order);

  const std::size_t base = subjects.size() / n_folds;
  const std::size_t extra = subjects.size() % n_folds;
  std::vector<FoldSplit> folds;
  folds.reserve(n_folds);
  std::size_t offset = 0;
  for (std::size_t f = 0; f < n_folds; ++f) {
    const std::size_t count = base + (f < extra ? 1 : 0);
    FoldSplit split;
    split.fold_index = f;
    split.test_subjects.assign(order.begin() + static_cast<std::ptrdiff_t>(offset),
                               order.begin() + static_cast<std::ptrdiff_t>(offset + count));
    const std::set<std::string> test(split.test_subjects.begin(), split.test_subjects.end());
    for (const auto& s : subjects)
      if (!test.contains(s)) split.train_subjects.push_back(s);
    folds.push_back(std::move(split));
    offset += count;
  }
  return folds;
}

}  // namespace stm
