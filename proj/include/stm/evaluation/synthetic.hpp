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

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "stm/rng.hpp"
#include "stm/types.hpp"

namespace stm {

/// Two linear views of a shared low-dimensional latent identity.
struct SyntheticConfig {
  std::size_t n_subjects = 40;
  std::size_t latent_dim = 8;
  std::size_t feature_dim = 32;
  double noise_sigma_skull = 0.05;
  double noise_sigma_face = 0.05;
  bool shared_mixing = false;  // use one mixing matrix for both domains
  std::size_t n_distractors = 0;
  std::uint64_t seed = 7;

  bool operator==(const SyntheticConfig&) const = default;
};

struct SyntheticData {
  RealMatrix skull;  // feature_dim x n_subjects
  RealMatrix face;   // feature_dim x n_subjects
  std::vector<std::string> labels;
  RealMatrix distractor_faces;  // feature_dim x n_distractors
  std::vector<std::string> distractor_labels;
};

inline std::string numbered_label(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%03zu", prefix, i);
  return buf;
}

/// Draws the mixing matrices, then per subject a latent vector and one
/// noisy observation per domain. Every column is scaled to unit length.
inline SyntheticData synth_generate(const SyntheticConfig& cfg) {
  using detail::require;
  require(cfg.n_subjects >= 1 && cfg.latent_dim >= 1, ErrorCategory::config,
          "synthetic config needs subjects and a latent dimension");
  require(cfg.latent_dim <= cfg.feature_dim, ErrorCategory::config,
          "latent dimension " + std::to_string(cfg.latent_dim) + " exceeds feature dimension " +
              std::to_string(cfg.feature_dim));
  require(cfg.noise_sigma_skull >= 0 && cfg.noise_sigma_face >= 0, ErrorCategory::config,
          "noise sigma must be nonnegative");

  const auto n = static_cast<Eigen::Index>(cfg.feature_dim);
  const auto k = static_cast<Eigen::Index>(cfg.latent_dim);
  Rng rng(cfg.seed);
  const RealMatrix mix_skull = gaussian_matrix(n, k, rng);
  const RealMatrix mix_face = cfg.shared_mixing ? mix_skull : gaussian_matrix(n, k, rng);
  for (const RealMatrix* m : {&mix_skull, &mix_face}) {
    require(Eigen::ColPivHouseholderQR<RealMatrix>(*m).rank() == k, ErrorCategory::numeric,
            "mixing matrix is rank deficient; choose another seed");
  }

  auto observe = [&](const RealMatrix& mix, const RealVector& z, double sigma) {
    RealVector noise(n);
    for (Eigen::Index i = 0; i < n; ++i) noise(i) = rng.normal();
    RealVector x = mix * z + sigma * noise;
    const double norm = x.norm();
    if (norm > 0) x /= norm;
    return x;
  };
  auto latent = [&] {
    RealVector z(k);
    for (Eigen::Index i = 0; i < k; ++i) z(i) = rng.normal();
    return z;
  };

  SyntheticData data;
  const auto subjects = static_cast<Eigen::Index>(cfg.n_subjects);
  data.skull.resize(n, subjects);
  data.face.resize(n, subjects);
  for (Eigen::Index s = 0; s < subjects; ++s) {
    const RealVector z = latent();
    data.skull.col(s) = observe(mix_skull, z, cfg.noise_sigma_skull);
    data.face.col(s) = observe(mix_face, z, cfg.noise_sigma_face);
    data.labels.push_back(numbered_label("s", static_cast<std::size_t>(s)));
  }
  data.distractor_faces.resize(n, static_cast<Eigen::Index>(cfg.n_distractors));
  for (std::size_t d = 0; d < cfg.n_distractors; ++d) {
    const RealVector z = latent();
    data.distractor_faces.col(static_cast<Eigen::Index>(d)) =
        observe(mix_face, z, cfg.noise_sigma_face);
    data.distractor_labels.push_back(numbered_label("d", d));
  }
  return data;
}

}  // namespace stm
