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

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stm/evaluation/protocol.hpp"
#include "stm/features/augment.hpp"
#include "stm/features/extract.hpp"
#include "stm/io/csv.hpp"
#include "stm/io/manifest.hpp"
#include "stm/io/pgm.hpp"

namespace stm::io {

/// Feature files hold one value per line in shortest round-trip form.
inline void write_feature_file(const std::filesystem::path& path, const RealVector& v) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  stm::detail::require(static_cast<bool>(out), ErrorCategory::io,
                       "cannot write feature file " + path.string());
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v(i)) << '\n';
}

/// Accepts whitespace- or comma-separated values.
inline RealVector read_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  stm::detail::require(static_cast<bool>(in), ErrorCategory::io,
                       "cannot open feature file " + path.string());
  std::vector<double> values;
  std::string tok;
  char c;
  auto flush = [&] {
    if (tok.empty()) return;
    double v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    stm::detail::require(res.ec == std::errc{} && res.ptr == tok.data() + tok.size(),
                         ErrorCategory::format,
                         path.string() + ": bad feature value '" + tok + "'");
    stm::detail::require(std::isfinite(v), ErrorCategory::numeric_input,
                         path.string() + ": non-finite feature value");
    values.push_back(v);
    tok.clear();
  };
  while (in.get(c)) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) flush();
    else tok += c;
  }
  flush();
  stm::detail::require(!values.empty(), ErrorCategory::format, path.string() + ": no feature values");
  return Eigen::Map<const RealVector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline bool is_feature_file(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  return ext == ".feat" || ext == ".txt" || ext == ".csv";
}

/// Loads one input as its list of feature vectors: the unmodified input
/// first, then augmented variants when `augmentation` is given. Feature files
/// are used as stored and never augmented.
inline std::vector<RealVector> load_samples(const std::filesystem::path& path,
                                            const FeatureSpec& spec,
                                            const AugmentationPolicy* augmentation) {
  std::vector<RealVector> out;
  if (!is_image_based(spec)) {
    RealVector v = read_feature_file(path);
    const auto dim = std::get<PrecomputedFeatures>(spec).dim;
    stm::detail::require(static_cast<std::size_t>(v.size()) == dim, ErrorCategory::feature_space,
                         path.string() + ": " + std::to_string(v.size()) +
                             " values but the feature space expects " + std::to_string(dim));
    out.push_back(std::move(v));
    return out;
  }
  stm::detail::require(!is_feature_file(path), ErrorCategory::feature_space,
                       path.string() + ": feature file given but the feature space is image based");
  const GrayImage img = read_pgm(path);
  if (augmentation == nullptr) {
    out.push_back(extract(img, spec));
    return out;
  }
  for (const auto& variant : augment(img, *augmentation)) out.push_back(extract(variant, spec));
  return out;
}

/// Extracts features for every mated pair (with training augmentation) and
/// every distractor face (unaugmented).
inline ProtocolData load_protocol_data(const DatasetManifest& manifest, const FeatureSpec& spec,
                                       const AugmentationPolicy& augmentation,
                                       const DatasetManifest* extended = nullptr) {
  ProtocolData data;
  data.feature_space_tag = feature_space_tag(spec);
  for (const auto& pair : manifest.pairs) {
    data.mated.push_back({pair.subject_id,
                          load_samples(manifest.resolve(pair.skull_path), spec, &augmentation),
                          load_samples(manifest.resolve(pair.face_path), spec, &augmentation)});
  }
  auto add_distractors = [&](const DatasetManifest& m) {
    for (const auto& rec : m.distractors) {
      data.distractor_ids.push_back(rec.subject_id);
      data.distractor_faces.push_back(load_samples(m.resolve(rec.image_path), spec, nullptr).front());
    }
  };
  add_distractors(manifest);
  if (extended != nullptr) add_distractors(*extended);
  return data;
}

/// Every path the manifest references, resolved; used to fail fast before
/// any computation.
inline void require_inputs_exist(const DatasetManifest& m) {
  for (const auto& r : m.records) {
    const auto p = m.resolve(r.image_path);
    stm::detail::require(std::filesystem::is_regular_file(p), ErrorCategory::io,
                         "missing input file " + p.string());
  }
}

}  // namespace stm::io
