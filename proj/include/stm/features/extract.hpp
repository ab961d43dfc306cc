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
#include <string>
#include <variant>
#include <vector>

#include "stm/features/hog.hpp"
#include "stm/features/image.hpp"

namespace stm {

/// Resized intensities scaled to [0, 1], flattened row-major.
inline RealVector extract_raw(const GrayImage& img, std::size_t size = 64) {
  const GrayImage canon = resize_to_canonical(img, size);
  RealVector v(static_cast<Eigen::Index>(size * size));
  for (std::size_t i = 0; i < canon.pixels().size(); ++i)
    v(static_cast<Eigen::Index>(i)) = canon.pixels()[i] / 255.0;
  return v;
}

struct RawFeatures {
  std::size_t size = 64;
  bool operator==(const RawFeatures&) const = default;
};

struct HogFeatures {
  HogParams params;
  bool operator==(const HogFeatures&) const = default;
};

/// Vectors read from feature files rather than computed from images.
struct PrecomputedFeatures {
  std::size_t dim = 0;
  bool operator==(const PrecomputedFeatures&) const = default;
};

using FeatureSpec = std::variant<RawFeatures, HogFeatures, PrecomputedFeatures>;

inline std::size_t feature_dim(const FeatureSpec& spec) {
  struct {
    std::size_t operator()(const RawFeatures& r) const { return r.size * r.size; }
    std::size_t operator()(const HogFeatures& h) const { return h.params.descriptor_length(); }
    std::size_t operator()(const PrecomputedFeatures& p) const { return p.dim; }
  } visitor;
  return std::visit(visitor, spec);
}

inline bool is_image_based(const FeatureSpec& spec) {
  return !std::holds_alternative<PrecomputedFeatures>(spec);
}

/// Canonical text label, e.g. "raw:64" or "hog:64:8:2:1:9:0.2". Models and
/// galleries carry it so mismatched feature spaces are caught at load time.
inline std::string feature_space_tag(const FeatureSpec& spec) {
  if (const auto* r = std::get_if<RawFeatures>(&spec)) return "raw:" + std::to_string(r->size);
  if (const auto* p = std::get_if<PrecomputedFeatures>(&spec))
    return "precomputed:" + std::to_string(p->dim);
  const auto& h = std::get<HogFeatures>(spec).params;
  char clip[32];
  const auto res = std::to_chars(clip, clip + sizeof clip, h.clip);
  return "hog:" + std::to_string(h.canonical_size) + ":" + std::to_string(h.cell_size) + ":" +
         std::to_string(h.block_size) + ":" + std::to_string(h.block_stride) + ":" +
         std::to_string(h.orientation_bins) + ":" + std::string(clip, res.ptr);
}

inline FeatureSpec parse_feature_space_tag(const std::string& tag) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= tag.size(); ++i) {
    if (i == tag.size() || tag[i] == ':') {
      parts.push_back(tag.substr(start, i - start));
      start = i + 1;
    }
  }
  auto num = [&](const std::string& s) -> std::size_t {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    detail::require(res.ec == std::errc{} && res.ptr == s.data() + s.size(),
                    ErrorCategory::feature_space, "bad feature space tag '" + tag + "'");
    return v;
  };
  if (parts.size() == 2 && parts[0] == "raw") return RawFeatures{num(parts[1])};
  if (parts.size() == 2 && parts[0] == "precomputed") return PrecomputedFeatures{num(parts[1])};
  if (parts.size() == 7 && parts[0] == "hog") {
    HogParams h;
    h.canonical_size = num(parts[1]);
    h.cell_size = num(parts[2]);
    h.block_size = num(parts[3]);
    h.block_stride = num(parts[4]);
    h.orientation_bins = num(parts[5]);
    const auto res = std::from_chars(parts[6].data(), parts[6].data() + parts[6].size(), h.clip);
    detail::require(res.ec == std::errc{} && res.ptr == parts[6].data() + parts[6].size(),
                    ErrorCategory::feature_space, "bad feature space tag '" + tag + "'");
    return HogFeatures{h};
  }
  detail::fail(ErrorCategory::feature_space, "unrecognized feature space tag '" + tag + "'");
}

inline RealVector extract(const GrayImage& img, const FeatureSpec& spec) {
  if (const auto* r = std::get_if<RawFeatures>(&spec)) return extract_raw(img, r->size);
  if (const auto* h = std::get_if<HogFeatures>(&spec)) return extract_hog(img, h->params);
  detail::fail(ErrorCategory::feature_space,
               "precomputed feature space cannot extract from images");
}

}  // namespace stm
