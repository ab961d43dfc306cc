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

#include <vector>

#include "stm/features/image.hpp"

namespace stm {

struct AugmentationPolicy {
  bool flip = true;
  std::vector<int> brightness_deltas{25, -25};
  std::vector<double> contrast_factors{1.25, 0.8};

  static AugmentationPolicy none() { return {false, {}, {}}; }

  std::size_t variant_count() const {
    return (flip ? 2 : 1) * (1 + brightness_deltas.size() + contrast_factors.size());
  }

  bool operator==(const AugmentationPolicy&) const = default;
};

inline GrayImage adjust_brightness(const GrayImage& img, int delta) {
  GrayImage out = img;
  for (std::size_t y = 0; y < img.height(); ++y)
    for (std::size_t x = 0; x < img.width(); ++x)
      out.at(x, y) = clamp_pixel(static_cast<double>(img.at(x, y)) + delta);
  return out;
}

/// Scales intensities about mid-level 128, clamped to [0, 255].
inline GrayImage adjust_contrast(const GrayImage& img, double factor) {
  GrayImage out = img;
  for (std::size_t y = 0; y < img.height(); ++y)
    for (std::size_t x = 0; x < img.width(); ++x)
      out.at(x, y) = clamp_pixel(128.0 + factor * (static_cast<double>(img.at(x, y)) - 128.0));
  return out;
}

/// {original, mirror} x {identity, brightness deltas..., contrast factors...},
/// in that order. The first element is always the unmodified input.
inline std::vector<GrayImage> augment(const GrayImage& img, const AugmentationPolicy& policy) {
  std::vector<GrayImage> bases{img};
  if (policy.flip) bases.push_back(mirror_horizontal(img));

  std::vector<GrayImage> out;
  out.reserve(policy.variant_count());
  for (const auto& base : bases) {
    out.push_back(base);
    for (int d : policy.brightness_deltas) out.push_back(adjust_brightness(base, d));
    for (double f : policy.contrast_factors) out.push_back(adjust_contrast(base, f));
  }
  return out;
}

}  // namespace stm
