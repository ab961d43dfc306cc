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
#include <numbers>
#include <string>
#include <vector>

#include "stm/features/image.hpp"
#include "stm/types.hpp"

namespace stm {

struct HogParams {
  std::size_t cell_size = 8;       // pixels per cell side
  std::size_t block_size = 2;      // cells per block side
  std::size_t block_stride = 1;    // cells
  std::size_t orientation_bins = 9;  // over 0..180 degrees
  double clip = 0.2;
  std::size_t canonical_size = 64;

  bool operator==(const HogParams&) const = default;

  void validate() const {
    using detail::require;
    require(cell_size > 0 && canonical_size > 0, ErrorCategory::config,
            "HOG cell and canonical sizes must be positive");
    require(canonical_size % cell_size == 0, ErrorCategory::config,
            "canonical size " + std::to_string(canonical_size) + " is not divisible by cell size " +
                std::to_string(cell_size));
    require(block_size > 0 && block_size <= cells_per_side(), ErrorCategory::config,
            "HOG block size must be between 1 and the cell count per side");
    require(block_stride > 0, ErrorCategory::config, "HOG block stride must be positive");
    require(orientation_bins > 0, ErrorCategory::config, "HOG needs at least one orientation bin");
    require(clip > 0 && std::isfinite(clip), ErrorCategory::config, "HOG clip must be positive");
  }

  std::size_t cells_per_side() const { return canonical_size / cell_size; }
  std::size_t blocks_per_side() const {
    return (cells_per_side() - block_size) / block_stride + 1;
  }
  std::size_t block_length() const { return block_size * block_size * orientation_bins; }
  std::size_t descriptor_length() const {
    return blocks_per_side() * blocks_per_side() * block_length();
  }
};

/// Per-cell orientation histograms, laid out [cell_y][cell_x][bin].
///
/// Gradients use centered (-1, 0, 1) differences with edge replication.
/// Orientation is unsigned; bin b is centred on b * 180 / bins degrees and
/// each pixel splits its magnitude linearly between the two nearest bins.
inline std::vector<double> hog_cell_histograms(const GrayImage& img, const HogParams& p) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const std::size_t cells = p.cells_per_side();
  const double bin_width = 180.0 / static_cast<double>(p.orientation_bins);
  std::vector<double> hist(cells * cells * p.orientation_bins, 0.0);

  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double gx = static_cast<double>(img.at(x + 1 < w ? x + 1 : x, y)) -
                        static_cast<double>(img.at(x > 0 ? x - 1 : x, y));
      const double gy = static_cast<double>(img.at(x, y + 1 < h ? y + 1 : y)) -
                        static_cast<double>(img.at(x, y > 0 ? y - 1 : y));
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      if (angle < 0.0) angle += 180.0;
      if (angle >= 180.0) angle -= 180.0;

      const double pos = angle / bin_width;
      const auto lower = static_cast<std::size_t>(std::floor(pos));
      const double frac = pos - static_cast<double>(lower);
      const std::size_t b0 = lower % p.orientation_bins;
      const std::size_t b1 = (b0 + 1) % p.orientation_bins;

      double* cell = &hist[((y / p.cell_size) * cells + x / p.cell_size) * p.orientation_bins];
      cell[b0] += mag * (1.0 - frac);
      cell[b1] += mag * frac;
    }
  }
  return hist;
}

namespace detail {

inline void l2_normalize(std::vector<double>::iterator first, std::vector<double>::iterator last) {
  double ss = 0.0;
  for (auto it = first; it != last; ++it) ss += *it * *it;
  if (ss == 0.0) return;  // zero-energy blocks stay zero
  const double inv = 1.0 / std::sqrt(ss);
  for (auto it = first; it != last; ++it) *it *= inv;
}

}  // namespace detail

/// HOG descriptor of img after resizing to the canonical square size.
/// Blocks are L2-Hys normalized and concatenated row-major.
inline RealVector extract_hog(const GrayImage& img, const HogParams& p = {}) {
  p.validate();
  const GrayImage canon = resize_to_canonical(img, p.canonical_size);
  const std::vector<double> hist = hog_cell_histograms(canon, p);

  const std::size_t cells = p.cells_per_side();
  const std::size_t blocks = p.blocks_per_side();
  const std::size_t bins = p.orientation_bins;
  std::vector<double> out;
  out.reserve(p.descriptor_length());
  std::vector<double> block(p.block_length());

  for (std::size_t by = 0; by < blocks; ++by) {
    for (std::size_t bx = 0; bx < blocks; ++bx) {
      auto dst = block.begin();
      for (std::size_t cy = 0; cy < p.block_size; ++cy) {
        for (std::size_t cx = 0; cx < p.block_size; ++cx) {
          const std::size_t cell = (by * p.block_stride + cy) * cells + bx * p.block_stride + cx;
          dst = std::copy_n(hist.begin() + static_cast<std::ptrdiff_t>(cell * bins), bins, dst);
        }
      }
      detail::l2_normalize(block.begin(), block.end());
      for (double& v : block) v = std::min(v, p.clip);
      detail::l2_normalize(block.begin(), block.end());
      out.insert(out.end(), block.begin(), block.end());
    }
  }
  return Eigen::Map<const RealVector>(out.data(), static_cast<Eigen::Index>(out.size()));
}

}  // namespace stm
