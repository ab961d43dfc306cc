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
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stm/error.hpp"

namespace stm {

/// 8-bit grayscale image, row-major.
class GrayImage {
 public:
  GrayImage(std::size_t width, std::size_t height, std::uint8_t fill = 0)
      : GrayImage(width, height, std::vector<std::uint8_t>(width * height, fill)) {}

  GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    detail::require(width_ > 0 && height_ > 0, ErrorCategory::empty_input,
                    "image dimensions must be positive");
    detail::require(pixels_.size() == width_ * height_, ErrorCategory::dimension,
                    "pixel buffer size does not match " + std::to_string(width_) + "x" +
                        std::to_string(height_));
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }

  std::uint8_t at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
  std::uint8_t& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }

  bool operator==(const GrayImage&) const = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> pixels_;
};

inline std::uint8_t clamp_pixel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

/// Bilinear resize with corner-aligned sampling: output corners sample the
/// input corners exactly.
inline GrayImage resize_to_canonical(const GrayImage& img, std::size_t width, std::size_t height) {
  detail::require(width > 0 && height > 0, ErrorCategory::empty_input,
                  "target size must be positive");
  if (img.width() == width && img.height() == height) return img;

  auto scale = [](std::size_t src, std::size_t dst) {
    return dst > 1 ? static_cast<double>(src - 1) / static_cast<double>(dst - 1) : 0.0;
  };
  const double sx = scale(img.width(), width);
  const double sy = scale(img.height(), height);

  GrayImage out(width, height);
  for (std::size_t y = 0; y < height; ++y) {
    const double fy = static_cast<double>(y) * sy;
    const auto y0 = std::min(static_cast<std::size_t>(fy), img.height() - 1);
    const auto y1 = std::min(y0 + 1, img.height() - 1);
    const double wy = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < width; ++x) {
      const double fx = static_cast<double>(x) * sx;
      const auto x0 = std::min(static_cast<std::size_t>(fx), img.width() - 1);
      const auto x1 = std::min(x0 + 1, img.width() - 1);
      const double wx = fx - static_cast<double>(x0);
      const double top = (1.0 - wx) * img.at(x0, y0) + wx * img.at(x1, y0);
      const double bottom = (1.0 - wx) * img.at(x0, y1) + wx * img.at(x1, y1);
      out.at(x, y) = clamp_pixel((1.0 - wy) * top + wy * bottom);
    }
  }
  return out;
}

inline GrayImage resize_to_canonical(const GrayImage& img, std::size_t size) {
  return resize_to_canonical(img, size, size);
}

inline GrayImage mirror_horizontal(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (std::size_t y = 0; y < img.height(); ++y)
    for (std::size_t x = 0; x < img.width(); ++x) out.at(img.width() - 1 - x, y) = img.at(x, y);
  return out;
}

}  // namespace stm
