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

#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <sstream>
#include <string>

#include "stm/features/image.hpp"

namespace stm::io {

namespace detail {

inline std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

inline std::size_t parse_positive(const std::string& tok, const std::string& what) {
  std::size_t pos = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(tok, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  stm::detail::require(pos == tok.size() && !tok.empty() && v > 0, ErrorCategory::format,
                       "PGM header has invalid " + what + " '" + tok + "'");
  return v;
}

}  // namespace detail

/// Reads binary (P5) or ASCII (P2) 8-bit grayscale PGM. Colour formats are
/// rejected rather than converted.
inline GrayImage read_pgm(std::istream& in, const std::string& name = "<stream>") {
  const std::string magic = detail::next_token(in);
  if (magic == "P3" || magic == "P6") {
    stm::detail::fail(ErrorCategory::format, name + ": colour image rejected, grayscale required");
  }
  stm::detail::require(magic == "P5" || magic == "P2", ErrorCategory::format,
                       name + ": not a PGM image (magic '" + magic + "')");
  const std::size_t width = detail::parse_positive(detail::next_token(in), "width");
  const std::size_t height = detail::parse_positive(detail::next_token(in), "height");
  const std::size_t maxval = detail::parse_positive(detail::next_token(in), "maxval");
  stm::detail::require(maxval <= 255, ErrorCategory::format,
                       name + ": only 8-bit PGM is supported (maxval " + std::to_string(maxval) + ")");

  std::vector<std::uint8_t> pixels(width * height);
  if (magic == "P5") {
    // next_token consumed exactly one whitespace byte after maxval.
    in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    stm::detail::require(static_cast<std::size_t>(in.gcount()) == pixels.size(),
                         ErrorCategory::format, name + ": truncated pixel data");
  } else {
    for (auto& p : pixels) {
      const std::string tok = detail::next_token(in);
      stm::detail::require(!tok.empty(), ErrorCategory::format, name + ": truncated pixel data");
      std::size_t v = 0;
      try {
        v = std::stoul(tok);
      } catch (const std::exception&) {
        stm::detail::fail(ErrorCategory::format, name + ": bad pixel value '" + tok + "'");
      }
      stm::detail::require(v <= maxval, ErrorCategory::format, name + ": pixel exceeds maxval");
      p = static_cast<std::uint8_t>(v);
    }
  }
  if (maxval != 255) {
    for (auto& p : pixels) p = clamp_pixel(p * 255.0 / static_cast<double>(maxval));
  }
  return GrayImage(width, height, std::move(pixels));
}

inline GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  stm::detail::require(static_cast<bool>(in), ErrorCategory::io,
                       "cannot open image " + path.string());
  return read_pgm(in, path.string());
}

inline void write_pgm(std::ostream& out, const GrayImage& img) {
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels().data()),
            static_cast<std::streamsize>(img.pixels().size()));
}

inline void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  stm::detail::require(static_cast<bool>(out), ErrorCategory::io,
                       "cannot write image " + path.string());
  write_pgm(out, img);
  stm::detail::require(static_cast<bool>(out), ErrorCategory::io,
                       "failed writing image " + path.string());
}

}  // namespace stm::io
