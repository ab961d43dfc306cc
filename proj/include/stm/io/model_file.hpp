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

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <zlib.h>

#include "stm/shared_transform.hpp"

namespace stm::io {

// Layout, little-endian:
//   "STML" | u32 version | u64 body length L | u64 ~L |
//   body (L bytes): u32 len + tag | u32 len + provenance |
//   u32 n | f64 lambda1 lambda2 lambda3 | u64 tau max_iters | f64 rel_tol |
//   n*n f64 transform, row-major |
//   u32 CRC-32 of everything before it
// The length is stored twice (plain and complemented) so a short file can be
// told apart from a damaged header.
inline constexpr std::size_t kModelHeaderSize = 24;
inline constexpr char kModelMagic[4] = {'S', 'T', 'M', 'L'};
inline constexpr std::uint32_t kModelVersion = 1;

struct ModelFile {
  SharedTransformModel model;
  std::string provenance;  // run configuration echo, JSON
  std::size_t parameter_count = 0;  // transform entries stored in the payload
};

namespace detail {

class ByteWriter {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void u32(std::uint32_t v) { le(v); }
  void u64(std::uint64_t v) { le(v); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t>& buffer() { return buf_; }

 private:
  template <typename U>
  void le(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  ByteReader(const std::uint8_t* data, std::size_t size, std::string name)
      : data_(data), size_(size), name_(std::move(name)) {}

  void bytes(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, data_ + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() { return le<std::uint32_t>(); }
  std::uint64_t u64() { return le<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const {
    stm::detail::require(n <= size_ - pos_, ErrorCategory::format,
                         name_ + ": model file is truncated");
  }
  template <typename U>
  U le() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(data_[pos_ + i]) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
  std::string name_;
};

inline std::uint32_t crc32_of(const std::uint8_t* data, std::size_t n) {
  return static_cast<std::uint32_t>(::crc32(0L, data, static_cast<uInt>(n)));
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize_model(const SharedTransformModel& model,
                                                 const std::string& provenance = "") {
  detail::ByteWriter w;
  w.bytes(kModelMagic, sizeof kModelMagic);
  w.u32(kModelVersion);
  w.u64(0);
  w.u64(0);
  w.str(model.feature_space_tag());
  w.str(provenance);
  const auto n = model.feature_dim();
  w.u32(static_cast<std::uint32_t>(n));
  const HyperParams& h = model.hyper();
  w.f64(h.lambda1);
  w.f64(h.lambda2);
  w.f64(h.lambda3);
  w.u64(h.tau);
  w.u64(h.max_iters);
  w.f64(h.rel_tol);
  const RealMatrix& t = model.transform();
  for (Eigen::Index r = 0; r < t.rows(); ++r)
    for (Eigen::Index c = 0; c < t.cols(); ++c) w.f64(t(r, c));
  auto& buf = w.buffer();
  const std::uint64_t body = buf.size() - kModelHeaderSize;
  for (std::size_t i = 0; i < 8; ++i) {
    buf[8 + i] = static_cast<std::uint8_t>(body >> (8 * i));
    buf[16 + i] = static_cast<std::uint8_t>(~body >> (8 * i));
  }
  w.u32(detail::crc32_of(buf.data(), buf.size()));
  return std::move(buf);
}

inline ModelFile deserialize_model(const std::vector<std::uint8_t>& bytes,
                                   const std::string& name = "<model>") {
  using stm::detail::require;
  detail::ByteReader r(bytes.data(), bytes.size(), name);
  char magic[4];
  r.bytes(magic, sizeof magic);
  require(std::memcmp(magic, kModelMagic, sizeof magic) == 0, ErrorCategory::format,
          name + ": not a model file (bad magic)");
  const std::uint32_t version = r.u32();
  require(version == kModelVersion, ErrorCategory::version,
          name + ": unsupported model format version " + std::to_string(version) +
              " (this build reads version " + std::to_string(kModelVersion) + ")");
  const std::uint64_t declared = r.u64();
  require(r.u64() == ~declared, ErrorCategory::checksum,
          name + ": length header is damaged, file is corrupted");
  require(bytes.size() - kModelHeaderSize >= 4 && declared <= bytes.size() - kModelHeaderSize - 4,
          ErrorCategory::format,
          name + ": model file is truncated (" + std::to_string(bytes.size()) + " of " +
              std::to_string(declared + kModelHeaderSize + 4) + " bytes)");
  require(declared == bytes.size() - kModelHeaderSize - 4, ErrorCategory::format,
          name + ": unexpected trailing bytes after model payload");
  const std::size_t body = bytes.size() - 4;
  detail::ByteReader trailer(bytes.data() + body, 4, name);
  require(trailer.u32() == detail::crc32_of(bytes.data(), body), ErrorCategory::checksum,
          name + ": checksum mismatch, file is corrupted");

  std::string tag = r.str();
  std::string provenance = r.str();
  const std::uint32_t n = r.u32();
  require(n > 0, ErrorCategory::format, name + ": model dimension is zero");
  HyperParams h;
  h.lambda1 = r.f64();
  h.lambda2 = r.f64();
  h.lambda3 = r.f64();
  h.tau = r.u64();
  h.max_iters = r.u64();
  h.rel_tol = r.f64();
  const std::size_t entries = static_cast<std::size_t>(n) * n;
  require(body >= r.position() && (body - r.position()) == entries * 8, ErrorCategory::format,
          name + ": payload holds " + std::to_string((body - std::min(body, r.position())) / 8) +
              " values, expected " + std::to_string(entries));
  RealMatrix t(n, n);
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    for (Eigen::Index j = 0; j < t.cols(); ++j) t(i, j) = r.f64();
  return {SharedTransformModel(std::move(t), h, std::move(tag)), std::move(provenance), entries};
}

/// Writes to a sibling temporary and renames, so readers never see a
/// partially written model.
inline void save_model(const SharedTransformModel& model, const std::filesystem::path& path,
                       const std::string& provenance = "") {
  const auto bytes = serialize_model(model, provenance);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    stm::detail::require(static_cast<bool>(out), ErrorCategory::io,
                         "cannot write model " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    stm::detail::require(static_cast<bool>(out), ErrorCategory::io,
                         "failed writing model " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

inline ModelFile load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  stm::detail::require(static_cast<bool>(in), ErrorCategory::io,
                       "cannot open model " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return deserialize_model(bytes, path.string());
}

inline SharedTransformModel load_model(const std::filesystem::path& path) {
  return load_model_file(path).model;
}

}  // namespace stm::io
