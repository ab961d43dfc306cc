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
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "json.hpp"

#include "stm/evaluation/protocol.hpp"
#include "stm/features/augment.hpp"
#include "stm/features/extract.hpp"

namespace stm::io {

/// Everything a command needs to reproduce a run. Serialized verbatim into
/// every output artifact.
struct RunConfig {
  HyperParams hyper;
  InitPolicy init;
  FeatureSpec features = HogFeatures{};
  AugmentationPolicy augmentation;
  ProtocolConfig protocol;
  SyntheticConfig synthetic;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  stm::detail::require(j.is_object(), ErrorCategory::config, where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    stm::detail::require(allowed.contains(key), ErrorCategory::config,
                         "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    stm::detail::fail(ErrorCategory::config, where + "." + key + ": " + e.what());
  }
}

}  // namespace detail

inline nlohmann::json to_json(const FeatureSpec& spec) {
  if (const auto* r = std::get_if<RawFeatures>(&spec)) return {{"kind", "raw"}, {"size", r->size}};
  if (const auto* p = std::get_if<PrecomputedFeatures>(&spec))
    return {{"kind", "precomputed"}, {"dim", p->dim}};
  const auto& h = std::get<HogFeatures>(spec).params;
  return {{"kind", "hog"},           {"canonical_size", h.canonical_size},
          {"cell_size", h.cell_size}, {"block_size", h.block_size},
          {"block_stride", h.block_stride}, {"orientation_bins", h.orientation_bins},
          {"clip", h.clip}};
}

inline nlohmann::json to_json(const RunConfig& c) {
  const auto& h = c.hyper;
  const auto& s = c.synthetic;
  return {
      {"seed", c.seed},
      {"output_dir", c.output_dir},
      {"hyper",
       {{"lambda1", h.lambda1}, {"lambda2", h.lambda2}, {"lambda3", h.lambda3}, {"tau", h.tau},
        {"max_iters", h.max_iters}, {"rel_tol", h.rel_tol}}},
      {"init",
       {{"kind", c.init.kind == InitPolicy::Kind::Identity ? "identity" : "random_orthonormal"},
        {"seed", c.init.seed}}},
      {"features", to_json(c.features)},
      {"augmentation",
       {{"flip", c.augmentation.flip},
        {"brightness_deltas", c.augmentation.brightness_deltas},
        {"contrast_factors", c.augmentation.contrast_factors}}},
      {"protocol",
       {{"protocol", protocol_name(c.protocol.protocol)}, {"n_folds", c.protocol.n_folds},
        {"extended_gallery_manifest", c.protocol.extended_gallery_manifest},
        {"seed", c.protocol.seed}}},
      {"synthetic",
       {{"n_subjects", s.n_subjects}, {"latent_dim", s.latent_dim}, {"feature_dim", s.feature_dim},
        {"noise_sigma_skull", s.noise_sigma_skull}, {"noise_sigma_face", s.noise_sigma_face},
        {"shared_mixing", s.shared_mixing}, {"n_distractors", s.n_distractors}, {"seed", s.seed}}},
  };
}

/// Provenance string embedded in artifacts: compact JSON with sorted keys.
inline std::string provenance(const RunConfig& c) {
  auto j = to_json(c);
  j.erase("output_dir");  // where results go does not affect what they are
  return j.dump();
}

/// Missing keys keep their defaults; unknown keys are rejected. The top-level
/// seed also seeds fold assignment.
inline RunConfig config_from_json(const nlohmann::json& j) {
  using detail::check_keys;
  using detail::read_field;
  RunConfig c;
  check_keys(j, {"seed", "output_dir", "hyper", "init", "features", "augmentation", "protocol",
                 "synthetic"},
             "config");
  read_field(j, "seed", c.seed, "config");
  read_field(j, "output_dir", c.output_dir, "config");

  if (j.contains("hyper")) {
    const auto& h = j["hyper"];
    check_keys(h, {"lambda1", "lambda2", "lambda3", "tau", "max_iters", "rel_tol"}, "hyper");
    read_field(h, "lambda1", c.hyper.lambda1, "hyper");
    read_field(h, "lambda2", c.hyper.lambda2, "hyper");
    read_field(h, "lambda3", c.hyper.lambda3, "hyper");
    read_field(h, "tau", c.hyper.tau, "hyper");
    read_field(h, "max_iters", c.hyper.max_iters, "hyper");
    read_field(h, "rel_tol", c.hyper.rel_tol, "hyper");
  }
  if (j.contains("init")) {
    const auto& i = j["init"];
    check_keys(i, {"kind", "seed"}, "init");
    std::string kind = "identity";
    read_field(i, "kind", kind, "init");
    read_field(i, "seed", c.init.seed, "init");
    if (kind == "identity") c.init.kind = InitPolicy::Kind::Identity;
    else if (kind == "random_orthonormal") c.init.kind = InitPolicy::Kind::RandomOrthonormal;
    else stm::detail::fail(ErrorCategory::config, "init.kind must be identity or random_orthonormal");
  }
  if (j.contains("features")) {
    const auto& f = j["features"];
    std::string kind = "hog";
    read_field(f, "kind", kind, "features");
    if (kind == "raw") {
      check_keys(f, {"kind", "size"}, "features");
      RawFeatures r;
      read_field(f, "size", r.size, "features");
      stm::detail::require(r.size > 0, ErrorCategory::config, "features.size must be positive");
      c.features = r;
    } else if (kind == "hog") {
      check_keys(f, {"kind", "canonical_size", "cell_size", "block_size", "block_stride",
                     "orientation_bins", "clip"},
                 "features");
      HogParams p;
      read_field(f, "canonical_size", p.canonical_size, "features");
      read_field(f, "cell_size", p.cell_size, "features");
      read_field(f, "block_size", p.block_size, "features");
      read_field(f, "block_stride", p.block_stride, "features");
      read_field(f, "orientation_bins", p.orientation_bins, "features");
      read_field(f, "clip", p.clip, "features");
      p.validate();
      c.features = HogFeatures{p};
    } else if (kind == "precomputed") {
      check_keys(f, {"kind", "dim"}, "features");
      PrecomputedFeatures p;
      read_field(f, "dim", p.dim, "features");
      stm::detail::require(p.dim > 0, ErrorCategory::config, "features.dim must be positive");
      c.features = p;
    } else {
      stm::detail::fail(ErrorCategory::config, "features.kind must be raw, hog or precomputed");
    }
  }
  if (j.contains("augmentation")) {
    const auto& a = j["augmentation"];
    check_keys(a, {"flip", "brightness_deltas", "contrast_factors"}, "augmentation");
    read_field(a, "flip", c.augmentation.flip, "augmentation");
    read_field(a, "brightness_deltas", c.augmentation.brightness_deltas, "augmentation");
    read_field(a, "contrast_factors", c.augmentation.contrast_factors, "augmentation");
  }
  if (j.contains("protocol")) {
    const auto& p = j["protocol"];
    check_keys(p, {"protocol", "n_folds", "extended_gallery_manifest", "seed"}, "protocol");
    std::string name = "P1";
    read_field(p, "protocol", name, "protocol");
    stm::detail::require(name == "P1" || name == "P2", ErrorCategory::config,
                         "protocol.protocol must be P1 or P2");
    c.protocol.protocol = name == "P1" ? Protocol::P1 : Protocol::P2;
    read_field(p, "n_folds", c.protocol.n_folds, "protocol");
    read_field(p, "extended_gallery_manifest", c.protocol.extended_gallery_manifest, "protocol");
  }
  if (j.contains("synthetic")) {
    const auto& s = j["synthetic"];
    check_keys(s, {"n_subjects", "latent_dim", "feature_dim", "noise_sigma_skull",
                   "noise_sigma_face", "shared_mixing", "n_distractors", "seed"},
               "synthetic");
    auto& sc = c.synthetic;
    read_field(s, "n_subjects", sc.n_subjects, "synthetic");
    read_field(s, "latent_dim", sc.latent_dim, "synthetic");
    read_field(s, "feature_dim", sc.feature_dim, "synthetic");
    read_field(s, "noise_sigma_skull", sc.noise_sigma_skull, "synthetic");
    read_field(s, "noise_sigma_face", sc.noise_sigma_face, "synthetic");
    read_field(s, "shared_mixing", sc.shared_mixing, "synthetic");
    read_field(s, "n_distractors", sc.n_distractors, "synthetic");
    read_field(s, "seed", sc.seed, "synthetic");
  }
  c.protocol.seed = c.seed;
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  stm::detail::require(static_cast<bool>(in), ErrorCategory::io,
                       "cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    stm::detail::fail(ErrorCategory::config, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

/// Checks that are cheap and independent of data, run before any work.
inline void validate(const RunConfig& c) {
  using stm::detail::require;
  const auto& h = c.hyper;
  require(h.lambda1 > 0 && h.lambda2 > 0, ErrorCategory::config, "lambda1 and lambda2 must be positive");
  require(h.lambda3 >= 0, ErrorCategory::config, "lambda3 must be nonnegative");
  require(h.max_iters > 0 && h.rel_tol > 0, ErrorCategory::config,
          "max_iters and rel_tol must be positive");
  require(h.tau <= feature_dim(c.features), ErrorCategory::config,
          "tau exceeds the feature dimension " + std::to_string(feature_dim(c.features)));
  require(c.protocol.n_folds >= 2, ErrorCategory::config, "protocol.n_folds must be at least 2");
  for (double f : c.augmentation.contrast_factors)
    require(f >= 0 && std::isfinite(f), ErrorCategory::config, "contrast factors must be nonnegative");
}

}  // namespace stm::io
