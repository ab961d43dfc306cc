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
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stm/evaluation/cmc.hpp"
#include "stm/evaluation/folds.hpp"
#include "stm/evaluation/synthetic.hpp"
#include "stm/identification.hpp"

namespace stm {

enum class Protocol { P1, P2 };

inline std::string protocol_name(Protocol p) { return p == Protocol::P1 ? "P1" : "P2"; }

struct ProtocolConfig {
  Protocol protocol = Protocol::P1;
  std::size_t n_folds = 5;
  std::string extended_gallery_manifest;  // required for P2 at the file level
  std::uint64_t seed = 0;

  bool operator==(const ProtocolConfig&) const = default;
};

/// Feature vectors for one mated subject. Index 0 of each list is the
/// unmodified image; later entries are training-only augmentations, and
/// skull[j] is paired with face[j].
struct SubjectSamples {
  std::string id;
  std::vector<RealVector> skull;
  std::vector<RealVector> face;
};

struct ProtocolData {
  std::vector<SubjectSamples> mated;
  std::vector<std::string> distractor_ids;
  std::vector<RealVector> distractor_faces;
  std::string feature_space_tag;
};

struct FoldResult {
  std::size_t fold_index = 0;
  std::vector<std::string> test_subjects;
  std::vector<std::size_t> ranks;  // per test subject, same order
  std::size_t gallery_identities = 0;
  std::size_t training_pairs = 0;
  CmcCurve cmc;
  double rank1 = 0.0;
  double rank5 = 0.0;
  FitReport fit;
};

struct EvalReport {
  ProtocolConfig config;
  HyperParams hyper;
  std::string feature_space_tag;
  std::size_t extended_gallery_size = 0;
  std::vector<FoldResult> folds;
  MeanStd rank1;
  MeanStd rank5;
  static constexpr const char* stddev_convention = "population";
};

/// Wraps unaugmented synthetic matrices as protocol input.
inline ProtocolData to_protocol_data(const SyntheticData& data, std::string feature_space_tag) {
  ProtocolData out;
  out.feature_space_tag = std::move(feature_space_tag);
  for (Eigen::Index c = 0; c < data.skull.cols(); ++c) {
    out.mated.push_back({data.labels[static_cast<std::size_t>(c)],
                         {data.skull.col(c)},
                         {data.face.col(c)}});
  }
  for (Eigen::Index c = 0; c < data.distractor_faces.cols(); ++c) {
    out.distractor_ids.push_back(data.distractor_labels[static_cast<std::size_t>(c)]);
    out.distractor_faces.push_back(data.distractor_faces.col(c));
  }
  return out;
}

namespace detail {

inline void validate_protocol_data(const ProtocolData& data) {
  require(!data.mated.empty(), ErrorCategory::empty_input, "no mated pairs");
  require(data.distractor_ids.size() == data.distractor_faces.size(), ErrorCategory::dimension,
          "distractor labels and features differ in count");
  std::set<std::string> ids;
  Eigen::Index dim = -1;
  auto check_dim = [&](const RealVector& v, const std::string& who) {
    if (dim < 0) dim = v.size();
    require(v.size() == dim && dim > 0, ErrorCategory::feature_space,
            "feature length mismatch for subject " + who);
  };
  for (const auto& s : data.mated) {
    require(ids.insert(s.id).second, ErrorCategory::manifest, "duplicate mated subject " + s.id);
    require(!s.skull.empty() && !s.face.empty(), ErrorCategory::pairing,
            "subject " + s.id + " is missing a skull or face sample");
    for (const auto& v : s.skull) check_dim(v, s.id);
    for (const auto& v : s.face) check_dim(v, s.id);
  }
  for (std::size_t i = 0; i < data.distractor_ids.size(); ++i) {
    require(!ids.contains(data.distractor_ids[i]), ErrorCategory::manifest,
            "distractor identity " + data.distractor_ids[i] + " collides with a mated subject");
    check_dim(data.distractor_faces[i], data.distractor_ids[i]);
  }
}

}  // namespace detail

/// Cross-validated closed-set identification.
///
/// Per fold: fit on every (skull[j], face[j]) pair of the training subjects,
/// enrol the test subjects' unmodified faces (plus every distractor face
/// under P2), rank each test subject's unmodified skull and summarize the
/// ranks as a CMC curve.
inline EvalReport run_protocol(const ProtocolData& data, const ProtocolConfig& config,
                               const HyperParams& hyper, const InitPolicy& init = {}) {
  detail::validate_protocol_data(data);

  std::vector<std::string> subjects;
  std::map<std::string, const SubjectSamples*> by_id;
  for (const auto& s : data.mated) {
    subjects.push_back(s.id);
    by_id[s.id] = &s;
  }
  const auto folds = make_folds(subjects, config.n_folds, config.seed);
  const Eigen::Index n = data.mated.front().skull.front().size();
  const bool extended = config.protocol == Protocol::P2;

  EvalReport report;
  report.config = config;
  report.feature_space_tag = data.feature_space_tag;
  report.extended_gallery_size = extended ? data.distractor_faces.size() : 0;

  std::vector<double> rank1s;
  std::vector<double> rank5s;
  for (const auto& split : folds) {
    std::vector<std::pair<const RealVector*, const RealVector*>> pairs;
    for (const auto& id : split.train_subjects) {
      const auto& s = *by_id.at(id);
      for (std::size_t j = 0; j < std::min(s.skull.size(), s.face.size()); ++j)
        pairs.emplace_back(&s.skull[j], &s.face[j]);
    }
    RealMatrix xs(n, static_cast<Eigen::Index>(pairs.size()));
    RealMatrix xd(n, static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      xs.col(static_cast<Eigen::Index>(i)) = *pairs[i].first;
      xd.col(static_cast<Eigen::Index>(i)) = *pairs[i].second;
    }
    auto [model, fit_report] = fit(xs, xd, hyper, init, data.feature_space_tag);
    report.hyper = model.hyper();

    const std::size_t enrolled =
        split.test_subjects.size() + (extended ? data.distractor_faces.size() : 0);
    RealMatrix gallery_x(n, static_cast<Eigen::Index>(enrolled));
    std::vector<std::string> labels;
    Eigen::Index col = 0;
    for (const auto& id : split.test_subjects) {
      gallery_x.col(col++) = by_id.at(id)->face.front();
      labels.push_back(id);
    }
    if (extended) {
      for (std::size_t i = 0; i < data.distractor_faces.size(); ++i) {
        gallery_x.col(col++) = data.distractor_faces[i];
        labels.push_back(data.distractor_ids[i]);
      }
    }
    const Gallery gallery = build_gallery(model, gallery_x, std::move(labels));

    FoldResult fold;
    fold.fold_index = split.fold_index;
    fold.test_subjects = split.test_subjects;
    fold.gallery_identities = gallery.identity_count();
    fold.training_pairs = pairs.size();
    for (const auto& id : split.test_subjects) {
      const RankedList ranked = identify(model, by_id.at(id)->skull.front(), gallery);
      fold.ranks.push_back(rank_of_true_match(ranked, id));
    }
    fold.cmc = compute_cmc(fold.ranks, fold.gallery_identities);
    fold.rank1 = fold.cmc.at(1);
    fold.rank5 = fold.cmc.at(5);
    fold.fit = std::move(fit_report);
    rank1s.push_back(fold.rank1);
    rank5s.push_back(fold.rank5);
    report.folds.push_back(std::move(fold));
  }
  report.rank1 = population_mean_std(rank1s);
  report.rank5 = population_mean_std(rank5s);
  return report;
}

}  // namespace stm
