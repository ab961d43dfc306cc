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

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stm/io/csv.hpp"

namespace stm::io {

enum class Modality { Skull, Face, DistractorFace };

inline std::string modality_name(Modality m) {
  switch (m) {
    case Modality::Skull: return "skull";
    case Modality::Face: return "face";
    case Modality::DistractorFace: return "distractor_face";
  }
  return "?";
}

struct ManifestRecord {
  std::string subject_id;
  Modality modality;
  std::string image_path;
};

struct MatedPair {
  std::string subject_id;
  std::string skull_path;
  std::string face_path;
};

/// Validated listing of images. Paths are stored as written; resolve them
/// against base_dir.
struct DatasetManifest {
  static constexpr int format_version = 1;
  std::vector<ManifestRecord> records;
  std::vector<MatedPair> pairs;  // order of first appearance
  std::vector<ManifestRecord> distractors;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& p) const {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  }
};

/// Paired: every subject needs exactly one skull and one face.
/// Gallery: enrolment lists with face / distractor_face records only.
enum class ManifestKind { Paired, Gallery };

inline DatasetManifest parse_manifest(std::istream& in, const std::string& name = "<manifest>",
                                      ManifestKind kind = ManifestKind::Paired) {
  using stm::detail::fail;
  using stm::detail::require;
  auto where = [&](std::size_t line) { return name + ":" + std::to_string(line) + ": "; };

  std::vector<std::string> fields;
  std::size_t line = 0;
  require(read_csv_row(in, fields, line), ErrorCategory::manifest, name + ": empty manifest");
  if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
  require(fields == std::vector<std::string>{"subject_id", "modality", "image_path"},
          ErrorCategory::manifest,
          where(line) + "header must be 'subject_id,modality,image_path'");

  DatasetManifest m;
  std::set<std::string> paths;
  std::map<std::string, std::size_t> pair_index;
  std::map<std::string, std::pair<int, int>> counts;  // skull, face records per subject
  std::set<std::string> distractor_ids;

  while (read_csv_row(in, fields, line)) {
    if (fields.empty() || (fields.size() == 1 && fields[0].empty())) continue;
    require(fields.size() == 3, ErrorCategory::manifest,
            where(line) + "expected 3 fields, found " + std::to_string(fields.size()));
    ManifestRecord rec{fields[0], Modality::Face, fields[2]};
    require(!rec.subject_id.empty(), ErrorCategory::manifest, where(line) + "empty subject_id");
    require(!rec.image_path.empty(), ErrorCategory::manifest, where(line) + "empty image_path");
    if (fields[1] == "skull") rec.modality = Modality::Skull;
    else if (fields[1] == "face") rec.modality = Modality::Face;
    else if (fields[1] == "distractor_face") rec.modality = Modality::DistractorFace;
    else fail(ErrorCategory::manifest, where(line) + "unknown modality '" + fields[1] + "'");
    require(paths.insert(rec.image_path).second, ErrorCategory::manifest,
            where(line) + "duplicate image path '" + rec.image_path + "'");

    if (rec.modality == Modality::DistractorFace) {
      distractor_ids.insert(rec.subject_id);
      m.distractors.push_back(rec);
    } else if (kind == ManifestKind::Gallery) {
      require(rec.modality == Modality::Face, ErrorCategory::manifest,
              where(line) + "gallery manifests may only list face images");
      m.distractors.push_back(rec);
    } else {
      auto& [skulls, faces] = counts[rec.subject_id];
      if (rec.modality == Modality::Skull) {
        require(++skulls == 1, ErrorCategory::manifest,
                where(line) + "subject '" + rec.subject_id + "' has more than one skull record");
      } else {
        require(++faces == 1, ErrorCategory::manifest,
                where(line) + "subject '" + rec.subject_id + "' has more than one face record");
      }
      auto [it, inserted] = pair_index.try_emplace(rec.subject_id, m.pairs.size());
      if (inserted) m.pairs.push_back({rec.subject_id, "", ""});
      auto& pair = m.pairs[it->second];
      (rec.modality == Modality::Skull ? pair.skull_path : pair.face_path) = rec.image_path;
    }
    m.records.push_back(std::move(rec));
  }

  for (const auto& p : m.pairs) {
    require(!p.skull_path.empty(), ErrorCategory::manifest,
            name + ": subject '" + p.subject_id + "' has no skull record (missing mate)");
    require(!p.face_path.empty(), ErrorCategory::manifest,
            name + ": subject '" + p.subject_id + "' has no face record (missing mate)");
    require(!distractor_ids.contains(p.subject_id), ErrorCategory::manifest,
            name + ": distractor subject '" + p.subject_id + "' collides with a mated subject");
  }
  return m;
}

inline DatasetManifest parse_manifest(const std::filesystem::path& path,
                                      ManifestKind kind = ManifestKind::Paired) {
  std::ifstream in(path, std::ios::binary);
  stm::detail::require(static_cast<bool>(in), ErrorCategory::io,
                       "cannot open manifest " + path.string());
  DatasetManifest m = parse_manifest(in, path.string(), kind);
  m.base_dir = path.parent_path();
  return m;
}

inline void write_manifest(std::ostream& out, const std::vector<ManifestRecord>& records) {
  write_csv_row(out, {"subject_id", "modality", "image_path"});
  for (const auto& r : records) write_csv_row(out, {r.subject_id, modality_name(r.modality), r.image_path});
}

}  // namespace stm::io
