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
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "stm/evaluation/protocol.hpp"
#include "stm/identification.hpp"
#include "stm/io/csv.hpp"

namespace stm::io {

// Every CSV carries a trailing run_config column. Only the first data row
// fills it, which keeps the files valid CSV and the provenance in one place.

namespace detail {

class CsvTable {
 public:
  CsvTable(std::ostream& out, std::vector<std::string> header, std::string provenance)
      : out_(out), provenance_(std::move(provenance)) {
    header.emplace_back("run_config");
    write_csv_row(out_, header);
  }

  void row(std::vector<std::string> fields) {
    fields.push_back(first_ ? provenance_ : std::string());
    first_ = false;
    write_csv_row(out_, fields);
  }

 private:
  std::ostream& out_;
  std::string provenance_;
  bool first_ = true;
};

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  stm::detail::require(static_cast<bool>(out), ErrorCategory::io,
                       "cannot write " + path.string());
  return out;
}

}  // namespace detail

/// protocol, fold, rank1, rank5 per fold, then a mean row and a population
/// standard deviation row.
inline void write_summary_csv(std::ostream& out, const EvalReport& report,
                              const std::string& provenance) {
  detail::CsvTable t(out, {"protocol", "fold", "rank1", "rank5"}, provenance);
  const std::string p = protocol_name(report.config.protocol);
  for (const auto& f : report.folds) {
    t.row({p, std::to_string(f.fold_index), format_double(f.rank1), format_double(f.rank5)});
  }
  t.row({p, "mean", format_double(report.rank1.mean), format_double(report.rank5.mean)});
  t.row({p, std::string("std_") + EvalReport::stddev_convention,
         format_double(report.rank1.stddev), format_double(report.rank5.stddev)});
}

/// Plot-ready CMC points, one (rank, accuracy) row per fold and rank.
inline void write_cmc_csv(std::ostream& out, const EvalReport& report, const std::string& provenance) {
  detail::CsvTable t(out, {"fold", "rank", "accuracy"}, provenance);
  for (const auto& f : report.folds) {
    for (std::size_t k = 0; k < f.cmc.size(); ++k) {
      t.row({std::to_string(f.fold_index), std::to_string(k + 1),
             format_double(f.cmc.accuracy_at_rank[k])});
    }
  }
}

inline void write_fit_report_csv(std::ostream& out, const FitReport& report,
                                 const std::string& provenance) {
  detail::CsvTable t(out, {"iteration", "objective", "converged"}, provenance);
  t.row({"0", format_double(report.initial_objective), "false"});
  for (std::size_t i = 0; i < report.objective_trace.size(); ++i) {
    const bool last = i + 1 == report.objective_trace.size();
    t.row({std::to_string(i + 1), format_double(report.objective_trace[i]),
           last && report.converged ? "true" : "false"});
  }
}

/// Per-fold fit traces for an evaluation run.
inline void write_fold_fits_csv(std::ostream& out, const EvalReport& report,
                                const std::string& provenance) {
  detail::CsvTable t(out, {"fold", "iteration", "objective"}, provenance);
  for (const auto& f : report.folds) {
    t.row({std::to_string(f.fold_index), "0", format_double(f.fit.initial_objective)});
    for (std::size_t i = 0; i < f.fit.objective_trace.size(); ++i)
      t.row({std::to_string(f.fold_index), std::to_string(i + 1),
             format_double(f.fit.objective_trace[i])});
  }
}

inline void write_ranked_csv(std::ostream& out, const RankedList& ranked,
                             const std::string& provenance) {
  detail::CsvTable t(out, {"rank", "identity", "distance"}, provenance);
  for (std::size_t i = 0; i < ranked.size(); ++i)
    t.row({std::to_string(i + 1), ranked[i].identity, format_double(ranked[i].distance)});
}

/// Report facts that are not per-row data, plus the run configuration.
inline nlohmann::json report_metadata(const EvalReport& report, const std::string& provenance) {
  std::vector<std::size_t> gallery_sizes;
  std::vector<std::size_t> training_pairs;
  for (const auto& f : report.folds) {
    gallery_sizes.push_back(f.gallery_identities);
    training_pairs.push_back(f.training_pairs);
  }
  return {{"protocol", protocol_name(report.config.protocol)},
          {"n_folds", report.config.n_folds},
          {"fold_seed", report.config.seed},
          {"feature_space_tag", report.feature_space_tag},
          {"extended_gallery_size", report.extended_gallery_size},
          {"gallery_identities_per_fold", gallery_sizes},
          {"training_pairs_per_fold", training_pairs},
          {"stddev_convention", EvalReport::stddev_convention},
          {"rank1_mean", report.rank1.mean},
          {"rank1_std", report.rank1.stddev},
          {"rank5_mean", report.rank5.mean},
          {"rank5_std", report.rank5.stddev},
          {"run_config", nlohmann::json::parse(provenance.empty() ? "{}" : provenance)}};
}

/// Writes summary.csv, cmc.csv, fits.csv, config.json and metadata.json
/// under dir.
inline void write_eval_report(const std::filesystem::path& dir, const EvalReport& report,
                              const std::string& provenance) {
  std::filesystem::create_directories(dir);
  {
    auto out = detail::open_output(dir / "summary.csv");
    write_summary_csv(out, report, provenance);
  }
  {
    auto out = detail::open_output(dir / "cmc.csv");
    write_cmc_csv(out, report, provenance);
  }
  {
    auto out = detail::open_output(dir / "fits.csv");
    write_fold_fits_csv(out, report, provenance);
  }
  {
    auto out = detail::open_output(dir / "config.json");
    out << provenance << '\n';
  }
  auto out = detail::open_output(dir / "metadata.json");
  out << report_metadata(report, provenance).dump(2) << '\n';
}

}  // namespace stm::io
