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

// Command-line front end: train, evaluate, identify, synth, dump-weights.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "stm/stm.hpp"

namespace fs = std::filesystem;

namespace {

using stm::ErrorCategory;
using stm::detail::require;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "Seed override");
  cmd->add_option("--out", opts.out, "Output directory");
}

stm::io::RunConfig resolve_config(const CommonOptions& opts) {
  stm::io::RunConfig cfg = opts.config.empty() ? stm::io::RunConfig{} : stm::io::load_config(opts.config);
  if (opts.seed) {
    cfg.seed = *opts.seed;
    cfg.protocol.seed = *opts.seed;
  }
  if (!opts.out.empty()) cfg.output_dir = opts.out;
  stm::io::validate(cfg);
  return cfg;
}

fs::path prepare_output_dir(const std::string& dir) {
  require(!dir.empty(), ErrorCategory::config, "no output directory given");
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  require(!ec && fs::is_directory(p), ErrorCategory::io, "cannot create output directory " + dir);
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = stm::io::detail::open_output(path);
  out << text << '\n';
}

std::pair<stm::RealMatrix, stm::RealMatrix> stack_training_pairs(const stm::ProtocolData& data) {
  std::size_t count = 0;
  for (const auto& s : data.mated) count += std::min(s.skull.size(), s.face.size());
  const auto n = data.mated.front().skull.front().size();
  stm::RealMatrix xs(n, static_cast<Eigen::Index>(count));
  stm::RealMatrix xd(n, static_cast<Eigen::Index>(count));
  Eigen::Index c = 0;
  for (const auto& s : data.mated) {
    for (std::size_t j = 0; j < std::min(s.skull.size(), s.face.size()); ++j, ++c) {
      xs.col(c) = s.skull[j];
      xd.col(c) = s.face[j];
    }
  }
  return {std::move(xs), std::move(xd)};
}

int run_train(const CommonOptions& opts, const std::string& manifest_path) {
  const auto cfg = resolve_config(opts);
  const auto manifest = stm::io::parse_manifest(manifest_path);
  require(!manifest.pairs.empty(), ErrorCategory::manifest, "manifest has no mated pairs");
  stm::io::require_inputs_exist(manifest);
  const auto out = prepare_output_dir(cfg.output_dir);
  const std::string prov = stm::io::provenance(cfg);

  const auto data = stm::io::load_protocol_data(manifest, cfg.features, cfg.augmentation);
  const auto [xs, xd] = stack_training_pairs(data);
  const auto [model, report] = stm::fit(xs, xd, cfg.hyper, cfg.init, data.feature_space_tag);

  stm::io::save_model(model, out / "model.stml", prov);
  {
    auto f = stm::io::detail::open_output(out / "fit_report.csv");
    stm::io::write_fit_report_csv(f, report, prov);
  }
  write_text(out / "config.json", prov);
  std::cout << "trained " << model.feature_dim() << "x" << model.feature_dim() << " transform on "
            << xs.cols() << " pairs, " << report.iterations_run << " iterations, objective "
            << stm::io::format_double(report.final_objective) << "\n";
  return 0;
}

int run_evaluate(const CommonOptions& opts, const std::string& manifest_path) {
  const auto cfg = resolve_config(opts);
  const auto manifest = stm::io::parse_manifest(manifest_path);
  require(!manifest.pairs.empty(), ErrorCategory::manifest, "manifest has no mated pairs");
  stm::io::require_inputs_exist(manifest);
  std::optional<stm::io::DatasetManifest> extended;
  if (cfg.protocol.protocol == stm::Protocol::P2) {
    require(!cfg.protocol.extended_gallery_manifest.empty() || !manifest.distractors.empty(),
            ErrorCategory::config,
            "protocol P2 needs protocol.extended_gallery_manifest or distractor_face records");
    if (!cfg.protocol.extended_gallery_manifest.empty()) {
      extended = stm::io::parse_manifest(cfg.protocol.extended_gallery_manifest,
                                         stm::io::ManifestKind::Gallery);
      stm::io::require_inputs_exist(*extended);
    }
  }
  require(cfg.protocol.n_folds <= manifest.pairs.size(), ErrorCategory::config,
          std::to_string(cfg.protocol.n_folds) + " folds requested for " +
              std::to_string(manifest.pairs.size()) + " mated pairs");
  const auto out = prepare_output_dir(cfg.output_dir);
  const std::string prov = stm::io::provenance(cfg);

  auto data = stm::io::load_protocol_data(manifest, cfg.features, cfg.augmentation,
                                          extended ? &*extended : nullptr);
  if (cfg.protocol.protocol == stm::Protocol::P1) {
    data.distractor_ids.clear();
    data.distractor_faces.clear();
  }
  const auto report = stm::run_protocol(data, cfg.protocol, cfg.hyper, cfg.init);
  stm::io::write_eval_report(out, report, prov);
  std::cout << stm::protocol_name(report.config.protocol) << " rank-1 "
            << stm::io::format_double(report.rank1.mean) << " (std "
            << stm::io::format_double(report.rank1.stddev) << "), rank-5 "
            << stm::io::format_double(report.rank5.mean) << "\n";
  return 0;
}

int run_identify(const CommonOptions& opts, const std::string& model_path,
                 const std::string& manifest_path, const std::string& probe_path) {
  const auto cfg = resolve_config(opts);
  const auto file = stm::io::load_model_file(model_path);
  const auto& model = file.model;
  const auto gallery_manifest = stm::io::parse_manifest(manifest_path, stm::io::ManifestKind::Gallery);
  require(!gallery_manifest.distractors.empty(), ErrorCategory::manifest, "gallery manifest is empty");
  stm::io::require_inputs_exist(gallery_manifest);
  require(fs::is_regular_file(probe_path), ErrorCategory::io, "missing probe " + probe_path);
  const auto out = prepare_output_dir(cfg.output_dir);

  const stm::FeatureSpec spec = stm::parse_feature_space_tag(model.feature_space_tag());
  stm::RealMatrix gallery_x(static_cast<Eigen::Index>(model.feature_dim()),
                            static_cast<Eigen::Index>(gallery_manifest.distractors.size()));
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < gallery_manifest.distractors.size(); ++i) {
    const auto& rec = gallery_manifest.distractors[i];
    const auto v = stm::io::load_samples(gallery_manifest.resolve(rec.image_path), spec, nullptr).front();
    require(static_cast<std::size_t>(v.size()) == model.feature_dim(), ErrorCategory::feature_space,
            rec.image_path + " does not match the model feature dimension");
    gallery_x.col(static_cast<Eigen::Index>(i)) = v;
    labels.push_back(rec.subject_id);
  }
  const auto gallery = stm::build_gallery(model, gallery_x, std::move(labels));
  const auto probe = stm::io::load_samples(probe_path, spec, nullptr).front();
  const auto ranked = stm::identify(model, probe, gallery);

  nlohmann::json prov = nlohmann::json::parse(stm::io::provenance(cfg));
  prov["model_provenance"] = file.provenance;
  auto f = stm::io::detail::open_output(out / "ranked.csv");
  stm::io::write_ranked_csv(f, ranked, prov.dump());
  std::cout << "best match " << ranked.front().identity << " at distance "
            << stm::io::format_double(ranked.front().distance) << "\n";
  return 0;
}

int run_synth(const CommonOptions& opts) {
  auto cfg = resolve_config(opts);
  if (opts.seed) cfg.synthetic.seed = *opts.seed;
  const auto out = prepare_output_dir(cfg.output_dir);
  const auto data = stm::synth_generate(cfg.synthetic);
  fs::create_directories(out / "features");

  std::vector<stm::io::ManifestRecord> mated;
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    const auto& id = data.labels[i];
    const std::string skull = "features/" + id + "_skull.feat";
    const std::string face = "features/" + id + "_face.feat";
    stm::io::write_feature_file(out / skull, data.skull.col(static_cast<Eigen::Index>(i)));
    stm::io::write_feature_file(out / face, data.face.col(static_cast<Eigen::Index>(i)));
    mated.push_back({id, stm::io::Modality::Skull, skull});
    mated.push_back({id, stm::io::Modality::Face, face});
  }
  {
    auto f = stm::io::detail::open_output(out / "manifest.csv");
    stm::io::write_manifest(f, mated);
  }
  if (!data.distractor_labels.empty()) {
    std::vector<stm::io::ManifestRecord> extended;
    for (std::size_t i = 0; i < data.distractor_labels.size(); ++i) {
      const auto& id = data.distractor_labels[i];
      const std::string face = "features/" + id + "_face.feat";
      stm::io::write_feature_file(out / face, data.distractor_faces.col(static_cast<Eigen::Index>(i)));
      extended.push_back({id, stm::io::Modality::DistractorFace, face});
    }
    auto f = stm::io::detail::open_output(out / "extended.csv");
    stm::io::write_manifest(f, extended);
  }
  write_text(out / "config.json", stm::io::provenance(cfg));
  std::cout << "wrote " << data.labels.size() << " mated pairs and " << data.distractor_labels.size()
            << " distractors (feature kind precomputed, dim " << cfg.synthetic.feature_dim << ")\n";
  return 0;
}

int run_dump_weights(const CommonOptions& opts, const std::string& model_path) {
  const auto cfg = resolve_config(opts);
  const auto file = stm::io::load_model_file(model_path);
  const auto out = prepare_output_dir(cfg.output_dir);
  const auto& t = file.model.transform();
  const auto n = static_cast<std::size_t>(t.cols());
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  const bool square = side * side == n;
  const std::size_t width = square ? side : n;
  const std::size_t height = square ? side : 1;

  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    const double lo = t.row(r).minCoeff();
    const double hi = t.row(r).maxCoeff();
    std::vector<std::uint8_t> px(n, 0);
    if (hi > lo) {
      for (std::size_t i = 0; i < n; ++i)
        px[i] = stm::clamp_pixel(255.0 * (t(r, static_cast<Eigen::Index>(i)) - lo) / (hi - lo));
    }
    char name[32];
    std::snprintf(name, sizeof name, "row_%04ld.pgm", static_cast<long>(r));
    stm::io::write_pgm(out / name, stm::GrayImage(width, height, std::move(px)));
  }
  nlohmann::json prov = nlohmann::json::parse(stm::io::provenance(cfg));
  prov["model_provenance"] = file.provenance;
  write_text(out / "config.json", prov.dump());
  std::cout << "wrote " << t.rows() << " weight images (" << width << "x" << height << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shared transform learning for heterogeneous matching"};
  app.require_subcommand(1);

  CommonOptions train_opts, eval_opts, ident_opts, synth_opts, dump_opts;
  std::string train_manifest, eval_manifest, ident_manifest, ident_model, probe, dump_model;

  auto* train = app.add_subcommand("train", "Fit a model on every mated pair in a manifest");
  add_common(train, train_opts);
  train->add_option("--manifest", train_manifest, "Paired manifest")->required()->check(CLI::ExistingFile);

  auto* evaluate = app.add_subcommand("evaluate", "Cross-validated identification protocol");
  add_common(evaluate, eval_opts);
  evaluate->add_option("--manifest", eval_manifest, "Paired manifest")->required()->check(CLI::ExistingFile);

  auto* ident = app.add_subcommand("identify", "Rank a gallery against one probe");
  add_common(ident, ident_opts);
  ident->add_option("--model", ident_model, "Model file")->required()->check(CLI::ExistingFile);
  ident->add_option("--manifest", ident_manifest, "Gallery manifest")->required()->check(CLI::ExistingFile);
  ident->add_option("--probe", probe, "Probe image or feature file")->required()->check(CLI::ExistingFile);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic paired dataset");
  add_common(synth, synth_opts);

  auto* dump = app.add_subcommand("dump-weights", "Write each transform row as an image");
  add_common(dump, dump_opts);
  dump->add_option("--model", dump_model, "Model file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*train) return run_train(train_opts, train_manifest);
    if (*evaluate) return run_evaluate(eval_opts, eval_manifest);
    if (*ident) return run_identify(ident_opts, ident_model, ident_manifest, probe);
    if (*synth) return run_synth(synth_opts);
    if (*dump) return run_dump_weights(dump_opts, dump_model);
  } catch (const stm::Error& e) {
    std::cerr << "error[" << stm::category_name(e.category()) << "]: " << e.what() << "\n";
    return stm::exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
