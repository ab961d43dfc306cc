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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "eval_fixtures.hpp"
#include "oracles.hpp"
#include "stm/stm.hpp"

using namespace stm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;  // 0 means no runtime bound
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome objective_monotonicity() {
  Rng rng(101);
  double worst_rise = -1e300;
  std::size_t pairs = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const RealMatrix xs = gaussian_matrix(16, 40, rng);
    const RealMatrix xd = gaussian_matrix(16, 40, rng);
    HyperParams h;
    h.max_iters = 50;
    h.rel_tol = 1e-300;
    const auto report = fit(xs, xd, h).second;
    double prev = report.initial_objective;
    for (double cur : report.objective_trace) {
      worst_rise = std::max(worst_rise, cur - prev);
      prev = cur;
      ++pairs;
    }
    if (report.iterations_run != 50) return {false, "instance stopped early"};
  }
  return {worst_rise <= 1e-9,
          std::to_string(pairs) + " pairs, largest step change " + fmt("%.3e", worst_rise)};
}

Outcome transform_update_oracle() {
  Rng rng(202);
  double worst_gap = -1e300;
  double worst_grad = 0.0;
  bool ok = true;
  for (int inst = 0; inst < 10; ++inst) {
    const auto n = static_cast<Eigen::Index>(2 + rng.below(5));
    const auto cols = static_cast<Eigen::Index>(n + 2 + rng.below(10));
    const RealMatrix x = gaussian_matrix(n, cols, rng);
    const RealMatrix a = gaussian_matrix(n, cols, rng);
    const double l1 = 0.1 + rng.uniform01();
    const double l2 = 0.1 + rng.uniform01();
    const RealMatrix t = update_transform(x, a, l1, l2);
    const double closed = tl_objective(t, x, a, l1, l2);
    const double descent = oracle::gradient_descent_objective(x, a, l1, l2, 10000);
    const double grad = tl_gradient(t, x, a, l1, l2).norm() / (1.0 + std::abs(closed));
    worst_gap = std::max(worst_gap, (closed - descent) / std::abs(descent));
    worst_grad = std::max(worst_grad, grad);
    ok = ok && closed <= descent + 1e-6 * std::abs(descent) && grad <= 1e-6;
  }
  return {ok, "max relative excess over descent " + fmt("%.3e", worst_gap) +
                  ", max scaled gradient " + fmt("%.3e", worst_grad)};
}

Outcome coupled_code_oracle() {
  Rng rng(303);
  double worst_rel = 0.0;
  std::size_t columns = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const auto n = static_cast<Eigen::Index>(1 + rng.below(6));
    const std::size_t tau = 1 + rng.below(std::min<std::uint64_t>(3, static_cast<std::uint64_t>(n)));
    const auto cols = static_cast<Eigen::Index>(1 + rng.below(5));
    const double l3 = rng.uniform01() * 4.0;
    const RealMatrix t = gaussian_matrix(n, n, rng);
    const RealMatrix x = gaussian_matrix(n, cols, rng);
    const RealMatrix other = gaussian_matrix(n, cols, rng);
    const SparsityPolicy p{SparsityScope::PerColumn, tau};
    const bool skull = inst % 2 == 0;
    const RealMatrix c = skull ? update_code_skull(t, x, other, l3, p) : update_code_face(t, x, other, l3, p);
    const RealMatrix proj = t * x;
    for (Eigen::Index j = 0; j < cols; ++j, ++columns) {
      const auto best = oracle::enumerate_supports(proj.col(j), other.col(j), l3, tau);
      if (oracle::support_mask(c.col(j)) != best.support)
        return {false, "support mismatch at instance " + std::to_string(inst)};
      const double cost = oracle::code_column_cost(proj.col(j), other.col(j), c.col(j), l3);
      worst_rel = std::max(worst_rel, std::abs(cost - best.cost) / std::max(1e-300, std::abs(best.cost)));
    }
  }
  return {worst_rel <= 1e-12,
          std::to_string(columns) + " columns, max relative cost difference " + fmt("%.3e", worst_rel)};
}

Outcome reduction_identities() {
  Rng rng(404);
  double worst_stack = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const RealMatrix t = gaussian_matrix(6, 6, rng);
    const RealMatrix xs = gaussian_matrix(6, 9, rng), xd = gaussian_matrix(6, 9, rng);
    const RealMatrix as = gaussian_matrix(6, 9, rng), ad = gaussian_matrix(6, 9, rng);
    HyperParams h;
    h.lambda3 = 0.0;
    RealMatrix x(6, 18), a(6, 18);
    x << xs, xd;
    a << as, ad;
    const double want = tl_objective(t, x, a, h.lambda1, h.lambda2);
    worst_stack = std::max(worst_stack,
                           std::abs(shared_objective(t, xs, xd, as, ad, h) - want) / std::abs(want));
  }

  // Identical domains, identical initialization, default coupling.
  const RealMatrix x = gaussian_matrix(8, 20, rng);
  HyperParams h;
  h.max_iters = 20;
  h.rel_tol = 1e-300;
  double worst_gap = 0.0;
  std::size_t first_bad = 0;
  fit(x, x, h, {}, "", [&](const FitState& s) {
    if (s.stage == FitStage::SkullCodes) return;
    const double gap = (s.face_codes - s.skull_codes).norm();
    if (gap > 0.0 && first_bad == 0) first_bad = s.iteration;
    worst_gap = std::max(worst_gap, gap);
  });
  std::string detail = "stacked max relative difference " + fmt("%.3e", worst_stack) +
                       "; identical-domain max ||Ad-As|| " + fmt("%.3e", worst_gap);
  if (first_bad != 0) detail += " (first nonzero at iteration " + std::to_string(first_bad) + ")";
  return {worst_stack <= 1e-12 && worst_gap == 0.0, detail};
}

Outcome identification_oracle() {
  Rng rng(505);
  HyperParams h;
  h.tau = 16;
  const SharedTransformModel model(gaussian_matrix(32, 32, rng), h, "acceptance");
  std::size_t probes = 0;
  while (probes < 1000) {
    const auto ids = 1 + rng.below(100);
    const auto images = ids + rng.below(ids + 1);
    std::vector<std::string> labels;
    for (std::uint64_t i = 0; i < images; ++i) labels.push_back("id" + std::to_string(rng.below(ids)));
    const auto g = build_gallery(model, gaussian_matrix(32, static_cast<Eigen::Index>(images), rng), labels);
    for (int k = 0; k < 50 && probes < 1000; ++k, ++probes) {
      const RealVector probe = gaussian_matrix(32, 1, rng).col(0);
      const auto got = identify(model, probe, g);
      const auto want = oracle::brute_force_ranking(encode(model, probe), g.codes(), labels);
      if (got.size() != want.size()) return {false, "ranking length differs"};
      for (std::size_t i = 0; i < got.size(); ++i) {
        if (got[i].identity != want[i].identity ||
            std::abs(got[i].distance - want[i].distance) > 1e-12 * std::max(1.0, want[i].distance))
          return {false, "ranking differs at probe " + std::to_string(probes)};
      }
    }
  }
  return {true, std::to_string(probes) + " probes matched"};
}

Outcome cmc_properties() {
  const auto worked = compute_cmc({1, 2, 4}, 4);
  const bool example = worked.accuracy_at_rank ==
                       std::vector<double>{1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0};
  SyntheticConfig cfg;
  cfg.n_subjects = 30;
  cfg.n_distractors = 10;
  const auto data = to_protocol_data(synth_generate(cfg), "precomputed:32");
  HyperParams h;
  h.max_iters = 10;
  std::size_t curves = 0;
  for (Protocol p : {Protocol::P1, Protocol::P2}) {
    for (const auto& f : run_protocol(data, {p, 5, "", 3}, h).folds) {
      const auto& acc = f.cmc.accuracy_at_rank;
      if (acc.size() != f.gallery_identities || acc.back() != 1.0) return {false, "curve does not end at 1"};
      for (std::size_t k = 1; k < acc.size(); ++k)
        if (acc[k] < acc[k - 1]) return {false, "curve decreases"};
      ++curves;
    }
  }
  Rng rng(606);
  for (int trial = 0; trial < 200; ++trial, ++curves) {
    const std::size_t g = 1 + rng.below(50);
    std::vector<std::size_t> ranks(1 + rng.below(50));
    for (auto& r : ranks) r = 1 + rng.below(g);
    const auto acc = compute_cmc(ranks, g).accuracy_at_rank;
    for (std::size_t k = 1; k < acc.size(); ++k)
      if (acc[k] < acc[k - 1]) return {false, "random curve decreases"};
    if (acc.back() != 1.0) return {false, "random curve does not end at 1"};
  }
  return {example, std::to_string(curves) + " curves checked, worked example " +
                       (example ? "matches" : "differs")};
}

Outcome synthetic_improvement() {
  const auto data = to_protocol_data(synth_generate(SyntheticConfig{}), "precomputed:32");
  const auto report = run_protocol(data, {Protocol::P1, 5, "", 7}, HyperParams{});
  const double baseline = fixtures::raw_baseline_rank1(data, 5, 7);
  const bool frozen = baseline == fixtures::kGoldenRawBaselineRank1;
  return {frozen && report.rank1.mean > baseline,
          "pipeline rank-1 " + fmt("%.4f", report.rank1.mean) + " (std " +
              fmt("%.4f", report.rank1.stddev) + "), raw baseline " + fmt("%.4f", baseline) +
              (frozen ? "" : " (differs from frozen value)")};
}

Outcome determinism_and_persistence() {
  SyntheticConfig cfg;
  cfg.n_subjects = 30;
  const auto d = synth_generate(cfg);
  const std::string prov = io::provenance(io::RunConfig{});
  const auto m1 = fit(d.skull, d.face, HyperParams{}, {}, "precomputed:32").first;
  const auto m2 = fit(d.skull, d.face, HyperParams{}, {}, "precomputed:32").first;
  const auto b1 = io::serialize_model(m1, prov);
  const auto b2 = io::serialize_model(m2, prov);
  if (b1 != b2) return {false, "two fits serialize differently"};

  const auto path = std::filesystem::temp_directory_path() / "stm_acceptance_model.stml";
  io::save_model(m1, path, prov);
  const bool exact = io::load_model(path) == m1;
  std::filesystem::remove(path);

  std::size_t rejected = 0, tried = 0;
  for (std::size_t pos = 8; pos < b1.size(); pos += 97, ++tried) {
    auto bad = b1;
    bad[pos] ^= 0x01;
    try {
      io::deserialize_model(bad);
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::checksum) ++rejected;
    }
  }
  return {exact && rejected == tried,
          std::string("byte-identical fits, round trip ") + (exact ? "exact" : "differs") + ", " +
              std::to_string(rejected) + "/" + std::to_string(tried) + " corruptions rejected"};
}

Outcome hog_checks() {
  const RealVector flat = extract_hog(GrayImage(64, 64, 128));
  const bool zero = flat.size() == 1764 && flat.isZero(0.0);
  const bool length = HogParams{}.descriptor_length() == 1764 &&
                      extract_hog(oracle::noise_image(100, 75, 1)).size() == 1764;
  GrayImage step(64, 64);
  for (std::size_t y = 0; y < 64; ++y)
    for (std::size_t x = 30; x < 64; ++x) step.at(x, y) = 200;
  const auto hist = hog_cell_histograms(step, HogParams{});
  double worst = 1.0;
  for (std::size_t cell = 0; cell < hist.size() / 9; ++cell) {
    double total = 0.0;
    for (std::size_t b = 0; b < 9; ++b) total += hist[cell * 9 + b];
    if (total > 0.0) worst = std::min(worst, hist[cell * 9] / total);
  }
  return {zero && length && worst >= 0.9,
          "constant image " + std::string(zero ? "zero" : "nonzero") + ", length " +
              std::to_string(flat.size()) + ", min 0-degree share " + fmt("%.3f", worst)};
}

Outcome model_size() {
  Rng rng(1010);
  for (Eigen::Index n : {1, 2, 5, 16, 32}) {
    const RealMatrix xs = gaussian_matrix(n, 3 * n, rng);
    const RealMatrix xd = gaussian_matrix(n, 3 * n, rng);
    HyperParams h;
    h.max_iters = 5;
    const auto m = fit(xs, xd, h).first;
    const auto loaded = io::deserialize_model(io::serialize_model(m));
    const auto nn = static_cast<std::size_t>(n * n);
    if (m.parameter_count() != nn || loaded.parameter_count != nn)
      return {false, "n=" + std::to_string(n) + " stores " + std::to_string(loaded.parameter_count)};
  }
  return {true, "n in {1,2,5,16,32}: parameter count n^2"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "objective monotonicity", 10, objective_monotonicity},
      {2, "transform update vs gradient descent", 30, transform_update_oracle},
      {3, "coupled code update vs support enumeration", 20, coupled_code_oracle},
      {4, "reduction identities", 0, reduction_identities},
      {5, "identification vs brute force", 10, identification_oracle},
      {6, "CMC properties", 0, cmc_properties},
      {7, "synthetic end-to-end improvement", 60, synthetic_improvement},
      {8, "determinism and persistence", 0, determinism_and_persistence},
      {9, "HOG checks", 0, hog_checks},
      {10, "model size", 0, model_size},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && secs >= c.budget_seconds) {
      o.pass = false;
      o.detail += "; over time budget";
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s criterion %d (%s): %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
