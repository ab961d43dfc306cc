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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "stm/io/config.hpp"
#include "stm/io/csv.hpp"
#include "stm/io/dataset.hpp"
#include "stm/io/manifest.hpp"
#include "stm/io/model_file.hpp"

using namespace stm;
namespace fs = std::filesystem;

namespace {

template <typename Fn>
ErrorCategory category_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.category();
  }
  ADD_FAILURE() << "no stm::Error thrown";
  return ErrorCategory::io;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

SharedTransformModel sample_model(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  HyperParams h{0.25, 1.5, 0.75, 3, 12, 1e-5};
  return SharedTransformModel(gaussian_matrix(n, n, rng), h, "precomputed:" + std::to_string(n));
}

class Workdir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("stm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(STM_CLI_PATH) + " " + args + " > " +
                            (dir_ / "stdout.txt").string() + " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

}  // namespace

TEST(Manifest, TwoLineManifest) {
  std::stringstream in("subject_id,modality,image_path\r\nS1,skull,a.png\nS1,face,b.png\n");
  const auto m = io::parse_manifest(in);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(m.pairs[0].subject_id, "S1");
  EXPECT_EQ(m.pairs[0].skull_path, "a.png");
  EXPECT_EQ(m.pairs[0].face_path, "b.png");
}

TEST(Manifest, QuotedFieldsAndThirtyFivePairs) {
  std::stringstream in;
  in << "subject_id,modality,image_path\n";
  for (int i = 0; i < 35; ++i) {
    in << "\"id," << i << "\",skull,skull/" << i << ".png\n";
    in << "\"id," << i << "\",face,face/" << i << ".png\n";
  }
  const auto m = io::parse_manifest(in);
  EXPECT_EQ(m.pairs.size(), 35u);
  EXPECT_EQ(m.pairs[4].subject_id, "id,4");
}

TEST(Manifest, Rejections) {
  auto parse = [](const std::string& body, io::ManifestKind kind = io::ManifestKind::Paired) {
    return [body, kind] {
      std::stringstream in("subject_id,modality,image_path\n" + body);
      io::parse_manifest(in, "m.csv", kind);
    };
  };
  EXPECT_EQ(category_of(parse("S1,skull,a\nS1,skull,b\nS1,face,c\n")), ErrorCategory::manifest);
  EXPECT_EQ(category_of(parse("S1,skull,a\n")), ErrorCategory::manifest);
  EXPECT_EQ(category_of(parse("S1,skull,a\nS1,face,a\n")), ErrorCategory::manifest);
  EXPECT_EQ(category_of(parse("S1,torso,a\n")), ErrorCategory::manifest);
  EXPECT_EQ(category_of(parse("S1,skull,a\nS1,face,b\nS1,distractor_face,c\n")),
            ErrorCategory::manifest);
  EXPECT_EQ(category_of(parse("S1,skull\n")), ErrorCategory::manifest);
  EXPECT_EQ(category_of(parse("S1,skull,a\n", io::ManifestKind::Gallery)), ErrorCategory::manifest);
  std::stringstream bad_header("id,modality,path\n");
  EXPECT_EQ(category_of([&] { io::parse_manifest(bad_header); }), ErrorCategory::manifest);

  try {
    parse("S1,skull,a\nS1,skull,b\nS1,face,c\n")();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("m.csv:3"), std::string::npos) << e.what();
  }
}

TEST(Manifest, WriteParseRoundTrip) {
  std::vector<io::ManifestRecord> recs{{"a", io::Modality::Skull, "x/1.pgm"},
                                       {"a", io::Modality::Face, "x/2.pgm"},
                                       {"d\"q", io::Modality::DistractorFace, "x/3.pgm"}};
  std::stringstream buf;
  io::write_manifest(buf, recs);
  const auto m = io::parse_manifest(buf);
  ASSERT_EQ(m.distractors.size(), 1u);
  EXPECT_EQ(m.distractors[0].subject_id, "d\"q");
  EXPECT_EQ(m.pairs.size(), 1u);
}

TEST(Csv, DoublesRoundTripExactly) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345678.9, 0.0}) {
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(0.8), "0.8");
}

TEST(Csv, EscapesAndReadsBack) {
  std::stringstream buf;
  io::write_csv_row(buf, {"plain", "with,comma", "with \"quote\"", "multi\nline"});
  std::vector<std::string> fields;
  std::size_t line = 0;
  ASSERT_TRUE(io::read_csv_row(buf, fields, line));
  EXPECT_EQ(fields, (std::vector<std::string>{"plain", "with,comma", "with \"quote\"", "multi\nline"}));
}

TEST(ModelFile, RoundTripIsBitExact) {
  const auto model = sample_model(7, 1);
  const auto bytes = io::serialize_model(model, "{\"seed\":3}");
  const auto loaded = io::deserialize_model(bytes);
  EXPECT_EQ(loaded.model, model);
  EXPECT_EQ(loaded.provenance, "{\"seed\":3}");
  EXPECT_EQ(loaded.parameter_count, 49u);
  EXPECT_EQ(io::serialize_model(loaded.model, loaded.provenance), bytes);
}

TEST(ModelFile, SaveAndLoadFromDisk) {
  const auto path = fs::temp_directory_path() / "stm_model_roundtrip.stml";
  const auto model = sample_model(4, 2);
  io::save_model(model, path, "p");
  EXPECT_EQ(io::load_model(path), model);
  EXPECT_FALSE(fs::exists(path.string() + ".tmp"));
  fs::remove(path);
  EXPECT_EQ(category_of([&] { io::load_model(path); }), ErrorCategory::io);
}

TEST(ModelFile, CorruptionIsDetected) {
  const auto bytes = io::serialize_model(sample_model(5, 3));
  for (std::size_t pos : {std::size_t{12}, bytes.size() / 2, bytes.size() - 9, bytes.size() - 1}) {
    auto bad = bytes;
    bad[pos] ^= 0x10;
    EXPECT_EQ(category_of([&] { io::deserialize_model(bad); }), ErrorCategory::checksum) << pos;
  }
}

TEST(ModelFile, VersionMagicAndTruncation) {
  const auto bytes = io::serialize_model(sample_model(3, 4));
  auto future = bytes;
  future[4] = 2;
  EXPECT_EQ(category_of([&] { io::deserialize_model(future); }), ErrorCategory::version);
  auto padded = bytes;
  padded.push_back(0);
  EXPECT_EQ(category_of([&] { io::deserialize_model(padded); }), ErrorCategory::format);
  auto foreign = bytes;
  foreign[0] = 'X';
  EXPECT_EQ(category_of([&] { io::deserialize_model(foreign); }), ErrorCategory::format);
  for (std::size_t len : {std::size_t{0}, std::size_t{6}, std::size_t{20}, std::size_t{30},
                          bytes.size() / 2, bytes.size() - 1}) {
    const std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(len));
    EXPECT_EQ(category_of([&] { io::deserialize_model(cut); }), ErrorCategory::format) << len;
  }
}

TEST(Config, DefaultsAndOverrides) {
  const auto c = io::config_from_json(nlohmann::json::parse(
      R"({"seed": 11, "hyper": {"lambda3": 2.0, "tau": 4}, "features": {"kind": "raw", "size": 32}})"));
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.protocol.seed, 11u);
  EXPECT_EQ(c.hyper.lambda3, 2.0);
  EXPECT_EQ(c.hyper.tau, 4u);
  EXPECT_EQ(c.hyper.lambda1, 1.0);
  EXPECT_EQ(c.features, FeatureSpec{RawFeatures{32}});
  const auto again = io::config_from_json(io::to_json(c));
  EXPECT_EQ(io::provenance(again), io::provenance(c));
}

TEST(Config, UnknownKeysAndBadValuesRejected) {
  EXPECT_EQ(category_of([] { io::config_from_json(nlohmann::json::parse(R"({"lamda1": 1})")); }),
            ErrorCategory::config);
  EXPECT_EQ(category_of([] {
              io::config_from_json(nlohmann::json::parse(R"({"hyper": {"gamma": 1}})"));
            }),
            ErrorCategory::config);
  EXPECT_EQ(category_of([] {
              io::validate(io::config_from_json(nlohmann::json::parse(R"({"hyper": {"lambda1": -1}})")));
            }),
            ErrorCategory::config);
}

TEST(FeatureFile, RoundTrip) {
  const auto path = fs::temp_directory_path() / "stm_vec.feat";
  Rng rng(5);
  const RealVector v = gaussian_matrix(9, 1, rng).col(0);
  io::write_feature_file(path, v);
  EXPECT_EQ(io::read_feature_file(path), v);
  fs::remove(path);
}

TEST_F(Workdir, SynthTrainIsDeterministic) {
  const auto d = dir_.string();
  ASSERT_EQ(run("synth --seed 3 --out " + d + "/data"), 0) << slurp(dir_ / "stderr.txt");
  spit(dir_ / "cfg.json",
       R"({"features": {"kind": "precomputed", "dim": 32}, "hyper": {"max_iters": 10}})");
  const std::string common = " --config " + d + "/cfg.json --manifest " + d + "/data/manifest.csv";
  ASSERT_EQ(run("train" + common + " --out " + d + "/m1"), 0) << slurp(dir_ / "stderr.txt");
  ASSERT_EQ(run("train" + common + " --out " + d + "/m2"), 0);
  const auto a = slurp(dir_ / "m1" / "model.stml");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "m2" / "model.stml"));
  EXPECT_EQ(slurp(dir_ / "m1" / "fit_report.csv"), slurp(dir_ / "m2" / "fit_report.csv"));
  EXPECT_EQ(io::load_model(dir_ / "m1" / "model.stml").feature_dim(), 32);
}

TEST_F(Workdir, EvaluateAndIdentify) {
  const auto d = dir_.string();
  ASSERT_EQ(run("synth --seed 7 --out " + d + "/data"), 0) << slurp(dir_ / "stderr.txt");
  spit(dir_ / "cfg.json", R"({"features": {"kind": "precomputed", "dim": 32}})");
  const std::string cfg = " --config " + d + "/cfg.json";
  ASSERT_EQ(run("evaluate" + cfg + " --manifest " + d + "/data/manifest.csv --out " + d + "/ev"), 0)
      << slurp(dir_ / "stderr.txt");
  const auto summary = slurp(dir_ / "ev" / "summary.csv");
  EXPECT_EQ(summary.rfind("protocol,fold,rank1,rank5,run_config\r\n", 0), 0u);
  EXPECT_NE(summary.find("P1,mean,"), std::string::npos);

  ASSERT_EQ(run("train" + cfg + " --manifest " + d + "/data/manifest.csv --out " + d + "/m"), 0);
  spit(dir_ / "data" / "gallery.csv",
       "subject_id,modality,image_path\ns000,face,features/s000_face.feat\n"
       "s001,face,features/s001_face.feat\ns002,face,features/s002_face.feat\n");
  ASSERT_EQ(run("identify" + cfg + " --model " + d + "/m/model.stml --manifest " + d +
                "/data/gallery.csv --probe " + d + "/data/features/s001_face.feat --out " + d + "/id"),
            0)
      << slurp(dir_ / "stderr.txt");
  std::stringstream ranked(slurp(dir_ / "id" / "ranked.csv"));
  std::vector<std::string> row;
  std::size_t line = 0;
  ASSERT_TRUE(io::read_csv_row(ranked, row, line));
  EXPECT_EQ(row[0], "rank");
  ASSERT_TRUE(io::read_csv_row(ranked, row, line));
  EXPECT_EQ(row[0], "1");
  EXPECT_EQ(row[1], "s001");
  EXPECT_EQ(std::stod(row[2]), 0.0);

  ASSERT_EQ(run("dump-weights --model " + d + "/m/model.stml --out " + d + "/w"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "w" / "row_0000.pgm"));
  EXPECT_TRUE(fs::exists(dir_ / "w" / "row_0031.pgm"));
}

TEST_F(Workdir, ErrorsMapToExitCodes) {
  const auto d = dir_.string();
  EXPECT_EQ(run("train --bogus"), 2);
  EXPECT_EQ(run(""), 2);
  spit(dir_ / "bad.csv", "subject_id,modality,image_path\nS1,skull,a.pgm\nS1,skull,b.pgm\n");
  EXPECT_EQ(run("train --manifest " + d + "/bad.csv --out " + d + "/o"),
            exit_code(ErrorCategory::manifest));
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("error[manifest]"), std::string::npos);
  spit(dir_ / "cfg.json", R"({"hyperparams": {}})");
  spit(dir_ / "ok.csv", "subject_id,modality,image_path\nS1,skull,a.pgm\nS1,face,b.pgm\n");
  EXPECT_EQ(run("train --config " + d + "/cfg.json --manifest " + d + "/ok.csv --out " + d + "/o"),
            exit_code(ErrorCategory::config));
  EXPECT_EQ(run("train --manifest " + d + "/ok.csv --out " + d + "/o"), exit_code(ErrorCategory::io));
  spit(dir_ / "junk.stml", "not a model");
  EXPECT_EQ(run("dump-weights --model " + d + "/junk.stml --out " + d + "/o"),
            exit_code(ErrorCategory::format));
}
