/*
 * Copyright 2026 The gncsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "gncsim/config.hpp"
#include "gncsim/metrics.hpp"
#include "gncsim/presets.hpp"

namespace gncsim {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() /
                    ("gncsim_harness_" + std::to_string(counter_++))) {
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

TEST(KeyValues, ParsesAndRejectsUnknownKeys) {
  KeyValues kv = KeyValues::parse_text(
      "# comment\n"
      "optim.alpha = 0.5\n"
      "\n"
      "run.epochs = 3\n");
  EXPECT_DOUBLE_EQ(kv.take_real("optim.alpha", 0.0), 0.5);
  EXPECT_THROW(kv.reject_unconsumed(), ConfigError);  // run.epochs unread
  EXPECT_EQ(kv.take_u64("run.epochs", 0), 3u);
  EXPECT_NO_THROW(kv.reject_unconsumed());
}

TEST(KeyValues, TypedErrorsNameTheKey) {
  KeyValues kv = KeyValues::parse_text("optim.alpha = banana\n");
  try {
    kv.take_real("optim.alpha", 0.0);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("optim.alpha"), std::string::npos);
  }
}

TEST(KeyValues, RejectsDuplicatesAndMalformedLines) {
  EXPECT_THROW(KeyValues::parse_text("a.b = 1\na.b = 2\n"), ConfigError);
  EXPECT_THROW(KeyValues::parse_text("just words\n"), ConfigError);
}

TEST(KeyValues, OverridesAndDefaults) {
  KeyValues kv = KeyValues::parse_text("k = 1\n");
  kv.set_default("k", "2");  // explicit key wins
  kv.set_default("fresh", "7");
  kv.set("k", "3");  // explicit override wins over the file
  EXPECT_EQ(kv.take_u64("k", 0), 3u);
  EXPECT_EQ(kv.take_u64("fresh", 0), 7u);
}

ExperimentConfig config_from(const std::string& text) {
  KeyValues kv = KeyValues::parse_text(text);
  ExperimentConfig cfg = ExperimentConfig::from_keyvalues(kv);
  kv.reject_unconsumed();
  return cfg;
}

const char* kBaseConfig =
    "objective.family = quadratic\n"
    "objective.dim = 8\n"
    "objective.cond = 10\n"
    "dataset.n = 64\n"
    "optim.method = gnc\n"
    "optim.workers = 4\n"
    "optim.shard_size = 4\n"
    "optim.alpha = 0.1\n"
    "schedule.base_lr = 0.2\n"
    "run.epochs = 2\n"
    "run.seed_init = 1\n"
    "run.seed_sampler = 2\n"
    "run.seed_rnc = 3\n";

TEST(ExperimentConfig, ParsesAndValidates) {
  const ExperimentConfig cfg = config_from(kBaseConfig);
  EXPECT_EQ(cfg.optim.method, Method::gnc);
  EXPECT_EQ(cfg.optim.workers, 4u);
  EXPECT_EQ(cfg.seeds.rnc, 3u);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(ExperimentConfig, SeedsAreMandatory) {
  KeyValues kv = KeyValues::parse_text("run.epochs = 1\n");
  EXPECT_THROW(ExperimentConfig::from_keyvalues(kv), ConfigError);
}

TEST(ExperimentConfig, NamesTheViolatedConstraint) {
  ExperimentConfig cfg = config_from(kBaseConfig);
  cfg.optim.workers = 64;  // 64 * 4 > 64
  try {
    cfg.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("shard_size * workers"),
              std::string::npos);
  }
}

TEST(ExperimentConfig, RejectsUnknownMethodAndFamily) {
  EXPECT_THROW(config_from(std::string(kBaseConfig) + "optim.extra = 1\n"),
               ConfigError);
  KeyValues kv = KeyValues::parse_text(
      "optim.method = sgd\nrun.seed_init = 1\n"
      "run.seed_sampler = 2\nrun.seed_rnc = 3\n");
  EXPECT_THROW(ExperimentConfig::from_keyvalues(kv), ConfigError);
}

TEST(Presets, SeedTuplesArePinned) {
  const SeedSet a = seed_set(0);
  const SeedSet b = seed_set(0);
  EXPECT_EQ(a.init, b.init);
  EXPECT_NE(seed_set(0).init, seed_set(1).init);
  EXPECT_THROW(seed_set(999), ConfigError);

  KeyValues kv = KeyValues::parse_text("");
  apply_seed_set(kv, 2);
  EXPECT_EQ(kv.take_u64("run.seed_init", 0), seed_set(2).init);
}

TEST(Presets, CifarRecipeFillsDefaultsWithoutShadowing) {
  KeyValues kv = KeyValues::parse_text(
      "optim.method = gnc-to-rnc\n"
      "schedule.base_lr = 0.5\n");  // explicit, must survive
  apply_preset(kv, "cifar10-4096");
  EXPECT_DOUBLE_EQ(kv.take_real("schedule.base_lr", 0.0), 0.5);
  EXPECT_EQ(kv.take_or("schedule.decay", ""), "step");
  EXPECT_EQ(kv.take_or("schedule.milestones", ""), "80,120");
  EXPECT_DOUBLE_EQ(kv.take_real("schedule.warmup_start_lr", 0.0), 0.025);
  EXPECT_EQ(kv.take_u64("schedule.warmup_epochs", 0), 10u);
  // method-dependent noise coefficients
  EXPECT_DOUBLE_EQ(kv.take_real("optim.alpha", 0.0), 0.1);
  EXPECT_DOUBLE_EQ(kv.take_real("optim.alpha_rnc", 0.0), 4.0);
  EXPECT_EQ(kv.take_u64("optim.switch_epoch", 0), 120u);
}

TEST(Presets, ImagenetRecipeUsesLarsAndPolynomial) {
  KeyValues kv = KeyValues::parse_text("optim.method = gnc\n");
  apply_preset(kv, "imagenet-32768");
  EXPECT_EQ(kv.take_or("schedule.decay", ""), "polynomial");
  EXPECT_EQ(kv.take_u64("schedule.poly_total", 0), 4120u);
  EXPECT_DOUBLE_EQ(kv.take_real("schedule.base_lr", 0.0), 23.0);
  EXPECT_EQ(kv.take_or("optim.lars", ""), "on");
  EXPECT_EQ(kv.take_u64("schedule.collapse_epoch", 0), 80u);
  EXPECT_DOUBLE_EQ(kv.take_real("schedule.collapse_divisor", 0.0), 5.0);
  EXPECT_DOUBLE_EQ(kv.take_real("optim.alpha", 0.0), 0.0001);
  EXPECT_THROW(apply_preset(kv, "mnist-64"), ConfigError);
}

TEST(Metrics, WriterRoundTripsThroughReader) {
  const TempDir dir;
  const auto path = dir.path() / "m.tsv";
  MetricsSchema schema;
  schema.columns = {"lr", "loss"};
  std::uint64_t digest = 0;
  {
    MetricsWriter writer(path, schema);
    MetricsRecord rec;
    rec.t = 1;
    rec.epoch = 1;
    rec.values = {0.1, 2.5};
    writer.write(rec);
    rec.t = 2;
    rec.values = {0.1, std::nullopt};
    writer.write(rec);
    digest = writer.finish("finished", 2, 0xabcdef);
  }
  const MetricsFile file = read_metrics(path);
  EXPECT_EQ(file.schema.columns, schema.columns);
  ASSERT_EQ(file.records.size(), 2u);
  EXPECT_EQ(file.records[0].values[1], 2.5);
  EXPECT_FALSE(file.records[1].values[1].has_value());
  EXPECT_EQ(file.status, "finished");
  EXPECT_EQ(file.final_t, 2u);
  EXPECT_EQ(file.param_digest, hex64(0xabcdef));
  EXPECT_EQ(file_digest(path), digest);

  std::ifstream digest_file(path.string() + ".digest");
  std::string stored;
  digest_file >> stored;
  EXPECT_EQ(stored, hex64(digest));
}

TEST(Metrics, AbandonedWriterLeavesNoFinalFile) {
  const TempDir dir;
  const auto path = dir.path() / "m.tsv";
  {
    MetricsWriter writer(path, MetricsSchema{{"loss"}});
    MetricsRecord rec;
    rec.t = 1;
    rec.epoch = 1;
    rec.values = {1.0};
    writer.write(rec);
    // no finish(): simulated crash
  }
  EXPECT_FALSE(fs::exists(path));
  EXPECT_FALSE(fs::exists(path.string() + ".tmp"));
}

TEST(Metrics, FullPrecisionRoundTrip) {
  const double v = 0.1 + 0.2;  // not representable tidily
  EXPECT_EQ(std::stod(format_real(v)), v);
  EXPECT_EQ(format_opt(std::nullopt), "na");
}

TEST(Metrics, RejectsRecordsOffSchema) {
  const TempDir dir;
  MetricsWriter writer(dir.path() / "m.tsv", MetricsSchema{{"a", "b"}});
  MetricsRecord rec;
  rec.values = {1.0};  // one column short
  EXPECT_THROW(writer.write(rec), std::invalid_argument);
  writer.finish("finished", 0, 0);
}

}  // namespace
}  // namespace gncsim
