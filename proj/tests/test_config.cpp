#include <cstdlib>

#include <gtest/gtest.h>

#include "memsched/config.hpp"

using namespace memsched;

namespace {

ExperimentConfig parse(std::string_view text) { return parse_experiment_config(IniDocument::parse(text), "/base"); }

}  // namespace

TEST(Ini, SectionsCommentsAndTypes) {
  const auto doc = IniDocument::parse(
      "top = 1\n"
      "# comment\n"
      "[a]\n"
      "  s = hello world  ; trailing\n"
      "n = 42\n"
      "d = 0.25\n"
      "b = yes\n"
      "l = x, , y ,z\n");
  EXPECT_EQ(doc.get_uint("", "top"), 1u);
  EXPECT_EQ(doc.get_string("a", "s"), "hello world");
  EXPECT_EQ(doc.get_uint("a", "n"), 42u);
  EXPECT_EQ(doc.get_double("a", "d"), 0.25);
  EXPECT_EQ(doc.get_bool("a", "b"), true);
  EXPECT_EQ(doc.get_list("a", "l"), (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_FALSE(doc.get_string("a", "missing").has_value());
  EXPECT_NO_THROW(doc.require_all_used());
}

TEST(Ini, InfMeansUnbounded) {
  const auto doc = IniDocument::parse("[p]\nx = inf\ny = Unbounded\n");
  EXPECT_EQ(doc.get_uint("p", "x"), kUnbounded);
  EXPECT_EQ(doc.get_uint("p", "y"), kUnbounded);
}

TEST(Ini, BadValuesNameTheLine) {
  const auto doc = IniDocument::parse("[p]\n\nx = -3\ny = maybe\nz = 1.5q\n", "t.ini");
  try {
    doc.get_uint("p", "x");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("t.ini:3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(doc.get_bool("p", "y"), ConfigError);
  EXPECT_THROW(doc.get_double("p", "z"), ConfigError);
}

TEST(Ini, MalformedLinesRejected) {
  EXPECT_THROW(IniDocument::parse("[open\n"), ConfigError);
  EXPECT_THROW(IniDocument::parse("[a]\njust text\n"), ConfigError);
  EXPECT_THROW(IniDocument::parse("[a]\nk = 1\nK = 2\n"), ConfigError);
}

TEST(Ini, UnusedKeyRejected) {
  const auto doc = IniDocument::parse("[a]\nused = 1\ntypo = 2\n");
  doc.get_uint("a", "used");
  EXPECT_THROW(doc.require_all_used(), ConfigError);
}

TEST(ExperimentConfig, DefaultsFromEmptyText) {
  const auto c = parse("");
  EXPECT_EQ(c.policy.blacklisting_threshold, 4u);
  EXPECT_EQ(c.policy.clearing_interval, 10000u);
  EXPECT_EQ(c.sim.memory.geometry.channels, 4u);
}

TEST(ExperimentConfig, FieldsParsed) {
  const auto c = parse(
      "[experiment]\nname = x\nseed = 7\nhorizon_cycles = 50000\noutput_dir = out\nschedulers = bliss, FRFCFS\n"
      "[memory]\nchannels = 2\ninterleave = cache_block\n"
      "[policy]\nblacklisting_threshold = 2\nclearing_interval = 1000\nfrfcfs_cap = inf\n"
      "[workload]\ncores = 4\nsuite_seed = 9\ncategories = 25%, 100\n"
      "[sweep]\nthresholds = 1, 3\nintervals = 500\n");
  EXPECT_EQ(c.name, "x");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.sim.horizon, 50000u);
  EXPECT_EQ(c.output_dir, std::filesystem::path("/base/out"));
  EXPECT_EQ(c.schedulers, (std::vector<SchedulerKind>{SchedulerKind::Bliss, SchedulerKind::FrFcfs}));
  EXPECT_EQ(c.sim.memory.geometry.channels, 2u);
  EXPECT_EQ(c.sim.memory.interleave.kind, InterleaveKind::CacheBlock);
  EXPECT_EQ(c.policy.frfcfs_cap, kUnbounded);
  EXPECT_EQ(c.suite_seed(), 9u);
  EXPECT_EQ(c.suite.categories, (std::vector<IntensityCategory>{IntensityCategory::Pct25, IntensityCategory::Pct100}));
  EXPECT_EQ(c.sweep.thresholds, (std::vector<std::uint64_t>{1, 3}));
  EXPECT_EQ(c.sweep.default_threshold, 2u);
  EXPECT_EQ(c.sweep.default_interval, 1000u);
}

TEST(ExperimentConfig, SuiteSeedFollowsExperimentSeed) { EXPECT_EQ(parse("[experiment]\nseed = 12\n").suite_seed(), 12u); }

TEST(ExperimentConfig, Rejections) {
  EXPECT_THROW(parse("[experiment]\nschedulers = NOPE\n"), ConfigError);
  EXPECT_THROW(parse("[memory]\ninterleave = diagonal\n"), ConfigError);
  EXPECT_THROW(parse("[memory]\nchanels = 2\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nhorizon_cycles = 100\n"), ConfigError);  // below clearing interval
  EXPECT_THROW(parse("[policy]\nblacklisting_threshold = 0\n"), ConfigError);
  EXPECT_THROW(parse("[workload]\ncores = 1\n"), ConfigError);
  EXPECT_THROW(parse("[sweep]\nthresholds = 2, x\n"), ConfigError);
  EXPECT_THROW(parse("[workload]\ncategories = 30\n"), ConfigError);
  EXPECT_THROW(parse("[memory]\nchannels = 99999999999\n"), ConfigError);
}

TEST(ExperimentConfig, SeedOverrideFromEnvironment) {
  ExperimentConfig c;
  ::unsetenv("MEMSCHED_SEED");
  EXPECT_FALSE(apply_seed_override(c));
  ::setenv("MEMSCHED_SEED", "77", 1);
  EXPECT_TRUE(apply_seed_override(c));
  EXPECT_EQ(c.seed, 77u);
  ::setenv("MEMSCHED_SEED", "x1", 1);
  EXPECT_THROW(apply_seed_override(c), ConfigError);
  ::unsetenv("MEMSCHED_SEED");
}
