#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "memsched/hw_cost.hpp"
#include "memsched/scheduler.hpp"
#include "memsched/simulator.hpp"
#include "memsched/workload.hpp"

namespace memsched {

/// Line-oriented "key = value" text with "[section]" headers. '#' and ';'
/// start comments. Keys before the first header live in section "".
/// Every key must be read through a getter; require_all_used() rejects the
/// rest so typos do not go unnoticed.
class IniDocument {
 public:
  static IniDocument parse(std::string_view text, std::string origin = "<string>");
  static IniDocument load(const std::filesystem::path& path);

  bool has_section(std::string_view section) const;
  bool has(std::string_view section, std::string_view key) const;

  std::optional<std::string> get_string(std::string_view section, std::string_view key) const;
  std::optional<std::uint64_t> get_uint(std::string_view section, std::string_view key) const;
  std::optional<double> get_double(std::string_view section, std::string_view key) const;
  std::optional<bool> get_bool(std::string_view section, std::string_view key) const;
  /// Comma-separated list; surrounding whitespace trimmed, empty items dropped.
  std::optional<std::vector<std::string>> get_list(std::string_view section, std::string_view key) const;

  void require_all_used() const;
  const std::string& origin() const { return origin_; }

 private:
  struct Value {
    std::string text;
    std::size_t line = 0;
    mutable bool used = false;
  };
  const Value* find(std::string_view section, std::string_view key) const;
  [[noreturn]] void fail(const Value& v, std::string_view key, std::string_view what) const;

  std::string origin_;
  std::map<std::string, std::map<std::string, Value, std::less<>>, std::less<>> sections_;
};

/// A generated suite: which mixes to build and how long each trace is.
struct SuiteSpec {
  std::uint32_t cores = 8;
  std::uint32_t mixes_per_category = 5;
  // Follows the experiment seed unless set explicitly.
  std::optional<std::uint64_t> seed;
  std::uint64_t trace_length = 1'000'000;
  // Core-to-controller clock ratio folded into the traces; 10 approximates
  // a 5.3 GHz core against a DDR3-1066 controller.
  double clock_ratio = 10.0;
  std::vector<IntensityCategory> categories{std::begin(kAllCategories), std::end(kAllCategories)};
  std::filesystem::path output_dir = "traces";  // gen-traces only
};

struct SweepSpec {
  std::vector<std::uint64_t> thresholds{2, 4, 8};
  std::vector<Cycle> intervals{1000, 10000, 100000};
  std::uint64_t default_threshold = 4;
  Cycle default_interval = 10000;
};

struct HwCostSpec {
  std::vector<std::string> schedulers;  // empty: all
  std::uint32_t cores = 24;
  std::uint32_t queue_depth = 128;
  CostWidths widths;
};

struct ExperimentConfig {
  std::string name = "experiment";
  SimConfig sim;
  std::vector<SchedulerKind> schedulers{SchedulerKind::FrFcfs, SchedulerKind::Bliss};
  PolicyParams policy;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "results";

  // Workload source: a manifest of trace files, or a suite generated in
  // memory when no manifest is given.
  std::optional<std::filesystem::path> manifest;
  SuiteSpec suite;
  std::vector<std::string> mix_filter;  // empty: all mixes

  SweepSpec sweep;
  HwCostSpec hwcost;

  std::uint64_t suite_seed() const { return suite.seed.value_or(seed); }

  /// Cross-field checks (horizon >= clearing interval, parameter ranges).
  /// Throws ConfigError.
  void validate() const;
};

/// Parses a config. Relative paths are resolved against `base_dir`.
ExperimentConfig parse_experiment_config(const IniDocument& doc, const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Applies MEMSCHED_SEED from the environment if set. Returns true if it did.
/// Throws ConfigError if the variable is not an unsigned integer.
bool apply_seed_override(ExperimentConfig& config);

}  // namespace memsched
