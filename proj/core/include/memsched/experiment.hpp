#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "memsched/config.hpp"
#include "memsched/metrics.hpp"
#include "memsched/simulator.hpp"

namespace memsched {

using Logger = std::function<void(std::string_view)>;

/// One multiprogrammed workload: a trace per core.
struct WorkloadInstance {
  std::string name;
  IntensityCategory category = IntensityCategory::Pct50;
  std::vector<std::shared_ptr<const Trace>> traces;
  std::vector<std::string> labels;  // profile name or trace path, per core
};

/// Every workload the config refers to. All trace files are loaded (and
/// parsed) here, so a missing or malformed trace fails before any
/// simulation starts. Throws ConfigError.
std::vector<WorkloadInstance> load_workloads(const ExperimentConfig& config);

/// Generated-suite workloads without touching the filesystem.
std::vector<WorkloadInstance> generate_workloads(const SuiteSpec& suite, std::uint64_t seed,
                                                 const Geometry& geometry = {});

/// Digest of everything besides the trace that determines an alone run.
std::uint64_t alone_config_hash(const SimConfig& sim);

/// IPC of each trace running alone under FRFCFS, keyed by
/// (trace hash, alone_config_hash).
class AloneRunCache {
 public:
  double ipc_alone(const Trace& trace, const SimConfig& sim, const Logger& log = {});

  std::size_t runs() const { return runs_; }
  std::size_t hits() const { return hits_; }
  std::size_t size() const { return cache_.size(); }

 private:
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> cache_;
  std::size_t runs_ = 0;
  std::size_t hits_ = 0;
};

struct WorkloadRun {
  std::string workload;
  std::string scheduler;  // label; sweeps append the swept parameters
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  RunMetrics metrics;
  std::uint64_t incomplete_requests = 0;
};

/// Shared run of one workload under one scheduler, plus metrics against the
/// cached alone runs. Invariant violations are caught and reported in the
/// returned run (ok == false).
WorkloadRun run_workload(const WorkloadInstance& workload, SchedulerKind kind, const PolicyParams& params,
                         const SimConfig& sim, std::uint64_t seed, AloneRunCache& cache, const Logger& log = {},
                         std::string label = {});

struct ExperimentResult {
  std::vector<WorkloadRun> runs;
  std::size_t alone_runs = 0;
  std::size_t shared_runs = 0;
  std::size_t failed_runs = 0;
};

ExperimentResult run_experiment(const ExperimentConfig& config, std::span<const WorkloadInstance> workloads,
                                AloneRunCache& cache, const Logger& log = {});

struct SweepCell {
  std::uint64_t threshold = 0;
  Cycle interval = 0;
  bool is_default = false;
  double mean_weighted_speedup = 0.0;
  double mean_harmonic_speedup = 0.0;
  double mean_max_slowdown = 0.0;
  double mean_avg_latency = 0.0;
  std::size_t runs = 0;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // thresholds outer, intervals inner
  ExperimentResult detail;

  const SweepCell& cell(std::uint64_t threshold, Cycle interval) const;
};

/// BLISS over the threshold x interval grid of `config.sweep`.
SweepResult run_sweep(const ExperimentConfig& config, std::span<const WorkloadInstance> workloads,
                      AloneRunCache& cache, const Logger& log = {});

inline constexpr std::string_view kResultsCsvHeader =
    "workload,scheduler,seed,weighted_speedup,harmonic_speedup,max_slowdown,avg_req_latency_cycles,app_id,"
    "ipc_alone,ipc_shared,streak_p50,streak_p95";

/// One system row per run (app fields empty) followed by one row per app
/// (system fields empty except the app's own average latency). Failed runs
/// are skipped.
std::string results_csv(std::span<const WorkloadRun> runs);
std::string sweep_csv(const SweepResult& sweep);
std::string hwcost_csv(const HwCostSpec& spec);

/// Stable digest of the parsed config (not of its text).
std::uint64_t config_hash(const ExperimentConfig& config);
/// JSON document describing the run: seeds, config hash, policy parameters,
/// horizon and counts. `extra` is merged in as top-level string fields.
std::string metadata_json(const ExperimentConfig& config, const ExperimentResult& result,
                          const std::map<std::string, std::string>& extra = {});

/// Writes via a temporary file in the same directory and a rename, so readers
/// never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace memsched
