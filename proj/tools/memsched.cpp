// memsched: run, sweep and cost experiments for the memory-scheduler
// simulator. Exit status: 0 success, 1 config error, 2 simulation invariant
// violation.

#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "memsched/config.hpp"
#include "memsched/experiment.hpp"
#include "memsched/hw_cost.hpp"
#include "memsched/workload.hpp"

namespace fs = std::filesystem;
using namespace memsched;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitInvariant = 2;

bool g_quiet = false;

void log_line(std::string_view msg) {
  if (!g_quiet) fmt::print(stderr, "{}\n", msg);
}

ExperimentConfig load(const std::string& path, const std::string& out_override) {
  ExperimentConfig c = load_experiment_config(path);
  if (apply_seed_override(c)) log_line(fmt::format("seed overridden by MEMSCHED_SEED: {}", c.seed));
  if (!out_override.empty()) c.output_dir = out_override;
  return c;
}

int cmd_run(const std::string& path, const std::string& out) {
  const ExperimentConfig c = load(path, out);
  const auto workloads = load_workloads(c);
  AloneRunCache cache;
  const ExperimentResult r = run_experiment(c, workloads, cache, log_line);
  write_file_atomic(c.output_dir / (c.name + ".csv"), results_csv(r.runs));
  write_file_atomic(c.output_dir / (c.name + ".hwcost.csv"), hwcost_csv(c.hwcost));
  write_file_atomic(c.output_dir / (c.name + ".meta.json"), metadata_json(c, r));
  log_line(fmt::format("{} shared runs, {} alone runs, {} failed; results in {}", r.shared_runs, r.alone_runs,
                       r.failed_runs, c.output_dir.string()));
  return r.failed_runs ? kExitInvariant : 0;
}

int cmd_sweep(const std::string& path, const std::string& out) {
  const ExperimentConfig c = load(path, out);
  const auto workloads = load_workloads(c);
  AloneRunCache cache;
  const SweepResult s = run_sweep(c, workloads, cache, log_line);
  write_file_atomic(c.output_dir / (c.name + ".sweep.csv"), sweep_csv(s));
  write_file_atomic(c.output_dir / (c.name + ".sweep_runs.csv"), results_csv(s.detail.runs));
  write_file_atomic(c.output_dir / (c.name + ".sweep.meta.json"), metadata_json(c, s.detail, {{"verb", "sweep"}}));
  for (const auto& cell : s.cells) {
    log_line(fmt::format("threshold={:<3} interval={:<6} WS={:.4f} MS={:.4f}{}", cell.threshold, cell.interval,
                         cell.mean_weighted_speedup, cell.mean_max_slowdown, cell.is_default ? "  (default)" : ""));
  }
  return s.detail.failed_runs ? kExitInvariant : 0;
}

int cmd_gen_traces(const std::string& path, const std::string& out) {
  ExperimentConfig c = load(path, "");
  const fs::path dir = out.empty() ? c.suite.output_dir : fs::path(out);
  fs::create_directories(dir);
  const Geometry& geo = c.sim.memory.geometry;
  const TraceLayout layout{geo.row_bytes, geo.cache_block_bytes};

  std::vector<ManifestMix> manifest;
  std::set<std::string> written;
  for (const auto& mix : build_mix_suite(c.suite.cores, c.suite_seed(), c.suite.mixes_per_category)) {
    if (std::find(c.suite.categories.begin(), c.suite.categories.end(), mix.category) == c.suite.categories.end()) {
      continue;
    }
    ManifestMix m{mix.name, mix.category, {}};
    for (SyntheticProfile p : mix.expand()) {
      p.length = c.suite.trace_length;
      p.clock_ratio = c.suite.clock_ratio;
      const std::string file = fmt::format("{}-{:016x}.trace", p.name, p.seed);
      if (written.insert(file).second) {
        const Trace t = generate_trace(p, layout);
        save_trace(dir / file, t);
        const TraceStats st = measure_trace(t, geo.row_bytes, p.clock_ratio);
        log_line(fmt::format("{}: {} records, MPKI {:.3f} (target {}), RBH {:.3f} (target {})", file, st.records,
                             st.mpki, p.target_mpki, st.rbh, p.target_rbh));
      }
      m.traces.emplace_back(file);
    }
    manifest.push_back(std::move(m));
  }
  write_manifest(dir / "manifest.txt", manifest);
  log_line(fmt::format("{} mixes, {} traces, manifest {}", manifest.size(), written.size(),
                       (dir / "manifest.txt").string()));
  return 0;
}

int cmd_hwcost(const std::string& path, const std::string& out) {
  const ExperimentConfig c = load(path, out);
  const std::string csv = hwcost_csv(c.hwcost);
  if (out.empty()) {
    fmt::print("{}", csv);
  } else {
    write_file_atomic(fs::path(out) / (c.name + ".hwcost.csv"), csv);
  }
  return 0;
}

int cmd_validate(const std::string& path) {
  const ExperimentConfig c = load(path, "");
  const auto workloads = load_workloads(c);
  // Dry run: a short stretch of every (workload, scheduler) pair.
  SimConfig sim = c.sim;
  sim.horizon = std::min<Cycle>(sim.horizon, 20000);
  for (const auto& w : workloads) {
    std::vector<const Trace*> ptrs;
    for (const auto& t : w.traces) ptrs.push_back(t.get());
    for (SchedulerKind k : c.schedulers) simulate(sim, ptrs, k, c.policy, c.seed);
  }
  fmt::print("ok: {} workloads x {} schedulers, horizon {} cycles, config hash {:016x}\n", workloads.size(),
             c.schedulers.size(), c.sim.horizon, config_hash(c));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memory-scheduler simulator: shared-DRAM runs, BLISS sweeps, hardware cost."};
  app.require_subcommand(1);
  app.add_flag("-q,--quiet", g_quiet, "Suppress progress output on stderr");

  std::string config;
  std::string out;
  auto with_config = [&](CLI::App* sub, bool has_out) {
    sub->add_option("config", config, "Experiment config file")->required()->check(CLI::ExistingFile);
    if (has_out) sub->add_option("-o,--out", out, "Output directory (overrides the config)");
  };
  auto* run = app.add_subcommand("run", "Alone runs, shared runs and metrics CSV");
  with_config(run, true);
  auto* sweep = app.add_subcommand("sweep", "BLISS threshold x clearing-interval grid");
  with_config(sweep, true);
  auto* gen = app.add_subcommand("gen-traces", "Write the synthetic suite's traces and manifest");
  with_config(gen, true);
  auto* hw = app.add_subcommand("hwcost", "Per-scheduler storage and comparator estimates");
  with_config(hw, true);
  auto* val = app.add_subcommand("validate", "Parse the config, load traces, dry-run each pairing");
  with_config(val, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, out);
    if (*sweep) return cmd_sweep(config, out);
    if (*gen) return cmd_gen_traces(config, out);
    if (*hw) return cmd_hwcost(config, out);
    if (*val) return cmd_validate(config);
  } catch (const InvariantViolation& e) {
    fmt::print(stderr, "invariant violation: {}\n", e.what());
    return kExitInvariant;
  } catch (const ContractViolation& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return kExitInvariant;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitConfig;
  }
  return 0;
}
