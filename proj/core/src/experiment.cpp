#include "memsched/experiment.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <ctime>
#include <fstream>
#include <set>

#include <fmt/core.h>

#include "json.hpp"

namespace memsched {

namespace {

struct Fnv {
  std::uint64_t h = 0xcbf29ce484222325ull;
  void bytes(std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  }
  void mix(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  }
};

void say(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

std::string fixed(double v) { return fmt::format("{:.6f}", v); }

nlohmann::json policy_json(const PolicyParams& p) {
  return {{"frfcfs_cap", p.frfcfs_cap},
          {"parbs_marking_cap", p.parbs_marking_cap},
          {"atlas_history_weight", p.atlas_history_weight},
          {"atlas_quantum", p.atlas_quantum},
          {"tcm_cluster_thresh", p.tcm_cluster_thresh},
          {"tcm_shuffle_interval", p.tcm_shuffle_interval},
          {"tcm_interval_length", p.tcm_interval_length},
          {"blacklisting_threshold", p.blacklisting_threshold},
          {"clearing_interval", p.clearing_interval},
          {"blacklist_on_exceed", p.blacklist_on_exceed},
          {"cap_blacklist_hits", p.cap_blacklist_hits}};
}

nlohmann::json config_json(const ExperimentConfig& c) {
  const auto& m = c.sim.memory;
  nlohmann::json j;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["suite_seed"] = c.suite_seed();
  j["horizon_cycles"] = c.sim.horizon;
  j["wrap_traces"] = c.sim.wrap_traces;
  j["partition_address_space"] = c.sim.partition_address_space;
  j["warmup_cycles"] = 0;
  std::vector<std::string> scheds;
  for (auto k : c.schedulers) scheds.emplace_back(scheduler_name(k));
  j["schedulers"] = scheds;
  j["memory"] = {{"channels", m.geometry.channels},
                 {"ranks_per_channel", m.geometry.ranks_per_channel},
                 {"banks_per_rank", m.geometry.banks_per_rank},
                 {"row_bytes", m.geometry.row_bytes},
                 {"cache_block_bytes", m.geometry.cache_block_bytes},
                 {"rows_per_bank", m.geometry.rows_per_bank},
                 {"interleave", static_cast<int>(m.interleave.kind)},
                 {"stripe_blocks", m.interleave.blocks_per_stripe},
                 {"t_rcd", m.timing.t_rcd},
                 {"t_rp", m.timing.t_rp},
                 {"t_cl", m.timing.t_cl},
                 {"t_ccd", m.timing.t_ccd},
                 {"bus_transfer", m.timing.bus_transfer},
                 {"read_queue", m.read_queue_capacity},
                 {"write_queue", m.write_queue_capacity},
                 {"write_high_watermark", m.write_high_watermark},
                 {"write_low_watermark", m.write_low_watermark}};
  j["core"] = {{"issue_width", c.sim.core.issue_width},
               {"window_size", c.sim.core.window_size},
               {"mshrs", c.sim.core.mshr_count}};
  j["policy"] = policy_json(c.policy);
  if (c.manifest) {
    j["workload"] = {{"manifest", c.manifest->string()}};
  } else {
    std::vector<int> cats;
    for (auto cat : c.suite.categories) cats.push_back(category_percent(cat));
    j["workload"] = {{"cores", c.suite.cores},
                     {"mixes_per_category", c.suite.mixes_per_category},
                     {"trace_length", c.suite.trace_length},
                     {"clock_ratio", c.suite.clock_ratio},
                     {"categories", cats}};
  }
  j["mix_filter"] = c.mix_filter;
  j["sweep"] = {{"thresholds", c.sweep.thresholds}, {"intervals", c.sweep.intervals}};
  return j;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void apply_filter(std::vector<WorkloadInstance>& all, const std::vector<std::string>& filter) {
  if (filter.empty()) return;
  for (const auto& name : filter) {
    if (std::none_of(all.begin(), all.end(), [&](const auto& w) { return w.name == name; })) {
      throw ConfigError(fmt::format("mix '{}' is not in the workload suite", name));
    }
  }
  std::erase_if(all, [&](const auto& w) { return std::find(filter.begin(), filter.end(), w.name) == filter.end(); });
}

}  // namespace

std::vector<WorkloadInstance> generate_workloads(const SuiteSpec& suite, std::uint64_t seed, const Geometry& geometry) {
  const TraceLayout layout{geometry.row_bytes, geometry.cache_block_bytes};
  std::map<std::pair<std::string, std::uint64_t>, std::shared_ptr<const Trace>> made;
  std::vector<WorkloadInstance> out;
  for (const auto& mix : build_mix_suite(suite.cores, seed, suite.mixes_per_category)) {
    if (std::find(suite.categories.begin(), suite.categories.end(), mix.category) == suite.categories.end()) continue;
    WorkloadInstance w{mix.name, mix.category, {}, {}};
    for (SyntheticProfile p : mix.expand()) {
      p.length = suite.trace_length;
      p.clock_ratio = suite.clock_ratio;
      auto& slot = made[{p.name, p.seed}];
      if (!slot) slot = std::make_shared<const Trace>(generate_trace(p, layout));
      w.traces.push_back(slot);
      w.labels.push_back(p.name);
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<WorkloadInstance> load_workloads(const ExperimentConfig& config) {
  std::vector<WorkloadInstance> out;
  if (!config.manifest) {
    out = generate_workloads(config.suite, config.suite_seed(), config.sim.memory.geometry);
  } else {
    std::map<std::filesystem::path, std::shared_ptr<const Trace>> loaded;
    for (const auto& mix : read_manifest(*config.manifest)) {
      WorkloadInstance w{mix.name, mix.category, {}, {}};
      for (const auto& path : mix.traces) {
        auto& slot = loaded[path];
        if (!slot) {
          if (!std::filesystem::exists(path)) {
            throw ConfigError(fmt::format("mix '{}': trace {} does not exist", mix.name, path.string()));
          }
          slot = std::make_shared<const Trace>(load_trace(path));
        }
        w.traces.push_back(slot);
        w.labels.push_back(path.string());
      }
      out.push_back(std::move(w));
    }
  }
  apply_filter(out, config.mix_filter);
  if (out.empty()) throw ConfigError("the workload suite is empty");
  return out;
}

std::uint64_t alone_config_hash(const SimConfig& sim) {
  Fnv f;
  f.mix(sim.memory.hash());
  f.mix(sim.core.issue_width);
  f.mix(sim.core.window_size);
  f.mix(sim.core.mshr_count);
  f.mix(sim.horizon);
  f.mix(sim.wrap_traces);
  f.mix(sim.partition_address_space);
  return f.h;
}

double AloneRunCache::ipc_alone(const Trace& trace, const SimConfig& sim, const Logger& log) {
  const auto key = std::make_pair(trace_hash(trace), alone_config_hash(sim));
  if (const auto it = cache_.find(key); it != cache_.end()) {
    ++hits_;
    say(log, fmt::format("alone-run cache hit trace={:016x} config={:016x}", key.first, key.second));
    return it->second;
  }
  SimConfig alone = sim;
  alone.record_issue_log = false;
  const Trace* traces[] = {&trace};
  const RunResult r = simulate(alone, traces, SchedulerKind::FrFcfs, PolicyParams{}, 0);
  ++runs_;
  say(log, fmt::format("alone-run cache miss trace={:016x} config={:016x} ipc={:.6f}", key.first, key.second,
                       r.apps[0].ipc));
  cache_.emplace(key, r.apps[0].ipc);
  return r.apps[0].ipc;
}

WorkloadRun run_workload(const WorkloadInstance& workload, SchedulerKind kind, const PolicyParams& params,
                         const SimConfig& sim, std::uint64_t seed, AloneRunCache& cache, const Logger& log,
                         std::string label) {
  WorkloadRun run;
  run.workload = workload.name;
  run.scheduler = label.empty() ? std::string(scheduler_name(kind)) : std::move(label);
  run.seed = seed;
  try {
    std::vector<double> alone;
    for (const auto& t : workload.traces) alone.push_back(cache.ipc_alone(*t, sim, log));

    std::vector<const Trace*> ptrs;
    for (const auto& t : workload.traces) ptrs.push_back(t.get());
    const RunResult r = simulate(sim, ptrs, kind, params, seed);
    run.incomplete_requests = r.incomplete_requests;

    std::vector<std::uint64_t> weights;
    for (AppId a = 0; a < r.apps.size(); ++a) {
      const AppRunStats& s = r.apps[a];
      run.metrics.apps.push_back({a, s.ipc, alone[a], s.requests_served, s.avg_read_latency(), s.streaks});
      weights.push_back(s.reads_completed);
    }
    run.metrics.system = compute_system_metrics(run.metrics.apps, weights);
    std::uint64_t served = 0;
    std::uint64_t hits = 0;
    for (const auto& s : r.apps) {
      served += s.requests_served;
      hits += s.row_hits_served;
    }
    say(log, fmt::format("{} {}: WS={:.4f} HS={:.4f} MS={:.4f} lat={:.2f} served={} rbh={:.3f}", run.workload, run.scheduler,
                         run.metrics.system.weighted_speedup, run.metrics.system.harmonic_speedup,
                         run.metrics.system.max_slowdown, run.metrics.system.avg_request_latency, served,
                         served ? static_cast<double>(hits) / static_cast<double>(served) : 0.0));
  } catch (const InvariantViolation& e) {
    run.ok = false;
    run.error = fmt::format("invariant violation: {}", e.what());
  } catch (const ContractViolation& e) {
    run.ok = false;
    run.error = fmt::format("contract violation: {}", e.what());
  }
  if (!run.ok) say(log, fmt::format("{} {}: FAILED {}", run.workload, run.scheduler, run.error));
  return run;
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::span<const WorkloadInstance> workloads,
                                AloneRunCache& cache, const Logger& log) {
  ExperimentResult result;
  const std::size_t alone_before = cache.runs();
  for (const auto& w : workloads) {
    for (SchedulerKind kind : config.schedulers) {
      result.runs.push_back(run_workload(w, kind, config.policy, config.sim, config.seed, cache, log));
      ++result.shared_runs;
      if (!result.runs.back().ok) ++result.failed_runs;
    }
  }
  result.alone_runs = cache.runs() - alone_before;
  return result;
}

const SweepCell& SweepResult::cell(std::uint64_t threshold, Cycle interval) const {
  for (const auto& c : cells) {
    if (c.threshold == threshold && c.interval == interval) return c;
  }
  throw ContractViolation(fmt::format("no sweep cell for threshold {} interval {}", threshold, interval));
}

SweepResult run_sweep(const ExperimentConfig& config, std::span<const WorkloadInstance> workloads,
                      AloneRunCache& cache, const Logger& log) {
  SweepResult sweep;
  const std::size_t alone_before = cache.runs();
  for (std::uint64_t threshold : config.sweep.thresholds) {
    for (Cycle interval : config.sweep.intervals) {
      PolicyParams p = config.policy;
      p.blacklisting_threshold = threshold;
      p.clearing_interval = interval;
      SweepCell cell;
      cell.threshold = threshold;
      cell.interval = interval;
      cell.is_default = threshold == config.sweep.default_threshold && interval == config.sweep.default_interval;
      const std::string label = fmt::format("BLISS/t{}/i{}", threshold, interval);
      for (const auto& w : workloads) {
        WorkloadRun run = run_workload(w, SchedulerKind::Bliss, p, config.sim, config.seed, cache, log, label);
        ++sweep.detail.shared_runs;
        if (!run.ok) {
          ++sweep.detail.failed_runs;
        } else {
          const auto& m = run.metrics.system;
          cell.mean_weighted_speedup += m.weighted_speedup;
          cell.mean_harmonic_speedup += m.harmonic_speedup;
          cell.mean_max_slowdown += m.max_slowdown;
          cell.mean_avg_latency += m.avg_request_latency;
          ++cell.runs;
        }
        sweep.detail.runs.push_back(std::move(run));
      }
      if (cell.runs > 0) {
        const double n = static_cast<double>(cell.runs);
        cell.mean_weighted_speedup /= n;
        cell.mean_harmonic_speedup /= n;
        cell.mean_max_slowdown /= n;
        cell.mean_avg_latency /= n;
      }
      sweep.cells.push_back(cell);
    }
  }
  sweep.detail.alone_runs = cache.runs() - alone_before;
  return sweep;
}

std::string results_csv(std::span<const WorkloadRun> runs) {
  std::string out(kResultsCsvHeader);
  out += '\n';
  for (const auto& r : runs) {
    if (!r.ok) continue;
    const auto& s = r.metrics.system;
    out += fmt::format("{},{},{},{},{},{},{},,,,,\n", r.workload, r.scheduler, r.seed, fixed(s.weighted_speedup),
                       fixed(s.harmonic_speedup), fixed(s.max_slowdown), fixed(s.avg_request_latency));
    for (const auto& a : r.metrics.apps) {
      out += fmt::format("{},{},{},,,,{},{},{},{},{},{}\n", r.workload, r.scheduler, r.seed,
                         fixed(a.avg_request_latency), a.app, fixed(a.ipc_alone), fixed(a.ipc_shared),
                         a.streaks.percentile(0.5), a.streaks.percentile(0.95));
    }
  }
  return out;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string out =
      "blacklisting_threshold,clearing_interval,default,runs,mean_weighted_speedup,mean_harmonic_speedup,"
      "mean_max_slowdown,mean_avg_req_latency_cycles\n";
  for (const auto& c : sweep.cells) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", c.threshold, c.interval, c.is_default ? 1 : 0, c.runs,
                       fixed(c.mean_weighted_speedup), fixed(c.mean_harmonic_speedup), fixed(c.mean_max_slowdown),
                       fixed(c.mean_avg_latency));
  }
  return out;
}

std::string hwcost_csv(const HwCostSpec& spec) {
  std::vector<std::string> names = spec.schedulers;
  if (names.empty()) {
    for (auto k : all_scheduler_kinds()) names.emplace_back(scheduler_name(k));
  }
  // The comparator column is a sorting-network proxy, not a gate count.
  std::string out = "scheduler,cores,queue_depth,storage_bits_per_channel,comparator_proxy,breakdown\n";
  for (const auto& name : names) {
    const CostReport r = estimate_storage(name, spec.cores, spec.queue_depth, spec.widths);
    std::string items;
    for (const auto& item : r.breakdown) {
      if (!items.empty()) items += ';';
      items += fmt::format("{}={}", item.name, item.bits);
    }
    out += fmt::format("{},{},{},{},{},\"{}\"\n", r.scheduler_name, spec.cores, spec.queue_depth, r.storage_bits,
                       r.comparator_count, items);
  }
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  Fnv f;
  f.bytes(config_json(config).dump());
  return f.h;
}

std::string metadata_json(const ExperimentConfig& config, const ExperimentResult& result,
                          const std::map<std::string, std::string>& extra) {
  nlohmann::json j;
  j["config"] = config_json(config);
  j["config_hash"] = fmt::format("{:016x}", config_hash(config));
  j["seed"] = config.seed;
  j["policy"] = policy_json(config.policy);
  j["alone_runs"] = result.alone_runs;
  j["shared_runs"] = result.shared_runs;
  j["failed_runs"] = result.failed_runs;
  std::vector<nlohmann::json> failures;
  for (const auto& r : result.runs) {
    if (!r.ok) failures.push_back({{"workload", r.workload}, {"scheduler", r.scheduler}, {"error", r.error}});
  }
  j["failures"] = failures;
  j["generated_at"] = utc_timestamp();
  for (const auto& [k, v] : extra) j[k] = v;
  return j.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError(fmt::format("cannot write {}", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ConfigError(fmt::format("failed writing {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace memsched
