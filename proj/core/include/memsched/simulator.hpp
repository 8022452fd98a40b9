#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <queue>
#include <span>
#include <vector>

#include "memsched/core_model.hpp"
#include "memsched/dram.hpp"
#include "memsched/metrics.hpp"
#include "memsched/request.hpp"
#include "memsched/scheduler.hpp"
#include "memsched/trace.hpp"

namespace memsched {

struct MemoryConfig {
  Geometry geometry;
  TimingParams timing;
  InterleavePolicy interleave;
  std::uint32_t read_queue_capacity = 128;   // per channel
  std::uint32_t write_queue_capacity = 128;  // per channel
  // Writes become schedulable once the write queue holds more than
  // high * capacity entries and stay so until it drains to low * capacity.
  double write_high_watermark = 0.75;
  double write_low_watermark = 0.5;

  void validate() const;
  /// Stable 64-bit digest of every field; part of the alone-run cache key.
  std::uint64_t hash() const;
};

struct SimConfig {
  MemoryConfig memory;
  CoreParams core;
  Cycle horizon = 10'000'000;
  bool wrap_traces = true;
  bool record_issue_log = false;
  // Give every application a private, equally sized slice of physical
  // memory: app i's trace address a maps to i * region + (a mod region).
  // The region is a multiple of one full channel/bank rotation, so an
  // application sees the same bank mapping whatever its slot.
  bool partition_address_space = true;
};

struct IssueEvent {
  Cycle cycle = 0;
  std::uint32_t channel = 0;
  AppId app = 0;
  ReqId request = 0;
  std::uint32_t bank = 0;
  std::uint32_t row = 0;
  RowStatus status = RowStatus::Closed;
  AccessType type = AccessType::Read;

  friend bool operator==(const IssueEvent&, const IssueEvent&) = default;
};

struct AppRunStats {
  std::uint64_t retired_instructions = 0;
  double ipc = 0.0;
  std::uint64_t requests_sent = 0;
  std::uint64_t requests_served = 0;  // issued to DRAM, reads and writes
  std::uint64_t row_hits_served = 0;  // served without an activate of their own
  std::uint64_t reads_completed = 0;
  double read_latency_sum = 0.0;
  std::uint64_t stall_cycles = 0;
  StreakHistogram streaks;

  double avg_read_latency() const {
    return reads_completed ? read_latency_sum / static_cast<double>(reads_completed) : 0.0;
  }
};

struct RunResult {
  std::string scheduler;
  Cycle horizon = 0;
  std::vector<AppRunStats> apps;
  std::uint64_t incomplete_requests = 0;
  std::vector<IssueEvent> issue_log;
};

using SchedulerFactory = std::function<std::unique_ptr<Scheduler>(const SchedulerContext&)>;

/// A multi-core system sharing one DRAM subsystem, advanced one
/// memory-controller cycle at a time. Each cycle: scheduler tick, data
/// returns, core fetch/retire, then at most one command per channel in
/// ascending channel order. A request is served (and reported to the
/// scheduler, streak recorder and issue log) by its column command.
class System final : private MemoryPort {
 public:
  System(const SimConfig& config, std::span<const Trace* const> traces, const SchedulerFactory& make_sched,
         std::uint64_t seed);
  System(const SimConfig& config, std::span<const Trace* const> traces, SchedulerKind kind,
         const PolicyParams& params, std::uint64_t seed);
  System(const System&) = delete;
  System& operator=(const System&) = delete;

  void step();
  void run_until(Cycle end);
  /// Runs to the configured horizon and collects the results.
  RunResult run();
  /// Flushes open streaks and collects results at the current cycle.
  RunResult finish();

  Cycle now() const { return now_; }
  const Scheduler& scheduler() const { return *sched_; }
  Scheduler& scheduler() { return *sched_; }
  const Core& core(AppId app) const { return cores_[app]; }
  std::uint32_t num_apps() const { return static_cast<std::uint32_t>(cores_.size()); }
  /// Size of each application's physical slice; 0 when not partitioned.
  Addr region_bytes() const { return region_bytes_; }
  const ChannelState& channel(std::uint32_t c) const { return channels_[c].state; }
  std::size_t read_queue_size(std::uint32_t c) const { return channels_[c].reads.size(); }
  std::size_t write_queue_size(std::uint32_t c) const { return channels_[c].writes.size(); }
  const std::vector<IssueEvent>& issue_log() const { return log_; }

 private:
  struct Channel {
    explicit Channel(const Geometry& g, const TimingParams& t) : state(g, t) {}
    ChannelState state;
    std::vector<MemoryRequest*> reads;
    std::vector<MemoryRequest*> writes;
    bool draining = false;
  };

  struct Pending {
    Cycle when;
    MemoryRequest* req;
    bool operator>(const Pending& o) const { return when != o.when ? when > o.when : req->id > o.req->id; }
  };

  bool can_accept(AppId app, Addr block, AccessType type) override;
  void send(AppId app, Addr block, AccessType type, Cycle now) override;

  DecodedAddress locate(AppId app, Addr block) const;
  void schedule_channel(std::uint32_t index);
  void retire_completions();

  SimConfig config_;
  std::vector<Core> cores_;
  std::vector<Channel> channels_;
  std::unique_ptr<Scheduler> sched_;

  std::vector<MemoryRequest> pool_;
  std::vector<MemoryRequest*> free_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> in_flight_;
  std::vector<std::pair<PriorityKey, Candidate>> nominees_;

  std::vector<AppRunStats> stats_;
  StreakRecorder streaks_;
  std::vector<IssueEvent> log_;
  Addr region_bytes_ = 0;  // 0: no partitioning
  ReqId next_id_ = 0;
  Cycle now_ = 0;
};

/// Convenience wrapper: build a System and run it to the horizon.
RunResult simulate(const SimConfig& config, std::span<const Trace* const> traces, SchedulerKind kind,
                   const PolicyParams& params, std::uint64_t seed);

}  // namespace memsched
