#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "memsched/dram.hpp"
#include "memsched/request.hpp"
#include "memsched/types.hpp"

namespace memsched {

enum class SchedulerKind : std::uint8_t {
  FrFcfs,
  FrFcfsCap,
  ParBs,
  Atlas,
  Tcm,
  Grouping,
  TcmCluster,
  Bliss,
  BlissIndividualClearing,
  FrFcfsCapBlacklisting,
};

std::string_view scheduler_name(SchedulerKind kind);
/// Accepts the canonical names ("FRFCFS", "BLISS-Individual-Clearing", ...),
/// case-insensitively. Throws ConfigError for unknown names.
SchedulerKind scheduler_from_name(std::string_view name);
std::span<const SchedulerKind> all_scheduler_kinds();

/// Tuning knobs for every policy. Counts set to kUnbounded disable the
/// corresponding mechanism (e.g. a cap that is never reached).
struct PolicyParams {
  std::uint64_t frfcfs_cap = 4;
  std::uint32_t parbs_marking_cap = 5;
  double atlas_history_weight = 0.875;
  Cycle atlas_quantum = 100000;
  double tcm_cluster_thresh = 0.2;
  Cycle tcm_shuffle_interval = 1000;
  Cycle tcm_interval_length = 100000;
  std::uint64_t blacklisting_threshold = 4;
  Cycle clearing_interval = 10000;
  // Blacklist only once the consecutive count exceeds the threshold instead
  // of when it reaches it.
  bool blacklist_on_exceed = false;
  std::uint64_t cap_blacklist_hits = 4;  // FRFCFS-Cap-Blacklisting N

  void validate() const;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

/// A queued request that could issue this cycle, with its row-buffer status.
struct Candidate {
  const MemoryRequest* request = nullptr;
  RowStatus status = RowStatus::Closed;
  std::uint32_t bank = 0;  // bank index within the channel

  bool row_hit() const { return status == RowStatus::Hit; }
};

/// Lexicographic priority: smaller compares as higher priority. Policies fill
/// `classes`; ties fall through to older arrival, then lower request id, so
/// the order is total over any request set.
struct PriorityKey {
  std::array<std::int64_t, 3> classes{};
  Cycle arrival = 0;
  ReqId id = 0;

  friend auto operator<=>(const PriorityKey&, const PriorityKey&) = default;
};

struct SchedulerContext {
  std::uint32_t num_apps = 1;
  std::uint32_t num_channels = 1;
  std::uint32_t banks_per_channel = 8;
  TimingParams timing;
  std::uint64_t seed = 0;
  // Retired instruction count per application; used by intensity-based
  // policies. When empty they fall back to request counts.
  std::function<std::uint64_t(AppId)> retired_instructions;
};

class Scheduler {
 public:
  virtual ~Scheduler() = default;

  virtual SchedulerKind kind() const = 0;
  std::string_view name() const { return scheduler_name(kind()); }

  /// Called once per cycle before any channel picks.
  virtual void tick(Cycle /*now*/) {}
  virtual void on_arrival(const MemoryRequest& /*req*/, Cycle /*now*/) {}
  /// Called before a channel picks, with that channel's full read queue.
  virtual void prepare(std::uint32_t /*channel*/, std::span<MemoryRequest* const> /*queue*/, Cycle /*now*/) {}
  virtual PriorityKey key(std::uint32_t channel, const Candidate& c, Cycle now) const = 0;
  virtual void on_issue(std::uint32_t /*channel*/, const Candidate& /*c*/, Cycle /*now*/) {}
};

/// Highest-priority candidate, or nullptr when `eligible` is empty.
const Candidate* pick_next(const Scheduler& sched, std::uint32_t channel, std::span<const Candidate> eligible,
                           Cycle now);

/// One channel cycle of arbitration. Each ready bank nominates its
/// highest-priority queued request; the channel takes the best nominee whose
/// command can go now (a row hit also needs the data bus). A bank whose
/// nominee is a bus-blocked hit issues nothing, so a lower-priority request
/// never closes a row the policy would rather keep serving.
/// `nominees` is scratch space, resized as needed.
std::optional<Candidate> pick_command(const Scheduler& sched, std::uint32_t channel,
                                      std::span<MemoryRequest* const> queue, const ChannelState& state, Cycle now,
                                      std::vector<std::pair<PriorityKey, Candidate>>& nominees);

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind, const PolicyParams& params,
                                          const SchedulerContext& ctx);

}  // namespace memsched
