#include "memsched/scheduler.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <vector>

#include <fmt/core.h>

#include "memsched/policies.hpp"

namespace memsched {

namespace {

constexpr std::array kAllKinds = {
    SchedulerKind::FrFcfs,     SchedulerKind::FrFcfsCap,  SchedulerKind::ParBs,
    SchedulerKind::Atlas,      SchedulerKind::Tcm,        SchedulerKind::Grouping,
    SchedulerKind::TcmCluster, SchedulerKind::Bliss,      SchedulerKind::BlissIndividualClearing,
    SchedulerKind::FrFcfsCapBlacklisting,
};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view scheduler_name(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::FrFcfs: return "FRFCFS";
    case SchedulerKind::FrFcfsCap: return "FRFCFS-Cap";
    case SchedulerKind::ParBs: return "PARBS";
    case SchedulerKind::Atlas: return "ATLAS";
    case SchedulerKind::Tcm: return "TCM";
    case SchedulerKind::Grouping: return "Grouping";
    case SchedulerKind::TcmCluster: return "TCM-Cluster";
    case SchedulerKind::Bliss: return "BLISS";
    case SchedulerKind::BlissIndividualClearing: return "BLISS-Individual-Clearing";
    case SchedulerKind::FrFcfsCapBlacklisting: return "FRFCFS-Cap-Blacklisting";
  }
  return "unknown";
}

SchedulerKind scheduler_from_name(std::string_view name) {
  for (auto k : kAllKinds) {
    if (iequals(scheduler_name(k), name)) return k;
  }
  throw ConfigError(fmt::format("unknown scheduler '{}'", name));
}

std::span<const SchedulerKind> all_scheduler_kinds() { return kAllKinds; }

void PolicyParams::validate() const {
  auto fraction = [](double v) { return v > 0.0 && v < 1.0; };
  if (frfcfs_cap == 0 || parbs_marking_cap == 0 || blacklisting_threshold == 0 || cap_blacklist_hits == 0) {
    throw ConfigError("policy counts must be >= 1");
  }
  if (atlas_quantum == 0 || tcm_shuffle_interval == 0 || tcm_interval_length == 0 || clearing_interval == 0) {
    throw ConfigError("policy intervals must be >= 1 cycle");
  }
  if (!fraction(atlas_history_weight)) throw ConfigError("ATLAS history weight must be in (0,1)");
  // 1.0 is accepted: it puts every application in one cluster.
  if (!(tcm_cluster_thresh > 0.0 && tcm_cluster_thresh <= 1.0)) {
    throw ConfigError("cluster threshold must be in (0,1]");
  }
}

const Candidate* pick_next(const Scheduler& sched, std::uint32_t channel, std::span<const Candidate> eligible,
                           Cycle now) {
  const Candidate* best = nullptr;
  PriorityKey best_key;
  for (const Candidate& c : eligible) {
    PriorityKey k = sched.key(channel, c, now);
    if (best == nullptr || k < best_key) {
      best = &c;
      best_key = k;
    }
  }
  return best;
}

std::optional<Candidate> pick_command(const Scheduler& sched, std::uint32_t channel,
                                      std::span<MemoryRequest* const> queue, const ChannelState& state, Cycle now,
                                      std::vector<std::pair<PriorityKey, Candidate>>& nominees) {
  nominees.assign(state.banks().size(), {PriorityKey{}, Candidate{}});
  for (const MemoryRequest* r : queue) {
    const std::uint32_t b = state.bank_index(r->decoded);
    if (!state.bank_ready(b, now)) continue;
    const Candidate c{r, classify_access(state.bank(b), r->decoded.row), b};
    const PriorityKey k = sched.key(channel, c, now);
    auto& slot = nominees[b];
    if (slot.second.request == nullptr || k < slot.first) slot = {k, c};
  }
  const std::pair<PriorityKey, Candidate>* best = nullptr;
  for (const auto& n : nominees) {
    if (n.second.request == nullptr || !state.can_issue(n.second.bank, n.second.status, now)) continue;
    if (best == nullptr || n.first < best->first) best = &n;
  }
  if (best == nullptr) return std::nullopt;
  return best->second;
}

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind, const PolicyParams& params,
                                          const SchedulerContext& ctx) {
  params.validate();
  switch (kind) {
    case SchedulerKind::FrFcfs:
      return std::make_unique<FrFcfsScheduler>();
    case SchedulerKind::FrFcfsCap:
      return std::make_unique<FrFcfsCapScheduler>(params, ctx);
    case SchedulerKind::ParBs:
      return std::make_unique<ParBsScheduler>(params, ctx);
    case SchedulerKind::Atlas:
      return std::make_unique<AtlasScheduler>(params, ctx);
    case SchedulerKind::Tcm:
      return std::make_unique<TcmScheduler>(params, ctx);
    case SchedulerKind::Grouping:
    case SchedulerKind::TcmCluster:
      return std::make_unique<TwoGroupScheduler>(params, ctx, kind);
    case SchedulerKind::Bliss:
      return std::make_unique<BlissScheduler>(params, ctx, ClearingMode::Synchronous);
    case SchedulerKind::BlissIndividualClearing:
      return std::make_unique<BlissScheduler>(params, ctx, ClearingMode::Individual);
    case SchedulerKind::FrFcfsCapBlacklisting:
      return std::make_unique<FrFcfsCapBlacklistingScheduler>(params, ctx);
  }
  throw ConfigError("unknown scheduler kind");
}

}  // namespace memsched
