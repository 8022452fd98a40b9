#include "memsched/hw_cost.hpp"

#include <bit>

namespace memsched {

std::uint32_t ceil_log2(std::uint64_t n) { return n <= 1 ? 0 : static_cast<std::uint32_t>(std::bit_width(n - 1)); }

CostReport estimate_storage(std::string_view scheduler, std::uint32_t core_count, std::uint32_t queue_depth,
                            const CostWidths& w) {
  if (core_count == 0 || queue_depth == 0) throw ConfigError("cost model needs core count and queue depth >= 1");
  const SchedulerKind kind = scheduler_from_name(scheduler);
  const std::uint64_t n = core_count;
  const std::uint64_t q = queue_depth;
  const std::uint64_t id = ceil_log2(n);
  const std::uint64_t banks = w.banks_per_channel;

  CostReport r;
  r.scheduler_name = std::string(scheduler_name(kind));
  auto add = [&r](std::string name, std::uint64_t bits) { r.breakdown.push_back({std::move(name), bits}); };
  auto request_ids = [&] { add("per-request application IDs", q * id); };

  switch (kind) {
    case SchedulerKind::FrFcfs:
      break;
    case SchedulerKind::FrFcfsCap:
      // Rows are private to an application, so a run of hits to one open
      // row needs no application ID to attribute it.
      add("per-bank hit-streak counters", banks * w.counter_bits);
      add("cap register", w.threshold_bits);
      break;
    case SchedulerKind::Bliss:
    case SchedulerKind::BlissIndividualClearing:
      add("last application ID", id);
      add("consecutive-request counter", w.counter_bits);
      add("blacklisting threshold register", w.threshold_bits);
      add("blacklist bit vector", n);
      request_ids();
      if (kind == SchedulerKind::BlissIndividualClearing) add("per-application clearing countdowns", n * w.accumulator_bits);
      break;
    case SchedulerKind::FrFcfsCapBlacklisting:
      add("per-bank streak application IDs", banks * id);
      add("per-bank hit-streak counters", banks * w.counter_bits);
      add("hit threshold register", w.threshold_bits);
      add("blacklist bit vector", n);
      request_ids();
      break;
    case SchedulerKind::ParBs:
      request_ids();
      add("per-request marked bits", q);
      add("per-application per-bank request counters", n * banks * w.counter_bits);
      add("marking-cap register", w.threshold_bits);
      add("rank registers", n * id);
      break;
    case SchedulerKind::Atlas:
      request_ids();
      add("attained-service accumulators (quantum)", n * w.accumulator_bits);
      add("attained-service accumulators (history)", n * w.accumulator_bits);
      add("rank registers", n * id);
      break;
    case SchedulerKind::Tcm:
      request_ids();
      add("MPKI accumulators", n * w.accumulator_bits);
      add("bandwidth accumulators", n * w.accumulator_bits);
      add("rank registers", n * id);
      add("cluster bits", n);
      break;
    case SchedulerKind::Grouping:
      request_ids();
      add("MPKI accumulators", n * w.accumulator_bits);
      add("cluster bits", n);
      break;
    case SchedulerKind::TcmCluster:
      request_ids();
      add("MPKI accumulators", n * w.accumulator_bits);
      add("bandwidth accumulators", n * w.accumulator_bits);
      add("cluster bits", n);
      break;
  }
  for (const auto& item : r.breakdown) r.storage_bits += item.bits;
  r.comparator_count = estimate_comparators(scheduler, core_count);
  return r;
}

std::uint64_t estimate_comparators(std::string_view scheduler, std::uint32_t core_count) {
  if (core_count == 0) throw ConfigError("cost model needs core count >= 1");
  const std::uint64_t sort_proxy = std::uint64_t{core_count} * ceil_log2(core_count);
  switch (scheduler_from_name(scheduler)) {
    case SchedulerKind::FrFcfs:
      return 0;
    case SchedulerKind::FrFcfsCap:
      return 1;  // streak count vs cap
    case SchedulerKind::Bliss:
    case SchedulerKind::BlissIndividualClearing:
    case SchedulerKind::FrFcfsCapBlacklisting:
      return 2;  // ID equality, count vs threshold
    case SchedulerKind::ParBs:
    case SchedulerKind::Atlas:
    case SchedulerKind::Tcm:
    case SchedulerKind::Grouping:
    case SchedulerKind::TcmCluster:
      return sort_proxy;
  }
  return 0;
}

}  // namespace memsched
