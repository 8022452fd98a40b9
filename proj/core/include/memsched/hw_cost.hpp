#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "memsched/scheduler.hpp"

namespace memsched {

/// Register widths where the mechanism does not pin one down.
struct CostWidths {
  std::uint32_t counter_bits = 8;
  std::uint32_t threshold_bits = 8;
  std::uint32_t accumulator_bits = 16;
  std::uint32_t banks_per_channel = 8;
};

struct CostItem {
  std::string name;
  std::uint64_t bits = 0;
};

/// Per-channel storage a policy adds on top of a plain request queue.
/// storage_bits is always the sum of the breakdown.
struct CostReport {
  std::string scheduler_name;
  std::uint64_t storage_bits = 0;
  std::uint64_t comparator_count = 0;
  std::vector<CostItem> breakdown;
};

/// ceil(log2(n)); 0 for n <= 1.
std::uint32_t ceil_log2(std::uint64_t n);

/// Throws ConfigError for unknown names or core_count/queue_depth of 0.
CostReport estimate_storage(std::string_view scheduler, std::uint32_t core_count, std::uint32_t queue_depth,
                            const CostWidths& widths = {});

/// App-state comparisons per scheduling decision. For ranking policies this
/// is a sorting-network proxy, core_count * ceil(log2(core_count)), not a
/// gate count.
std::uint64_t estimate_comparators(std::string_view scheduler, std::uint32_t core_count);

}  // namespace memsched
