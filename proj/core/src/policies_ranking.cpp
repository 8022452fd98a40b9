#include <algorithm>
#include <map>
#include <numeric>
#include <utility>

#include "memsched/policies.hpp"

namespace memsched {

ParbsBatch parbs_form_batch(std::span<const MemoryRequest* const> queue, std::uint32_t num_apps,
                            std::uint32_t banks_per_rank, std::uint32_t marking_cap) {
  std::vector<const MemoryRequest*> by_age(queue.begin(), queue.end());
  std::sort(by_age.begin(), by_age.end(), [](const MemoryRequest* a, const MemoryRequest* b) {
    return std::pair(a->arrival, a->id) < std::pair(b->arrival, b->id);
  });

  // (app, bank) -> marked so far
  std::map<std::pair<AppId, std::uint32_t>, std::uint32_t> per_bank;
  ParbsBatch batch;
  for (const MemoryRequest* r : by_age) {
    const std::uint32_t bank = r->decoded.rank * banks_per_rank + r->decoded.bank;
    auto& n = per_bank[{r->app, bank}];
    if (n < marking_cap) {
      ++n;
      batch.marked.push_back(r->id);
    }
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> load(num_apps);  // (max per bank, total)
  for (const auto& [key, n] : per_bank) {
    auto& [mx, total] = load[key.first];
    mx = std::max(mx, n);
    total += n;
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> distinct(load);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  batch.app_rank.resize(num_apps);
  for (std::uint32_t a = 0; a < num_apps; ++a) {
    batch.app_rank[a] = static_cast<std::uint32_t>(
        std::lower_bound(distinct.begin(), distinct.end(), load[a]) - distinct.begin());
  }
  return batch;
}

ParBsScheduler::ParBsScheduler(const PolicyParams& params, const SchedulerContext& ctx)
    : marking_cap_(params.parbs_marking_cap),
      num_apps_(ctx.num_apps),
      banks_per_rank_(ctx.banks_per_channel),
      rank_(ctx.num_channels, std::vector<std::uint32_t>(ctx.num_apps, 0)),
      marked_left_(ctx.num_channels, 0) {}

void ParBsScheduler::prepare(std::uint32_t channel, std::span<MemoryRequest* const> queue, Cycle) {
  if (marked_left_[channel] != 0 || queue.empty()) return;
  std::vector<const MemoryRequest*> view(queue.begin(), queue.end());
  // Bank indices are channel-local; with one rank this is just the bank.
  ParbsBatch batch = parbs_form_batch(view, num_apps_, banks_per_rank_, marking_cap_);
  std::sort(batch.marked.begin(), batch.marked.end());
  for (MemoryRequest* r : queue) {
    r->marked = std::binary_search(batch.marked.begin(), batch.marked.end(), r->id);
  }
  marked_left_[channel] = static_cast<std::uint32_t>(batch.marked.size());
  rank_[channel] = std::move(batch.app_rank);
  ++batches_;
}

PriorityKey ParBsScheduler::key(std::uint32_t channel, const Candidate& c, Cycle) const {
  PriorityKey k;
  k.classes[0] = c.request->marked ? 0 : 1;
  k.classes[1] = rank_[channel][c.request->app];
  k.classes[2] = c.row_hit() ? 0 : 1;
  k.arrival = c.request->arrival;
  k.id = c.request->id;
  return k;
}

void ParBsScheduler::on_issue(std::uint32_t channel, const Candidate& c, Cycle) {
  if (c.request->marked && marked_left_[channel] > 0) --marked_left_[channel];
}

void atlas_update(std::span<double> attained, std::span<const double> served, double history_weight) {
  for (std::size_t i = 0; i < attained.size(); ++i) {
    attained[i] = history_weight * attained[i] + (1.0 - history_weight) * served[i];
  }
}

std::vector<std::uint32_t> dense_rank_ascending(std::span<const double> values) {
  std::vector<double> distinct(values.begin(), values.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::uint32_t> rank(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    rank[i] = static_cast<std::uint32_t>(std::lower_bound(distinct.begin(), distinct.end(), values[i]) -
                                         distinct.begin());
  }
  return rank;
}

AtlasScheduler::AtlasScheduler(const PolicyParams& params, const SchedulerContext& ctx)
    : weight_(params.atlas_history_weight),
      quantum_(params.atlas_quantum),
      timing_(ctx.timing),
      attained_(ctx.num_apps, 0.0),
      served_(ctx.num_apps, 0.0),
      rank_(ctx.num_apps, 0) {}

void AtlasScheduler::tick(Cycle now) {
  if (now == 0 || now % quantum_ != 0) return;
  atlas_update(attained_, served_, weight_);
  std::fill(served_.begin(), served_.end(), 0.0);
  rank_ = dense_rank_ascending(attained_);
}

PriorityKey AtlasScheduler::key(std::uint32_t, const Candidate& c, Cycle) const {
  PriorityKey k;
  k.classes[0] = rank_[c.request->app];
  k.classes[1] = c.row_hit() ? 0 : 1;
  k.arrival = c.request->arrival;
  k.id = c.request->id;
  return k;
}

void AtlasScheduler::on_issue(std::uint32_t, const Candidate& c, Cycle) {
  served_[c.request->app] += static_cast<double>(service_latency(c.status, timing_));
}

}  // namespace memsched
