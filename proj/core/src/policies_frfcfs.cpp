#include "memsched/policies.hpp"

namespace memsched {

PriorityKey frfcfs_key(const Candidate& c) {
  PriorityKey k;
  k.classes[0] = c.row_hit() ? 0 : 1;
  k.arrival = c.request->arrival;
  k.id = c.request->id;
  return k;
}

void update_bank_streak(BankStreak& streak, AppId app, RowStatus status) {
  if (status != RowStatus::Hit) {
    streak.app = app;
    streak.hits = 0;
    return;
  }
  if (streak.app == app) {
    ++streak.hits;
  } else {
    streak.app = app;
    streak.hits = 1;
  }
}

PriorityKey frfcfs_cap_key(const Candidate& c, const BankStreak& streak, std::uint64_t cap) {
  PriorityKey k = frfcfs_key(c);
  if (c.row_hit() && streak.app == c.request->app && streak.hits >= cap) k.classes[0] = 1;
  return k;
}

FrFcfsCapScheduler::FrFcfsCapScheduler(const PolicyParams& params, const SchedulerContext& ctx)
    : cap_(params.frfcfs_cap),
      banks_(ctx.banks_per_channel),
      streaks_(std::size_t{ctx.num_channels} * ctx.banks_per_channel) {}

PriorityKey FrFcfsCapScheduler::key(std::uint32_t channel, const Candidate& c, Cycle) const {
  return frfcfs_cap_key(c, streak(channel, c.bank), cap_);
}

void FrFcfsCapScheduler::on_issue(std::uint32_t channel, const Candidate& c, Cycle) {
  update_bank_streak(streaks_[channel * banks_ + c.bank], c.request->app, c.status);
}

}  // namespace memsched
