#include "memsched/policies.hpp"

namespace memsched {

BlacklistingScheduler::BlacklistingScheduler(const PolicyParams& params, const SchedulerContext& ctx,
                                             ClearingMode mode)
    : channels_(ctx.num_channels, BlacklistState::make(ctx.num_apps, params.blacklisting_threshold,
                                                       params.clearing_interval, mode, params.blacklist_on_exceed)) {}

PriorityKey BlacklistingScheduler::key(std::uint32_t channel, const Candidate& c, Cycle) const {
  PriorityKey k;
  k.classes[0] = channels_[channel].is_blacklisted(c.request->app) ? 1 : 0;
  k.classes[1] = c.row_hit() ? 0 : 1;
  k.arrival = c.request->arrival;
  k.id = c.request->id;
  return k;
}

void BlacklistingScheduler::tick(Cycle now) {
  for (auto& s : channels_) bliss_on_tick(s, now);
}

BlissScheduler::BlissScheduler(const PolicyParams& params, const SchedulerContext& ctx, ClearingMode mode)
    : BlacklistingScheduler(params, ctx, mode), mode_(mode) {}

void BlissScheduler::on_issue(std::uint32_t channel, const Candidate& c, Cycle) {
  if (bliss_on_issue(state(channel), c.request->app)) count_event();
}

FrFcfsCapBlacklistingScheduler::FrFcfsCapBlacklistingScheduler(const PolicyParams& params,
                                                               const SchedulerContext& ctx)
    : BlacklistingScheduler(params, ctx, ClearingMode::Synchronous),
      hits_to_blacklist_(params.cap_blacklist_hits),
      banks_(ctx.banks_per_channel),
      streaks_(std::size_t{ctx.num_channels} * ctx.banks_per_channel) {}

void FrFcfsCapBlacklistingScheduler::on_issue(std::uint32_t channel, const Candidate& c, Cycle) {
  BankStreak& s = streaks_[channel * banks_ + c.bank];
  update_bank_streak(s, c.request->app, c.status);
  if (s.hits >= hits_to_blacklist_) {
    blacklist_app(state(channel), c.request->app);
    s.hits = 0;
    count_event();
  }
}

}  // namespace memsched
