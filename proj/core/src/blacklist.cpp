#include "memsched/blacklist.hpp"

#include <algorithm>

namespace memsched {

BlacklistState BlacklistState::make(std::uint32_t num_apps, std::uint64_t threshold, Cycle clearing_interval,
                                    ClearingMode mode, bool on_exceed) {
  if (threshold == 0) throw ConfigError("blacklisting threshold must be >= 1");
  if (clearing_interval == 0) throw ConfigError("clearing interval must be >= 1 cycle");
  BlacklistState s;
  s.threshold = threshold;
  s.clearing_interval = clearing_interval;
  s.mode = mode;
  s.on_exceed = on_exceed;
  s.bits.assign(num_apps, 0);
  if (mode == ClearingMode::Individual) s.clear_countdown.assign(num_apps, 0);
  return s;
}

bool BlacklistState::any_blacklisted() const {
  return std::any_of(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; });
}

std::uint32_t BlacklistState::blacklisted_count() const {
  return static_cast<std::uint32_t>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

void blacklist_app(BlacklistState& state, AppId app) {
  state.bits[app] = 1;
  if (state.mode == ClearingMode::Individual) state.clear_countdown[app] = state.clearing_interval;
}

bool bliss_on_issue(BlacklistState& state, AppId app) {
  if (state.last_app == app) {
    ++state.requests_served;
  } else {
    state.requests_served = 0;
    state.last_app = app;
  }

  if (state.threshold == kUnbounded) return false;
  const std::uint64_t run = state.requests_served + 1;
  const bool trigger = state.on_exceed ? run > state.threshold : run >= state.threshold;
  if (!trigger) return false;

  blacklist_app(state, app);
  state.requests_served = 0;
  state.last_app.reset();
  return true;
}

void bliss_on_tick(BlacklistState& state, Cycle now) {
  if (state.mode == ClearingMode::Synchronous) {
    if (now % state.clearing_interval == 0) std::fill(state.bits.begin(), state.bits.end(), 0);
    return;
  }
  for (std::size_t app = 0; app < state.bits.size(); ++app) {
    Cycle& left = state.clear_countdown[app];
    if (left == 0) continue;
    if (--left == 0) state.bits[app] = 0;
  }
}

}  // namespace memsched
