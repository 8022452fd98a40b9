#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "memsched/types.hpp"

namespace memsched {

enum class ClearingMode : std::uint8_t {
  Synchronous,  // every application cleared at each multiple of the interval
  Individual,   // each application cleared `interval` cycles after it was blacklisted
};

/// Per-channel blacklisting registers: the application of the last scheduled
/// request, the consecutive-service counter, and one blacklist bit per
/// hardware context.
///
/// `requests_served` follows the hardware counter: it is zero right after the
/// application changes and increments on each further request from the same
/// application, so the consecutive run length is requests_served + 1. An
/// application is blacklisted when its run reaches `threshold` requests (or
/// exceeds it, with `on_exceed`). Blacklisting resets the counter and starts a
/// fresh run, so a lone streaming application is blacklisted on every
/// `threshold`-th request.
struct BlacklistState {
  std::optional<AppId> last_app;
  std::uint64_t requests_served = 0;
  std::uint64_t threshold = 4;
  Cycle clearing_interval = 10000;
  bool on_exceed = false;
  ClearingMode mode = ClearingMode::Synchronous;
  std::vector<std::uint8_t> bits;       // one per application
  std::vector<Cycle> clear_countdown;   // Individual mode only

  static BlacklistState make(std::uint32_t num_apps, std::uint64_t threshold, Cycle clearing_interval,
                             ClearingMode mode = ClearingMode::Synchronous, bool on_exceed = false);

  bool is_blacklisted(AppId app) const { return bits[app] != 0; }
  bool any_blacklisted() const;
  std::uint32_t blacklisted_count() const;
};

/// Sets the app's bit (and, in Individual mode, restarts its countdown).
void blacklist_app(BlacklistState& state, AppId app);

/// Accounts for one scheduled request. Returns true if it blacklisted `app`.
bool bliss_on_issue(BlacklistState& state, AppId app);

/// Called once per cycle, before scheduling.
void bliss_on_tick(BlacklistState& state, Cycle now);

}  // namespace memsched
