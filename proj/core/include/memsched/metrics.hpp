#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "memsched/request.hpp"
#include "memsched/types.hpp"

namespace memsched {

struct IpcPair {
  double alone = 0.0;
  double shared = 0.0;
};

/// Sum of shared/alone IPC ratios. Throws ContractViolation if any alone IPC is 0.
double weighted_speedup(std::span<const IpcPair> apps);
/// N / sum(alone/shared). Throws ContractViolation if any shared IPC is 0.
double harmonic_speedup(std::span<const IpcPair> apps);
/// max(alone/shared). Throws ContractViolation if any shared IPC is 0.
double max_slowdown(std::span<const IpcPair> apps);

/// Streak lengths 1..16, where the last bin collects everything >= 16.
/// `streaks` counts streaks per bin; `requests` weights each streak by its
/// length, i.e. the distribution of requests served across streak lengths.
struct StreakHistogram {
  static constexpr std::uint32_t kBins = 16;

  std::array<std::uint64_t, kBins> streaks{};
  std::array<std::uint64_t, kBins> requests{};

  static std::uint32_t bin_of(std::uint64_t length) { return length >= kBins ? kBins - 1 : static_cast<std::uint32_t>(length - 1); }

  void add(std::uint64_t length);
  std::uint64_t total_streaks() const;
  std::uint64_t total_requests() const;
  /// Smallest binned length L with at least fraction q of requests in
  /// streaks of length <= L. Returns 0 for an empty histogram.
  std::uint32_t percentile(double q) const;
  /// Fraction of requests served in streaks of length >= `length`.
  double fraction_at_least(std::uint32_t length) const;

  StreakHistogram& operator+=(const StreakHistogram& other);
  friend bool operator==(const StreakHistogram&, const StreakHistogram&) = default;
};

/// Tracks maximal runs of same-application service at each channel. A run
/// closes when a different application is served at that channel; runs still
/// open are only counted after flush().
class StreakRecorder {
 public:
  StreakRecorder(std::uint32_t num_channels, std::uint32_t num_apps);

  void record(std::uint32_t channel, AppId app);
  void flush();

  const StreakHistogram& histogram(AppId app) const { return hist_[app]; }
  std::span<const StreakHistogram> histograms() const { return hist_; }

 private:
  struct Open {
    std::optional<AppId> app;
    std::uint64_t length = 0;
  };
  std::vector<Open> open_;
  std::vector<StreakHistogram> hist_;
};

struct LatencySummary {
  double mean = 0.0;  // over completed requests
  std::uint64_t completed = 0;
  std::uint64_t incomplete = 0;
};

/// Mean of (completion - arrival). Requests without a completion cycle are
/// excluded and counted in `incomplete`.
LatencySummary average_request_latency(std::span<const MemoryRequest> requests);

struct AppMetrics {
  AppId app = 0;
  double ipc_shared = 0.0;
  double ipc_alone = 0.0;
  std::uint64_t requests_served = 0;
  double avg_request_latency = 0.0;
  StreakHistogram streaks;
};

struct SystemMetrics {
  double weighted_speedup = 0.0;
  double harmonic_speedup = 0.0;
  double max_slowdown = 0.0;
  double avg_request_latency = 0.0;
};

struct RunMetrics {
  std::vector<AppMetrics> apps;
  SystemMetrics system;
};

/// Fills `system` from `apps`. `latency_weights` gives the number of
/// completed requests per app for the request-weighted system latency.
SystemMetrics compute_system_metrics(std::span<const AppMetrics> apps, std::span<const std::uint64_t> latency_weights);

}  // namespace memsched
