#include "memsched/metrics.hpp"

#include <algorithm>

namespace memsched {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw ContractViolation(what);
}

}  // namespace

double weighted_speedup(std::span<const IpcPair> apps) {
  double sum = 0.0;
  for (const auto& a : apps) {
    require_positive(a.alone, "weighted speedup needs alone IPC > 0");
    sum += a.shared / a.alone;
  }
  return sum;
}

double harmonic_speedup(std::span<const IpcPair> apps) {
  double sum = 0.0;
  for (const auto& a : apps) {
    require_positive(a.shared, "harmonic speedup needs shared IPC > 0");
    sum += a.alone / a.shared;
  }
  return sum > 0.0 ? static_cast<double>(apps.size()) / sum : 0.0;
}

double max_slowdown(std::span<const IpcPair> apps) {
  double worst = 0.0;
  for (const auto& a : apps) {
    require_positive(a.shared, "maximum slowdown needs shared IPC > 0");
    worst = std::max(worst, a.alone / a.shared);
  }
  return worst;
}

void StreakHistogram::add(std::uint64_t length) {
  if (length == 0) return;
  const auto b = bin_of(length);
  ++streaks[b];
  requests[b] += length;
}

std::uint64_t StreakHistogram::total_streaks() const {
  std::uint64_t n = 0;
  for (auto v : streaks) n += v;
  return n;
}

std::uint64_t StreakHistogram::total_requests() const {
  std::uint64_t n = 0;
  for (auto v : requests) n += v;
  return n;
}

std::uint32_t StreakHistogram::percentile(double q) const {
  const std::uint64_t total = total_requests();
  if (total == 0) return 0;
  const double target = q * static_cast<double>(total);
  std::uint64_t cumulative = 0;
  for (std::uint32_t b = 0; b < kBins; ++b) {
    cumulative += requests[b];
    if (static_cast<double>(cumulative) >= target) return b + 1;
  }
  return kBins;
}

double StreakHistogram::fraction_at_least(std::uint32_t length) const {
  const std::uint64_t total = total_requests();
  if (total == 0 || length == 0) return total == 0 ? 0.0 : 1.0;
  std::uint64_t n = 0;
  for (std::uint32_t b = bin_of(length); b < kBins; ++b) n += requests[b];
  return static_cast<double>(n) / static_cast<double>(total);
}

StreakHistogram& StreakHistogram::operator+=(const StreakHistogram& other) {
  for (std::uint32_t b = 0; b < kBins; ++b) {
    streaks[b] += other.streaks[b];
    requests[b] += other.requests[b];
  }
  return *this;
}

StreakRecorder::StreakRecorder(std::uint32_t num_channels, std::uint32_t num_apps)
    : open_(num_channels), hist_(num_apps) {}

void StreakRecorder::record(std::uint32_t channel, AppId app) {
  Open& o = open_[channel];
  if (o.app == app) {
    ++o.length;
    return;
  }
  if (o.app) hist_[*o.app].add(o.length);
  o.app = app;
  o.length = 1;
}

void StreakRecorder::flush() {
  for (Open& o : open_) {
    if (o.app) hist_[*o.app].add(o.length);
    o = Open{};
  }
}

LatencySummary average_request_latency(std::span<const MemoryRequest> requests) {
  LatencySummary s;
  double sum = 0.0;
  for (const auto& r : requests) {
    if (!r.completed) {
      ++s.incomplete;
      continue;
    }
    sum += static_cast<double>(*r.completed - r.arrival);
    ++s.completed;
  }
  s.mean = s.completed ? sum / static_cast<double>(s.completed) : 0.0;
  return s;
}

SystemMetrics compute_system_metrics(std::span<const AppMetrics> apps, std::span<const std::uint64_t> latency_weights) {
  std::vector<IpcPair> ipc;
  ipc.reserve(apps.size());
  for (const auto& a : apps) ipc.push_back({a.ipc_alone, a.ipc_shared});

  SystemMetrics m;
  m.weighted_speedup = weighted_speedup(ipc);
  m.harmonic_speedup = harmonic_speedup(ipc);
  m.max_slowdown = max_slowdown(ipc);

  double sum = 0.0;
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < apps.size(); ++i) {
    const std::uint64_t w = i < latency_weights.size() ? latency_weights[i] : 0;
    sum += apps[i].avg_request_latency * static_cast<double>(w);
    n += w;
  }
  m.avg_request_latency = n ? sum / static_cast<double>(n) : 0.0;
  return m;
}

}  // namespace memsched
