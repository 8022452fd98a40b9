#include <algorithm>
#include <limits>
#include <numeric>

#include "memsched/policies.hpp"

namespace memsched {

std::vector<Cluster> form_clusters(std::span<const double> intensity, std::span<const double> share, double thresh) {
  const std::size_t n = intensity.size();
  std::vector<Cluster> out(n, Cluster::Low);
  if (n <= 1) return out;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return intensity[a] < intensity[b]; });

  double total = 0.0;
  for (std::size_t i : order) total += share[i];
  if (total <= 0.0) return out;

  // Cumulative sums are accumulated in sorted order, so with thresh == 1 the
  // last application lands exactly on the total.
  const double limit = thresh * total * (1.0 + 1e-12);
  double cumulative = 0.0;
  bool closed = false;
  for (std::size_t i : order) {
    cumulative += share[i];
    if (closed || cumulative > limit) {
      closed = true;
      out[i] = Cluster::High;
    }
  }
  return out;
}

void shuffle_deterministic(std::span<std::uint32_t> values, std::mt19937_64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    // Unbiased draw in [0, i) by rejection.
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    std::swap(values[i - 1], values[x % bound]);
  }
}

ClusteringScheduler::ClusteringScheduler(const PolicyParams& params, const SchedulerContext& ctx)
    : cluster_thresh_(params.tcm_cluster_thresh),
      num_apps_(ctx.num_apps),
      cluster_(ctx.num_apps, Cluster::Low),
      interval_(params.tcm_interval_length),
      timing_(ctx.timing),
      retired_(ctx.retired_instructions),
      requests_(ctx.num_apps, 0),
      retired_at_start_(ctx.num_apps, 0),
      service_cycles_(ctx.num_apps, 0.0) {}

void ClusteringScheduler::tick(Cycle now) {
  if (now == 0 || now % interval_ != 0) return;
  std::vector<double> mpki(num_apps_, 0.0);
  for (AppId a = 0; a < num_apps_; ++a) {
    const double reqs = static_cast<double>(requests_[a]);
    if (retired_) {
      const std::uint64_t retired = retired_(a);
      const std::uint64_t delta = retired - retired_at_start_[a];
      retired_at_start_[a] = retired;
      // An app that retired nothing but still missed is maximally intensive.
      mpki[a] = delta > 0 ? reqs * 1000.0 / static_cast<double>(delta) : (reqs > 0 ? 1e9 : 0.0);
    } else {
      mpki[a] = reqs;
    }
  }
  on_interval(mpki, service_cycles_, now);
  std::fill(requests_.begin(), requests_.end(), 0);
  std::fill(service_cycles_.begin(), service_cycles_.end(), 0.0);
  ++intervals_;
}

void ClusteringScheduler::on_arrival(const MemoryRequest& req, Cycle) {
  if (req.type == AccessType::Read) ++requests_[req.app];
}

void ClusteringScheduler::on_issue(std::uint32_t, const Candidate& c, Cycle) {
  service_cycles_[c.request->app] += static_cast<double>(service_latency(c.status, timing_));
}

TcmScheduler::TcmScheduler(const PolicyParams& params, const SchedulerContext& ctx)
    : ClusteringScheduler(params, ctx),
      shuffle_interval_(params.tcm_shuffle_interval),
      rng_(ctx.seed ^ 0x7c3a9e5b1d2f4861ull),
      rank_(ctx.num_apps, 0),
      intensity_(ctx.num_apps, 0.0) {}

void TcmScheduler::tick(Cycle now) {
  ClusteringScheduler::tick(now);
  if (now != 0 && now % shuffle_interval_ == 0) reshuffle();
}

void TcmScheduler::on_interval(std::span<const double> mpki, std::span<const double> bandwidth, Cycle) {
  intensity_.assign(mpki.begin(), mpki.end());
  cluster_ = form_clusters(mpki, bandwidth, cluster_thresh_);

  // Low cluster: least intensive first.
  std::vector<AppId> low;
  for (AppId a = 0; a < num_apps_; ++a) {
    if (cluster_[a] == Cluster::Low) low.push_back(a);
  }
  std::stable_sort(low.begin(), low.end(), [&](AppId x, AppId y) { return intensity_[x] < intensity_[y]; });
  for (std::uint32_t i = 0; i < low.size(); ++i) rank_[low[i]] = i;
  reshuffle();
}

void TcmScheduler::reshuffle() {
  std::vector<AppId> high;
  for (AppId a = 0; a < num_apps_; ++a) {
    if (cluster_[a] == Cluster::High) high.push_back(a);
  }
  if (high.empty()) return;
  std::vector<std::uint32_t> perm(high.size());
  std::iota(perm.begin(), perm.end(), 0u);
  shuffle_deterministic(perm, rng_);
  for (std::size_t i = 0; i < high.size(); ++i) rank_[high[i]] = perm[i];
  ++shuffles_;
}

PriorityKey TcmScheduler::key(std::uint32_t, const Candidate& c, Cycle) const {
  PriorityKey k;
  const AppId app = c.request->app;
  k.classes[0] = static_cast<std::int64_t>(cluster_[app]);
  k.classes[1] = rank_[app];
  k.classes[2] = c.row_hit() ? 0 : 1;
  k.arrival = c.request->arrival;
  k.id = c.request->id;
  return k;
}

PriorityKey two_group_key(const Candidate& c, Cluster cluster) {
  PriorityKey k;
  k.classes[0] = static_cast<std::int64_t>(cluster);
  k.classes[1] = c.row_hit() ? 0 : 1;
  k.arrival = c.request->arrival;
  k.id = c.request->id;
  return k;
}

TwoGroupScheduler::TwoGroupScheduler(const PolicyParams& params, const SchedulerContext& ctx, SchedulerKind kind)
    : ClusteringScheduler(params, ctx), kind_(kind) {}

PriorityKey TwoGroupScheduler::key(std::uint32_t, const Candidate& c, Cycle) const {
  return two_group_key(c, cluster_[c.request->app]);
}

void TwoGroupScheduler::on_interval(std::span<const double> mpki, std::span<const double> bandwidth, Cycle) {
  cluster_ = form_clusters(mpki, bandwidth, cluster_thresh_);
}

}  // namespace memsched
