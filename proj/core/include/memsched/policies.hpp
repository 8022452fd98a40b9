#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "memsched/blacklist.hpp"
#include "memsched/scheduler.hpp"

namespace memsched {

// ---------------------------------------------------------------------------
// Building blocks shared by several policies. Each is a plain function so the
// individual rules can be exercised directly.

/// Row hits first; older first within a class.
PriorityKey frfcfs_key(const Candidate& c);

/// Consecutive row-hit service count for the application owning a bank's
/// open row. Opening a new row restarts the streak at zero.
struct BankStreak {
  std::optional<AppId> app;
  std::uint64_t hits = 0;
};
void update_bank_streak(BankStreak& streak, AppId app, RowStatus status);

/// FRFCFS ordering, except a row hit whose application's ongoing streak in
/// that bank has reached `cap` loses its row-hit boost.
PriorityKey frfcfs_cap_key(const Candidate& c, const BankStreak& streak, std::uint64_t cap);

struct ParbsBatch {
  std::vector<ReqId> marked;
  std::vector<std::uint32_t> app_rank;  // 0 = highest priority
};

/// Marks up to `marking_cap` oldest requests per application per bank and
/// ranks applications shortest-job-first: smaller maximum per-bank marked
/// count first, then smaller total marked count, then lower id.
ParbsBatch parbs_form_batch(std::span<const MemoryRequest* const> queue, std::uint32_t num_apps,
                            std::uint32_t banks_per_rank, std::uint32_t marking_cap);

/// attained[i] = weight * attained[i] + (1 - weight) * served[i].
void atlas_update(std::span<double> attained, std::span<const double> served, double history_weight);

/// Dense ascending rank: equal values share a rank, smallest value gets 0.
std::vector<std::uint32_t> dense_rank_ascending(std::span<const double> values);

enum class Cluster : std::uint8_t { Low = 0, High = 1 };

/// Sorts applications by ascending intensity and assigns them to the
/// low-intensity cluster while their cumulative `share` stays within
/// `thresh` of the total. A lone application, or an interval with no
/// measured share at all, puts everyone in the low cluster.
std::vector<Cluster> form_clusters(std::span<const double> intensity, std::span<const double> share, double thresh);

/// Uniform Fisher-Yates shuffle driven by a 64-bit Mersenne Twister, with a
/// bounded draw that does not depend on the standard library's distributions.
void shuffle_deterministic(std::span<std::uint32_t> values, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Policies.

class FrFcfsScheduler final : public Scheduler {
 public:
  SchedulerKind kind() const override { return SchedulerKind::FrFcfs; }
  PriorityKey key(std::uint32_t, const Candidate& c, Cycle) const override { return frfcfs_key(c); }
};

class FrFcfsCapScheduler final : public Scheduler {
 public:
  FrFcfsCapScheduler(const PolicyParams& params, const SchedulerContext& ctx);
  SchedulerKind kind() const override { return SchedulerKind::FrFcfsCap; }
  PriorityKey key(std::uint32_t channel, const Candidate& c, Cycle now) const override;
  void on_issue(std::uint32_t channel, const Candidate& c, Cycle now) override;

  const BankStreak& streak(std::uint32_t channel, std::uint32_t bank) const {
    return streaks_[channel * banks_ + bank];
  }

 private:
  std::uint64_t cap_;
  std::uint32_t banks_;
  std::vector<BankStreak> streaks_;
};

/// Shared machinery for the blacklisting family: one BlacklistState per
/// channel, and the priority order non-blacklisted > row hit > older.
class BlacklistingScheduler : public Scheduler {
 public:
  PriorityKey key(std::uint32_t channel, const Candidate& c, Cycle now) const override;
  void tick(Cycle now) override;

  const BlacklistState& blacklist(std::uint32_t channel) const { return channels_[channel]; }
  std::uint64_t blacklist_events() const { return events_; }

 protected:
  BlacklistingScheduler(const PolicyParams& params, const SchedulerContext& ctx, ClearingMode mode);
  BlacklistState& state(std::uint32_t channel) { return channels_[channel]; }
  void count_event() { ++events_; }

 private:
  std::vector<BlacklistState> channels_;
  std::uint64_t events_ = 0;
};

class BlissScheduler final : public BlacklistingScheduler {
 public:
  BlissScheduler(const PolicyParams& params, const SchedulerContext& ctx,
                 ClearingMode mode = ClearingMode::Synchronous);
  SchedulerKind kind() const override {
    return mode_ == ClearingMode::Synchronous ? SchedulerKind::Bliss : SchedulerKind::BlissIndividualClearing;
  }
  void on_issue(std::uint32_t channel, const Candidate& c, Cycle now) override;

 private:
  ClearingMode mode_;
};

/// Blacklists an application once N row hits to the same row have been
/// served to it in one bank; scheduling is identical to BLISS.
class FrFcfsCapBlacklistingScheduler final : public BlacklistingScheduler {
 public:
  FrFcfsCapBlacklistingScheduler(const PolicyParams& params, const SchedulerContext& ctx);
  SchedulerKind kind() const override { return SchedulerKind::FrFcfsCapBlacklisting; }
  void on_issue(std::uint32_t channel, const Candidate& c, Cycle now) override;

  const BankStreak& streak(std::uint32_t channel, std::uint32_t bank) const {
    return streaks_[channel * banks_ + bank];
  }

 private:
  std::uint64_t hits_to_blacklist_;
  std::uint32_t banks_;
  std::vector<BankStreak> streaks_;
};

/// Batches per channel; priority marked > application rank > row hit > older.
class ParBsScheduler final : public Scheduler {
 public:
  ParBsScheduler(const PolicyParams& params, const SchedulerContext& ctx);
  SchedulerKind kind() const override { return SchedulerKind::ParBs; }
  void prepare(std::uint32_t channel, std::span<MemoryRequest* const> queue, Cycle now) override;
  PriorityKey key(std::uint32_t channel, const Candidate& c, Cycle now) const override;
  void on_issue(std::uint32_t channel, const Candidate& c, Cycle now) override;

  std::uint64_t batches_formed() const { return batches_; }
  std::uint32_t marked_outstanding(std::uint32_t channel) const { return marked_left_[channel]; }

 private:
  std::uint32_t marking_cap_;
  std::uint32_t num_apps_;
  std::uint32_t banks_per_rank_;
  std::vector<std::vector<std::uint32_t>> rank_;  // [channel][app]
  std::vector<std::uint32_t> marked_left_;
  std::uint64_t batches_ = 0;
};

/// Least-attained-service ranking, recomputed every quantum.
class AtlasScheduler final : public Scheduler {
 public:
  AtlasScheduler(const PolicyParams& params, const SchedulerContext& ctx);
  SchedulerKind kind() const override { return SchedulerKind::Atlas; }
  void tick(Cycle now) override;
  PriorityKey key(std::uint32_t channel, const Candidate& c, Cycle now) const override;
  void on_issue(std::uint32_t channel, const Candidate& c, Cycle now) override;

  std::span<const double> attained() const { return attained_; }
  std::span<const std::uint32_t> ranks() const { return rank_; }

 private:
  double weight_;
  Cycle quantum_;
  TimingParams timing_;
  std::vector<double> attained_;
  std::vector<double> served_;
  std::vector<std::uint32_t> rank_;
};

/// Common interval bookkeeping for TCM, TCM-Cluster and Grouping: per-app
/// request counts, retired instructions and bank service cycles per interval.
class ClusteringScheduler : public Scheduler {
 public:
  void tick(Cycle now) override;
  void on_arrival(const MemoryRequest& req, Cycle now) override;
  void on_issue(std::uint32_t channel, const Candidate& c, Cycle now) override;

  Cluster cluster_of(AppId app) const { return cluster_[app]; }
  std::span<const Cluster> clusters() const { return cluster_; }
  void set_clusters(std::vector<Cluster> clusters) { cluster_ = std::move(clusters); }
  std::uint64_t intervals_completed() const { return intervals_; }

 protected:
  ClusteringScheduler(const PolicyParams& params, const SchedulerContext& ctx);
  /// Called at each interval boundary with the interval's measurements.
  virtual void on_interval(std::span<const double> mpki, std::span<const double> bandwidth, Cycle now) = 0;

  double cluster_thresh_;
  std::uint32_t num_apps_;
  std::vector<Cluster> cluster_;

 private:
  Cycle interval_;
  TimingParams timing_;
  std::function<std::uint64_t(AppId)> retired_;
  std::vector<std::uint64_t> requests_;
  std::vector<std::uint64_t> retired_at_start_;
  std::vector<double> service_cycles_;
  std::uint64_t intervals_ = 0;
};

class TcmScheduler final : public ClusteringScheduler {
 public:
  TcmScheduler(const PolicyParams& params, const SchedulerContext& ctx);
  SchedulerKind kind() const override { return SchedulerKind::Tcm; }
  void tick(Cycle now) override;
  PriorityKey key(std::uint32_t channel, const Candidate& c, Cycle now) const override;

  std::span<const std::uint32_t> ranks() const { return rank_; }
  std::uint64_t shuffles() const { return shuffles_; }

 protected:
  void on_interval(std::span<const double> mpki, std::span<const double> bandwidth, Cycle now) override;

 private:
  void reshuffle();

  Cycle shuffle_interval_;
  std::mt19937_64 rng_;
  std::vector<std::uint32_t> rank_;  // within the app's cluster
  std::vector<double> intensity_;
  std::uint64_t shuffles_ = 0;
};

/// Two groups, no ranking: the low cluster beats the high cluster, FRFCFS
/// inside each. Clusters come from TCM's rule (intensity order, bandwidth
/// share) on TCM's interval, so Grouping and TCM-Cluster currently behave
/// identically; they stay separate kinds because they are reported apart.
class TwoGroupScheduler final : public ClusteringScheduler {
 public:
  TwoGroupScheduler(const PolicyParams& params, const SchedulerContext& ctx, SchedulerKind kind);
  SchedulerKind kind() const override { return kind_; }
  PriorityKey key(std::uint32_t channel, const Candidate& c, Cycle now) const override;

 protected:
  void on_interval(std::span<const double> mpki, std::span<const double> bandwidth, Cycle now) override;

 private:
  SchedulerKind kind_;
};

/// Priority used by Grouping and TCM-Cluster.
PriorityKey two_group_key(const Candidate& c, Cluster cluster);

}  // namespace memsched
