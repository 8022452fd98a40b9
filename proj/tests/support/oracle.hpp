#pragma once

// Brute-force check of scheduler pick order on tiny instances. The oracle
// re-derives each decision straight from the policy rules with its own
// bookkeeping; it shares nothing with the library besides the request shape.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "memsched/policies.hpp"

namespace memsched::testing {

// One request of a tiny instance: 2 apps, 2 banks, 2 rows per bank.
struct TinyRequest {
  std::uint8_t app;
  std::uint8_t bank;
  std::uint8_t row;
};

enum class OraclePolicy { FrFcfs, Bliss };

struct OracleParams {
  std::uint64_t threshold = 4;
  Cycle clearing_interval = 3;  // in picks; one pick per cycle
};

// Pick order (indices into `seq`) under the library scheduler.
inline std::vector<std::size_t> library_order(const std::vector<TinyRequest>& seq, OraclePolicy policy,
                                              const OracleParams& op) {
  PolicyParams p;
  p.blacklisting_threshold = op.threshold;
  p.clearing_interval = op.clearing_interval;
  SchedulerContext ctx;
  ctx.num_apps = 2;
  ctx.num_channels = 1;
  ctx.banks_per_channel = 2;
  auto sched = make_scheduler(policy == OraclePolicy::FrFcfs ? SchedulerKind::FrFcfs : SchedulerKind::Bliss, p, ctx);

  std::vector<MemoryRequest> reqs(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    reqs[i].id = i;
    reqs[i].app = seq[i].app;
    reqs[i].arrival = i;
    reqs[i].decoded.bank = seq[i].bank;
    reqs[i].decoded.row = seq[i].row;
  }
  std::array<BankState, 2> banks{};
  std::vector<bool> done(seq.size(), false);
  std::vector<std::size_t> order;
  std::vector<Candidate> cands;
  for (Cycle now = 0; order.size() < seq.size(); ++now) {
    sched->tick(now);
    cands.clear();
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (done[i]) continue;
      cands.push_back({&reqs[i], classify_access(banks[seq[i].bank], seq[i].row), seq[i].bank});
    }
    const Candidate* c = pick_next(*sched, 0, cands, now);
    const std::size_t i = static_cast<std::size_t>(c->request->id);
    sched->on_issue(0, *c, now);
    banks[seq[i].bank].open_row = seq[i].row;
    done[i] = true;
    order.push_back(i);
  }
  return order;
}

// Pick order derived directly from the rules.
inline std::vector<std::size_t> oracle_order(const std::vector<TinyRequest>& seq, OraclePolicy policy,
                                             const OracleParams& op) {
  std::array<int, 2> open{-1, -1};
  std::array<bool, 2> blacklisted{false, false};
  int last_app = -1;
  std::uint64_t run = 0;
  std::vector<bool> done(seq.size(), false);
  std::vector<std::size_t> order;
  for (std::uint64_t step = 0; order.size() < seq.size(); ++step) {
    if (policy == OraclePolicy::Bliss && step % op.clearing_interval == 0) blacklisted = {false, false};

    std::optional<std::size_t> best;
    auto better = [&](std::size_t a, std::size_t b) {
      // true if a outranks b
      if (policy == OraclePolicy::Bliss && blacklisted[seq[a].app] != blacklisted[seq[b].app]) {
        return !blacklisted[seq[a].app];
      }
      const bool hit_a = open[seq[a].bank] == seq[a].row;
      const bool hit_b = open[seq[b].bank] == seq[b].row;
      if (hit_a != hit_b) return hit_a;
      return a < b;  // arrival order
    };
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (done[i]) continue;
      if (!best || better(i, *best)) best = i;
    }

    const std::size_t i = *best;
    done[i] = true;
    order.push_back(i);
    open[seq[i].bank] = seq[i].row;
    if (policy == OraclePolicy::Bliss) {
      run = last_app == seq[i].app ? run + 1 : 1;
      last_app = seq[i].app;
      if (run >= op.threshold) {
        blacklisted[seq[i].app] = true;
        last_app = -1;
        run = 0;
      }
    }
  }
  return order;
}

struct OracleReport {
  std::uint64_t instances = 0;
  std::uint64_t mismatches = 0;
  std::vector<TinyRequest> first_mismatch;
};

// Every request sequence of length 1..max_len over the 8 (app, bank, row)
// symbols, with the first request fixed to (0, 0, 0). Relabeling apps,
// banks or rows maps any instance onto one of these, so nothing is lost.
inline OracleReport check_all(std::size_t max_len, OraclePolicy policy, const OracleParams& op) {
  OracleReport report;
  std::vector<TinyRequest> seq;
  std::vector<std::uint8_t> digits;
  for (std::size_t len = 1; len <= max_len; ++len) {
    digits.assign(len, 0);
    for (;;) {
      seq.resize(len);
      for (std::size_t k = 0; k < len; ++k) {
        seq[k] = {static_cast<std::uint8_t>(digits[k] & 1), static_cast<std::uint8_t>((digits[k] >> 1) & 1),
                  static_cast<std::uint8_t>((digits[k] >> 2) & 1)};
      }
      ++report.instances;
      if (library_order(seq, policy, op) != oracle_order(seq, policy, op)) {
        if (report.mismatches++ == 0) report.first_mismatch = seq;
      }
      // Odometer over digits[1..len-1]; digits[0] stays 0.
      std::size_t k = len;
      while (k > 1 && ++digits[k - 1] == 8) digits[--k] = 0;
      if (k == 1) break;
    }
  }
  return report;
}

}  // namespace memsched::testing
