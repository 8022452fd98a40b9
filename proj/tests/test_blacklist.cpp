#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "memsched/blacklist.hpp"

using namespace memsched;

namespace {

// 1-based positions in `seq` at which an application was blacklisted.
std::vector<int> replay(const std::string& seq, std::uint64_t threshold, bool on_exceed = false) {
  auto s = BlacklistState::make(2, threshold, 10000, ClearingMode::Synchronous, on_exceed);
  std::vector<int> events;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (bliss_on_issue(s, static_cast<AppId>(seq[i] - 'A'))) events.push_back(static_cast<int>(i + 1));
  }
  return events;
}

}  // namespace

// Expected positions worked out by hand: a run of four consecutive services
// to one application blacklists it on the fourth, and another application's
// service restarts the run.
TEST(Blacklist, FourInARow) { EXPECT_EQ(replay("AAAA", 4), (std::vector<int>{4})); }
TEST(Blacklist, InterruptedShortRuns) { EXPECT_EQ(replay("AAB", 4), (std::vector<int>{})); }
TEST(Blacklist, RunRestartsAfterOtherApp) { EXPECT_EQ(replay("AAABAAAA", 4), (std::vector<int>{8})); }

TEST(Blacklist, LoneStreamBlacklistedEveryThreshold) {
  EXPECT_EQ(replay("AAAAAAAAAAAA", 4), (std::vector<int>{4, 8, 12}));
}

TEST(Blacklist, ExceedConventionNeedsOneMore) {
  EXPECT_EQ(replay("AAAA", 4, true), (std::vector<int>{}));
  EXPECT_EQ(replay("AAAAA", 4, true), (std::vector<int>{5}));
}

TEST(Blacklist, CounterFollowsHardwareConvention) {
  auto s = BlacklistState::make(2, 4, 10000);
  bliss_on_issue(s, 0);
  EXPECT_EQ(s.last_app, 0u);
  EXPECT_EQ(s.requests_served, 0u);
  bliss_on_issue(s, 0);
  EXPECT_EQ(s.requests_served, 1u);
  bliss_on_issue(s, 1);
  EXPECT_EQ(s.last_app, 1u);
  EXPECT_EQ(s.requests_served, 0u);
}

TEST(Blacklist, UnboundedThresholdNeverBlacklists) {
  auto s = BlacklistState::make(1, kUnbounded, 10000);
  for (int i = 0; i < 1000; ++i) EXPECT_FALSE(bliss_on_issue(s, 0));
  EXPECT_FALSE(s.any_blacklisted());
}

TEST(Blacklist, SynchronousClearingAtEveryBoundary) {
  auto s = BlacklistState::make(3, 1, 10000);
  for (Cycle now = 0; now <= 50000; ++now) {
    bliss_on_tick(s, now);
    if (now % 10000 == 0) ASSERT_FALSE(s.any_blacklisted()) << now;
    if (now % 7 == 0) bliss_on_issue(s, static_cast<AppId>(now % 3));
  }
}

TEST(Blacklist, SynchronousClearingLeavesBitsBetweenBoundaries) {
  auto s = BlacklistState::make(2, 1, 10000);
  bliss_on_issue(s, 1);
  for (Cycle now = 1; now < 10000; ++now) bliss_on_tick(s, now);
  EXPECT_TRUE(s.is_blacklisted(1));
  bliss_on_tick(s, 10000);
  EXPECT_FALSE(s.is_blacklisted(1));
}

TEST(Blacklist, IndividualClearingCountsFromBlacklisting) {
  auto s = BlacklistState::make(2, 1, 100, ClearingMode::Individual);
  bliss_on_tick(s, 0);
  bliss_on_issue(s, 0);  // blacklisted during cycle 0
  for (Cycle now = 1; now < 100; ++now) {
    bliss_on_tick(s, now);
    ASSERT_TRUE(s.is_blacklisted(0)) << now;
    if (now == 50) bliss_on_issue(s, 1);
  }
  bliss_on_tick(s, 100);
  EXPECT_FALSE(s.is_blacklisted(0));
  EXPECT_TRUE(s.is_blacklisted(1));
  for (Cycle now = 101; now <= 150; ++now) bliss_on_tick(s, now);
  EXPECT_FALSE(s.is_blacklisted(1));
}

TEST(Blacklist, CountHelpers) {
  auto s = BlacklistState::make(4, 1, 100);
  blacklist_app(s, 0);
  blacklist_app(s, 3);
  EXPECT_EQ(s.blacklisted_count(), 2u);
  EXPECT_TRUE(s.any_blacklisted());
}

TEST(Blacklist, ZeroParametersRejected) {
  EXPECT_THROW(BlacklistState::make(2, 0, 100), ConfigError);
  EXPECT_THROW(BlacklistState::make(2, 4, 0), ConfigError);
}
