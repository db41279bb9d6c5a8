#include <gtest/gtest.h>

#include "lumi/errors.hpp"
#include "lumi/scheduler.hpp"
#include "oracle.hpp"

using namespace lumi;

TEST(Schedule, FsyncIsSingleFullPath) {
  ScheduleSpec spec;
  spec.n_robots = 3;
  spec.horizon = 2;
  const auto paths = gen_schedules(spec);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0].steps(), 6u);
  for (const auto& acts : paths[0].activations) EXPECT_EQ(acts.size(), 3u);
  EXPECT_EQ(completed_cycles(paths[0]), (std::vector<std::uint32_t>{2, 2, 2}));
}

TEST(Schedule, PhasesFollowClocks) {
  const auto p = TimePath::from_sets(2, {{0}, {0, 1}, {1}, {0}});
  EXPECT_EQ(p.activations[1][0].phase, Phase::Look);
  EXPECT_EQ(p.activations[1][1].phase, Phase::Move);
  EXPECT_EQ(p.activations[2][0].phase, Phase::Look);
  EXPECT_EQ(p.local_clocks.back(), (std::vector<std::uint32_t>{3, 2}));
  EXPECT_TRUE(validate_path(p).empty());
  EXPECT_EQ(p.to_string(), "[r1:M] [r1:L,r2:M] [r2:L] [r1:C]");
}

TEST(Schedule, ValidatorFlagsBrokenPaths) {
  auto p = TimePath::from_sets(2, {{0}, {1}});
  p.activations[1].clear();
  const auto v = validate_path(p);
  ASSERT_FALSE(v.empty());
  bool nonempty = false;
  for (const auto& x : v) nonempty |= x.kind == "nonempty";
  EXPECT_TRUE(nonempty);

  auto q = TimePath::from_sets(1, {{0}, {0}});
  q.local_clocks[0][0] = 1;
  EXPECT_FALSE(validate_path(q).empty());
}

TEST(Schedule, InstantaneousMovesZone) {
  const auto p = TimePath::from_sets(2, {{0}, {0, 1}}, true);
  bool zone = false;
  for (const auto& x : validate_path(p)) zone |= x.kind == "forbidden-zone";
  EXPECT_TRUE(zone);
}

TEST(Schedule, CapExceededThrows) {
  ScheduleSpec spec;
  spec.n_robots = 2;
  spec.horizon = 6;
  spec.synchrony = Synchrony::ssync();
  spec.fairness_bound = 6;
  spec.cap = 10;
  EXPECT_THROW(gen_schedules(spec), CapExceeded);
}

TEST(Schedule, BadSpecThrows) {
  ScheduleSpec spec;
  spec.horizon = 0;
  EXPECT_THROW(gen_schedules(spec), ModelError);
}

struct FamilyCase {
  std::size_t n;
  std::size_t horizon;
  Synchrony sync;
  std::size_t fairness;
  bool instantaneous;
};

class FamilyOracle : public ::testing::TestWithParam<FamilyCase> {};

// The generator must produce exactly the brute-force filtered family, in order.
TEST_P(FamilyOracle, MatchesBruteForce) {
  const auto c = GetParam();
  ScheduleSpec spec;
  spec.n_robots = c.n;
  spec.horizon = c.horizon;
  spec.synchrony = c.sync;
  spec.fairness_bound = c.fairness;
  spec.instantaneous_moves = c.instantaneous;
  const auto paths = gen_schedules(spec);
  const auto expect = test::brute_schedule_sets(spec);
  ASSERT_EQ(paths.size(), expect.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    EXPECT_EQ(paths[i].sets(), expect[i]) << i;
    EXPECT_TRUE(validate_path(paths[i]).empty()) << paths[i].to_string();
  }
}

INSTANTIATE_TEST_SUITE_P(
    Small, FamilyOracle,
    ::testing::Values(FamilyCase{2, 2, Synchrony::fsync(), 1, false},
                      FamilyCase{2, 2, Synchrony::ssync(), 1, false},
                      FamilyCase{2, 3, Synchrony::ssync(), 2, false},
                      FamilyCase{3, 2, Synchrony::ssync(), 2, false},
                      FamilyCase{2, 2, Synchrony::k_async(1), 1, false},
                      FamilyCase{2, 2, Synchrony::k_async(1), 2, false},
                      FamilyCase{2, 2, Synchrony::k_async(1), 2, true},
                      FamilyCase{1, 3, Synchrony::ssync(), 1, false}));

TEST(Schedule, SsyncFairnessCount) {
  // Two robots, rounds drawn from {1},{2},{1,2}; fairness 1 forces {1,2}.
  ScheduleSpec spec;
  spec.n_robots = 2;
  spec.horizon = 3;
  spec.synchrony = Synchrony::ssync();
  spec.fairness_bound = 3;
  EXPECT_EQ(gen_schedules(spec).size(), 27u - 2u);
  spec.fairness_bound = 1;
  EXPECT_EQ(gen_schedules(spec).size(), 1u);
}
