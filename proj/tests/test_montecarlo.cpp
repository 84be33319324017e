#include <cmath>
#include <cstdlib>
#include <vector>

#include <gtest/gtest.h>

#include "lexwalk/analytics.hpp"
#include "lexwalk/error.hpp"
#include "lexwalk/montecarlo.hpp"
#include "lexwalk/renewal.hpp"
#include "lexwalk/rng.hpp"
#include "oracles.hpp"

using namespace lexwalk;
using namespace lexwalk::montecarlo;

namespace {

TransitionKernel kernel(std::vector<double> n) { return build_kernel(validate_profile(n)); }

TransitionKernel revival_kernel(std::vector<double> n, double n0) {
  return build_kernel(validate_profile(n), {TopPolicy::FlowPreserving, FiniteRevival{n0}});
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// Non-overlapping batch means, for autocorrelated series.
MeanSe batch_means(const std::vector<double> &xs, std::size_t batches) {
  const std::size_t len = xs.size() / batches;
  std::vector<double> means;
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += xs[i];
    means.push_back(s / static_cast<double>(len));
  }
  double m = 0.0;
  for (double x : means) m += x;
  m /= static_cast<double>(batches);
  double v = 0.0;
  for (double x : means) v += (x - m) * (x - m);
  v /= static_cast<double>(batches - 1);
  return {m, std::sqrt(v / static_cast<double>(batches))};
}

}  // namespace

TEST(Rng, StreamSeedsAreDistinctAndStable) {
  EXPECT_EQ(stream_seed(42, 0), stream_seed(42, 0));
  EXPECT_NE(stream_seed(42, 0), stream_seed(42, 1));
  EXPECT_NE(stream_seed(42, 0), stream_seed(43, 0));
  // Reference value of the SplitMix64 output for state 0.
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Trajectory, DeterministicAndWellFormed) {
  const auto k = kernel({6, 3, 2});
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto t = simulate_trajectory(k, 99, i, 10'000);
    const auto again = simulate_trajectory(k, 99, i, 10'000);
    ASSERT_EQ(t.levels, again.levels);
    EXPECT_EQ(t.seed, stream_seed(99, i));
    EXPECT_EQ(t.levels.front(), 1);
    for (std::size_t s = 1; s < t.levels.size(); ++s) {
      ASSERT_LE(std::abs(t.levels[s] - t.levels[s - 1]), 1);
      ASSERT_GE(t.levels[s], 0);
      ASSERT_LE(t.levels[s], 3);
    }
    if (t.absorbed_at) {
      EXPECT_EQ(t.levels.back(), 0);
      EXPECT_EQ(t.ticks(), *t.absorbed_at);
      for (std::size_t s = 0; s + 1 < t.levels.size(); ++s) ASSERT_GT(t.levels[s], 0);
    }
  }
}

TEST(Trajectory, HorizonReachedIsFlaggedNotThrown) {
  const auto t = simulate_trajectory(kernel({1000}), 1, 0, 5);
  EXPECT_FALSE(t.absorbed_at.has_value());
  EXPECT_EQ(t.ticks(), 5);
}

TEST(Trajectory, SingleLevelMeanLifetime) {
  // Geom(1/4): mean 4, variance (1-p)/p^2 = 12.
  const auto k = kernel({4});
  const int n = 100'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(*simulate_trajectory(k, 2024, i, 1'000'000).absorbed_at);
  const double se = std::sqrt(12.0 / n);
  EXPECT_NEAR(sum / n, 4.0, 3.0 * se);
}

TEST(Trajectory, LifetimesMatchAnalyticPmf) {
  const auto k = kernel({3, 2});
  const auto pmf = analytics::lifetime_pmf_light_tail(k, 50, 1e-12, 100'000);
  const int n = 1'000'000;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(pmf.support_end() + 1), 0);
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto life = *simulate_trajectory(k, 7, i, 1'000'000).absorbed_at;
    if (life < static_cast<std::int64_t>(counts.size())) ++counts[static_cast<std::size_t>(life)];
    sum += static_cast<double>(life);
    sq += static_cast<double>(life) * static_cast<double>(life);
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  EXPECT_NEAR(mean, analytics::mean_lifetime(k), 3.0 * se);

  std::vector<double> probs(counts.size(), 0.0);
  for (std::int64_t t = 1; t <= pmf.support_end(); ++t) probs[static_cast<std::size_t>(t)] = pmf.mass(t);
  const auto chi = oracle::chi_square(counts, probs);
  EXPECT_TRUE(chi.accept()) << chi.statistic << " > " << chi.critical_1pct << " (dof " << chi.dof << ")";
}

TEST(Selection, UnboundedWindowTakesFirstTrajectories) {
  const auto k = kernel({5, 2});
  const auto sel = select_trajectories(k, 3, 10, {});
  ASSERT_EQ(sel.size(), 10u);
  for (std::size_t i = 0; i < sel.size(); ++i) {
    EXPECT_EQ(sel[i].index, i);
    EXPECT_EQ(sel[i].levels, simulate_trajectory(k, 3, i, 100 * 7).levels);
  }
}

TEST(Selection, WindowIsRespected) {
  const auto k = kernel({20, 8, 3});
  const double unit = k.profile().total_words();
  const auto sel = select_trajectories(k, 5, 25, {0.9, 1.1});
  ASSERT_EQ(sel.size(), 25u);
  for (const auto &t : sel) {
    ASSERT_TRUE(t.absorbed_at);
    EXPECT_GE(static_cast<double>(*t.absorbed_at), 0.9 * unit);
    EXPECT_LE(static_cast<double>(*t.absorbed_at), 1.1 * unit);
    EXPECT_EQ(simulate_trajectory(k, 5, t.index, *t.absorbed_at).levels, t.levels);
  }
}

TEST(Selection, BudgetExhaustion) {
  SelectionOptions opts;
  opts.max_attempts = 50;
  try {
    select_trajectories(kernel({20, 8, 3}), 5, 3, {5.0, 5.1}, opts);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), Errc::SamplingBudgetExhausted);
  }
  EXPECT_THROW(select_trajectories(kernel({4}), 1, 1, {2.0, 1.0}), Error);
  EXPECT_THROW(select_trajectories(revival_kernel({4}, 2), 1, 1, {}), Error);
}

TEST(Population, OneBirthPerTickAndBalancedBooks) {
  const auto k = kernel({10, 4, 2});
  const auto c = simulate_population(k, 500, InitialState::Stationary, 8);
  EXPECT_EQ(c.initial_population, 16);
  for (std::int64_t t = 1; t <= c.ticks(); ++t) {
    EXPECT_EQ(c.births[static_cast<std::size_t>(t - 1)], t);
    std::int64_t sum = 0;
    for (int m = 1; m <= 3; ++m) {
      ASSERT_GE(c.count(t, m), 0);
      sum += c.count(t, m);
    }
    EXPECT_EQ(sum, c.population(t));
  }
  const auto again = simulate_population(k, 500, InitialState::Stationary, 8);
  EXPECT_EQ(again.counts, c.counts);
}

TEST(Population, StationaryOccupanciesHold) {
  const std::vector<double> n = {3, 2};
  const auto c = simulate_population(kernel(n), 100'000, InitialState::Stationary, 12345);
  for (int m = 1; m <= 2; ++m) {
    std::vector<double> xs;
    for (std::int64_t t = 1; t <= c.ticks(); ++t) xs.push_back(static_cast<double>(c.count(t, m)));
    const auto r = batch_means(xs, 100);
    EXPECT_NEAR(r.mean, n[static_cast<std::size_t>(m - 1)], 3.0 * r.se) << "level " << m;
  }
}

TEST(Population, EmptyStartFillsTheLexicon) {
  const std::vector<double> n = {2000, 1000, 500};
  const double total = 3500.0;
  const auto ticks = static_cast<std::int64_t>(10 * total);
  const auto c = simulate_population(kernel(n), ticks, InitialState::Empty, 77);
  EXPECT_EQ(c.initial_population, 0);
  double late = 0.0;
  const std::int64_t from = ticks - ticks / 10;
  for (std::int64_t t = from + 1; t <= ticks; ++t) late += static_cast<double>(c.population(t));
  late /= static_cast<double>(ticks - from);
  EXPECT_NEAR(late, total, 0.05 * total);
  EXPECT_LT(c.population(static_cast<std::int64_t>(total / 10)), c.population(ticks));
}

TEST(AgeCensus, MatchesRenewalLaw) {
  const auto k = kernel({3, 2});
  const auto census = age_census(k, 1'000'000, 31, {});
  const auto expected = renewal::equilibrium_age_pmf(analytics::lifetime_pmf_light_tail(k, 50, 1e-9, 100'000));
  EXPECT_EQ(census.snapshots, (1'000'000 - 100) / 100 + 1);
  const auto chi = oracle::chi_square(census.counts, expected.masses);
  EXPECT_TRUE(chi.accept()) << chi.statistic << " > " << chi.critical_1pct << " (dof " << chi.dof << ")";

  const double se = std::sqrt(census.population_variance / static_cast<double>(census.snapshots));
  EXPECT_NEAR(census.mean_population, 5.0, 3.0 * se);
  EXPECT_GT(census.counts[0], 0);
  EXPECT_THROW(age_census(k, 10, 31, {}), Error);
}

TEST(Revival, HugeDormantZoneBehavesLikeAbsorption) {
  const auto s = simulate_revival(revival_kernel({4}, 1e12), 3, 1000, 1000);
  EXPECT_EQ(s.mean_revivals, 0.0);
  EXPECT_EQ(s.revival_histogram.size(), 1u);
}

TEST(Revival, UnitDormantZoneReturnsImmediately) {
  const auto s = simulate_revival(revival_kernel({4, 2}, 1.0), 3, 200, 2000);
  EXPECT_GT(s.mean_revivals, 0.0);
  ASSERT_EQ(s.dormancy.size(), 1u);
  EXPECT_EQ(s.dormancy.begin()->first, 1);
}

TEST(Revival, TwoStateBalance) {
  // n0 = n1 = 4: symmetric two-state chain, half the time dormant.
  const auto s = simulate_revival(revival_kernel({4}, 4.0), 17, 2000, 20'000);
  EXPECT_NEAR(s.zone_zero_fraction, 0.5, 3.0 * s.zone_zero_fraction_se);
  EXPECT_THROW(simulate_revival(kernel({4}), 1, 1, 1), Error);
}
