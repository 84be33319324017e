#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "lexwalk/error.hpp"
#include "lexwalk/profile.hpp"
#include "oracles.hpp"

using namespace lexwalk;

namespace {

Errc error_code(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "expected lexwalk::Error";
  return Errc::IoError;
}

ZoneProfile make(std::vector<double> n) { return validate_profile(n); }

}  // namespace

TEST(ValidateProfile, ComputesTotals) {
  const auto p = make({4, 2});
  EXPECT_EQ(p.max_level(), 2);
  EXPECT_DOUBLE_EQ(p.total_words(), 6.0);
  EXPECT_DOUBLE_EQ(p.total_meanings(), 8.0);
  EXPECT_DOUBLE_EQ(p.mean_polysemy(), 8.0 / 6.0);

  const auto single = make({5});
  EXPECT_EQ(single.max_level(), 1);
  EXPECT_DOUBLE_EQ(single.total_words(), 5.0);
  EXPECT_DOUBLE_EQ(single.mean_polysemy(), 1.0);
}

TEST(ValidateProfile, RejectsBadInput) {
  EXPECT_EQ(error_code([] { make({}); }), Errc::EmptyProfile);
  EXPECT_EQ(error_code([] { make({3, 0}); }), Errc::NonPositiveOccupancy);
  EXPECT_EQ(error_code([] { make({3, -1}); }), Errc::NonPositiveOccupancy);
  try {
    make({3, 1.5});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), Errc::OccupancyBelowTwo);
    EXPECT_NE(std::string(e.what()).find("zone 2"), std::string::npos);
  }
}

TEST(BuildKernel, TwoLevelFlowPreserving) {
  const auto k = build_kernel(make({3, 2}));
  const double expected[3][3] = {{1, 0, 0}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, {0, 0.5, 0.5}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(k(i, j), expected[i][j]) << i << "," << j;
  }
}

TEST(BuildKernel, SingleLevelIsGeometric) {
  const auto k = build_kernel(make({4}));
  EXPECT_DOUBLE_EQ(k(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(k(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(k(1, 0), 0.25);
  EXPECT_DOUBLE_EQ(k(1, 1), 0.75);
}

TEST(BuildKernel, HardReflectAtTwo) {
  const auto k = build_kernel(make({3, 2}), {TopPolicy::HardReflect, Absorbing{}});
  EXPECT_DOUBLE_EQ(k(2, 0), 0.0);
  EXPECT_DOUBLE_EQ(k(2, 1), 1.0);
  EXPECT_DOUBLE_EQ(k(2, 2), 0.0);
}

TEST(BuildKernel, RevivalRow) {
  const auto k = build_kernel(make({4, 3}), {TopPolicy::FlowPreserving, FiniteRevival{5.0}});
  EXPECT_DOUBLE_EQ(k(0, 1), 0.2);
  EXPECT_DOUBLE_EQ(k(0, 0), 0.8);
  EXPECT_EQ(error_code([] { build_kernel(make({4}), {TopPolicy::FlowPreserving, FiniteRevival{0.5}}); }),
            Errc::InvalidBoundary);
}

TEST(BuildKernel, RandomProfilesAreStochasticAndFlowBalanced) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = oracle::random_profile(rng, 15, 2.0, 1e5);
    const auto p = validate_profile(n);
    for (auto top : {TopPolicy::FlowPreserving, TopPolicy::HardReflect}) {
      const auto k = build_kernel(p, {top, Absorbing{}});
      for (int i = 0; i <= p.max_level(); ++i) {
        EXPECT_NEAR(k.matrix().row(i).sum(), 1.0, 1e-12);
        EXPECT_GE(k.matrix().row(i).minCoeff(), 0.0);
        for (int j = 0; j <= p.max_level(); ++j) {
          if (std::abs(i - j) > 1) EXPECT_EQ(k(i, j), 0.0);
        }
      }
    }
    // One tick with one birth maps the occupancy vector to itself.
    const auto k = build_kernel(p);
    for (int m = 1; m <= p.max_level(); ++m) {
      double inflow = m == 1 ? 1.0 : 0.0;
      for (int j = 1; j <= p.max_level(); ++j) inflow += p.occupancy(j) * k(j, m);
      EXPECT_NEAR(inflow, p.occupancy(m), 1e-9 * p.occupancy(m)) << "level " << m;
    }
  }
}

TEST(GenerateProfile, RussianLexiconMatchesNewtonOracle) {
  const double N = 93000, S = 138000;
  const auto g = generate_profile(N, S, 10);
  ASSERT_EQ(g.profile.max_level(), 10);
  EXPECT_NEAR(g.profile.total_words(), N, 1e-9 * N);
  EXPECT_NEAR(g.profile.total_meanings(), S, 1e-9 * S);

  const auto [n1, r] = oracle::truncated_geometric_newton(N, S, 10);
  EXPECT_NEAR(g.ratio, r, 1e-10);
  EXPECT_NEAR(g.profile.occupancy(1), n1, 1e-8 * n1);
  // Close to the untruncated closed form N^2/S; truncation shifts it slightly.
  EXPECT_NEAR(g.profile.occupancy(1), N * N / S, 1e-3 * N * N / S);
  EXPECT_NEAR(r, 1.0 - N / S, 1e-3);
}

TEST(GenerateProfile, UnitMeanCollapsesToOneLevel) {
  for (int M : {1, 3, 12}) {
    const auto g = generate_profile(500.0, 500.0, M);
    ASSERT_EQ(g.profile.max_level(), 1);
    EXPECT_DOUBLE_EQ(g.profile.occupancy(1), 500.0);
  }
}

TEST(GenerateProfile, InfeasibleMeanRejectedLikeBruteForceScan) {
  // Scan (n1, n2) with n_m >= 2 and n1 + n2 = 6: best mean is (2 + 2*4) / 6.
  double best = 0.0;
  for (double n1 = 2.0; n1 <= 4.0 + 1e-12; n1 += 0.001) best = std::max(best, (n1 + 2.0 * (6.0 - n1)) / 6.0);
  EXPECT_NEAR(best, 10.0 / 6.0, 1e-3);
  EXPECT_LT(best, 20.0 / 6.0);
  EXPECT_EQ(error_code([] { generate_profile(6, 20, 2); }), Errc::InfeasibleConstraints);
  EXPECT_EQ(error_code([] { generate_profile(10, 5, 3); }), Errc::InfeasibleConstraints);
  EXPECT_EQ(error_code([] { generate_profile(0, 5, 3); }), Errc::InvalidArgument);
}

TEST(GenerateProfile, LowersTopLevelUntilOccupancyReachesTwo) {
  const auto g = generate_profile(100, 130, 12);
  EXPECT_LT(g.profile.max_level(), 12);
  EXPECT_EQ(g.requested_max_level, 12);
  EXPECT_GE(g.profile.occupancy(g.profile.max_level()), 2.0);
  const auto wider = generate_profile(100, 130, g.profile.max_level() + 1);
  EXPECT_EQ(wider.profile.max_level(), g.profile.max_level());
}

TEST(GenerateProfile, OutputAlwaysValidAndReproducesTotals) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> logn(std::log(10.0), std::log(1e6));
  std::uniform_real_distribution<double> mean(1.0, 3.0);
  std::uniform_int_distribution<int> levels(1, 20);
  int generated = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const double N = std::exp(logn(rng));
    const double S = N * mean(rng);
    const int M = levels(rng);
    try {
      const auto g = generate_profile(N, S, M);
      ++generated;
      std::vector<double> copy(g.profile.occupancies().begin(), g.profile.occupancies().end());
      EXPECT_NO_THROW(validate_profile(copy));
      EXPECT_NEAR(g.profile.total_words(), N, 1e-9 * N);
      EXPECT_NEAR(g.profile.total_meanings(), S, 1e-9 * S);
      EXPECT_LE(g.profile.max_level(), M);
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), Errc::InfeasibleConstraints) << e.what();
    }
  }
  EXPECT_GT(generated, 200);
}
