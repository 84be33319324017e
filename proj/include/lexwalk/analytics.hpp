#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lexwalk/pmf.hpp"
#include "lexwalk/profile.hpp"

// Exact life-cycle characteristics of a word, computed from the transient
// block Q of an absorbing kernel. Every operation rejects revival kernels.
namespace lexwalk::analytics {

/// Conditional level law of surviving words; probabilities[i] is level i+1.
struct LevelDistribution {
  std::vector<double> probabilities;
  std::optional<std::int64_t> age;  // nullopt for the quasi-stationary limit

  double mean_level() const noexcept;
};

struct LevelSnapshot {
  LevelDistribution distribution;
  double survival = 1.0;  // P(lifetime > age)
};

struct QuasiStationary {
  LevelDistribution distribution;
  double perron_value = 0.0;  // per-tick survival rate of old words
  std::int64_t iterations = 0;
};

struct PowerIterationOptions {
  double tolerance = 1e-12;  // total variation between successive iterates
  std::int64_t max_iterations = 1'000'000;
};

struct AgeGivenLevel {
  int level = 1;
  DiscretePmf pmf;                // ages 0..horizon, tail = ages beyond horizon
  double mean_age = 0.0;          // exact, not truncated at the horizon
  double expected_occupancy = 0;  // sum over all ages of [e_1 Q^a]_m
  double level_share = 0.0;       // expected_occupancy / mean lifetime
};

/// Lifetime in ticks for a word born at level 1; support starts at 1.
DiscretePmf lifetime_pmf(const TransitionKernel &kernel, std::int64_t horizon);

/// Like lifetime_pmf but keeps propagating past `min_horizon` until the mass
/// beyond the horizon drops below `max_tail`. Throws HeavyTail if that needs
/// more than `max_horizon` ticks.
DiscretePmf lifetime_pmf_light_tail(const TransitionKernel &kernel, std::int64_t min_horizon, double max_tail,
                                    std::int64_t max_horizon);

/// h(1) from (I - Q) h = 1.
double mean_lifetime(const TransitionKernel &kernel);

LevelSnapshot level_distribution_at_age(const TransitionKernel &kernel, std::int64_t age);

QuasiStationary quasi_stationary(const TransitionKernel &kernel, const PowerIterationOptions &options = {});

std::vector<std::pair<std::int64_t, double>> mean_polysemy_vs_age(const TransitionKernel &kernel,
                                                                  std::span<const std::int64_t> ages);

AgeGivenLevel age_distribution_given_level(const TransitionKernel &kernel, int level, std::int64_t horizon);

/// Total-variation distance between two level distributions of equal size.
double total_variation(std::span<const double> a, std::span<const double> b);

}  // namespace lexwalk::analytics
