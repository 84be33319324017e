#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "lexwalk/pmf.hpp"
#include "lexwalk/profile.hpp"

// Stochastic counterparts of the analytics. Every result is a pure function
// of the master seed and the structural inputs (see rng.hpp for seeding).
//
// Within a tick every live word steps independently by its kernel row; the
// expected flows (one word up and one down across each zone boundary per
// tick) reproduce the cascade of replacements in expectation. The newborn is
// injected at level 1 after the moves.
namespace lexwalk::montecarlo {

struct Trajectory {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::vector<int> levels;                 // levels[t] = level after tick t; levels[0] = 1
  std::optional<std::int64_t> absorbed_at;  // nullopt: survived the horizon
  std::int64_t revivals = 0;

  std::int64_t ticks() const noexcept { return static_cast<std::int64_t>(levels.size()) - 1; }
};

/// Stream index reserved for population timelines.
inline constexpr std::uint64_t kPopulationStream = std::numeric_limits<std::uint64_t>::max();

Trajectory simulate_trajectory(const TransitionKernel &kernel, std::uint64_t master_seed, std::uint64_t index,
                               std::int64_t horizon);

struct LifetimeWindow {
  double lo = 0.0;  // in characteristic units (multiples of sum n_m)
  double hi = std::numeric_limits<double>::infinity();
};

struct SelectionOptions {
  std::int64_t max_attempts = 1'000'000;
  std::int64_t horizon = 0;  // cap used when the window is unbounded; 0 = 100 sum n_m
};

/// Trajectories with indices 0, 1, 2, ... are drawn until `count` of them have
/// a lifetime inside the window.
std::vector<Trajectory> select_trajectories(const TransitionKernel &kernel, std::uint64_t master_seed,
                                            std::int64_t count, LifetimeWindow window,
                                            const SelectionOptions &options = {});

enum class InitialState { Stationary, Empty };

struct OccupancyCensus {
  int max_level = 0;
  std::int64_t initial_population = 0;
  std::vector<std::int64_t> counts;  // tick-major: counts[(t-1)*M + (m-1)]
  std::vector<std::int64_t> births;  // cumulative after tick t
  std::vector<std::int64_t> deaths;

  std::int64_t ticks() const noexcept { return static_cast<std::int64_t>(births.size()); }
  std::int64_t count(std::int64_t tick, int level) const {
    return counts[static_cast<std::size_t>((tick - 1) * max_level + (level - 1))];
  }
  std::int64_t population(std::int64_t tick) const {
    return initial_population + births[static_cast<std::size_t>(tick - 1)] -
           deaths[static_cast<std::size_t>(tick - 1)];
  }
};

/// Stationary start seeds round(n_m) words at each level, all of age 0.
OccupancyCensus simulate_population(const TransitionKernel &kernel, std::int64_t ticks, InitialState initial,
                                    std::uint64_t master_seed);

struct CensusOptions {
  std::int64_t burn_in = 0;  // 0 = ceil(20 sum n_m)
  std::int64_t spacing = 0;  // ticks between snapshots; 0 = ceil(20 sum n_m)
};

struct AgeCensus {
  DiscretePmf pmf;                   // empirical age pmf, support from 0
  std::vector<std::int64_t> counts;  // pooled word counts by age
  std::int64_t snapshots = 0;
  double mean_population = 0.0;
  double population_variance = 0.0;  // across snapshots
};

/// Pools word ages over snapshots taken every `spacing` ticks after burn-in.
/// With spacing well past the longest plausible lifetime no word appears in
/// two snapshots, so the snapshots are independent.
AgeCensus age_census(const TransitionKernel &kernel, std::int64_t ticks, std::uint64_t master_seed,
                     const CensusOptions &options = {});

struct RevivalSummary {
  std::int64_t words = 0;
  std::int64_t horizon = 0;
  double zone_zero_occupancy = 0.0;
  std::vector<std::int64_t> revival_histogram;     // [k] = words revived k times
  std::map<std::int64_t, std::int64_t> dormancy;   // completed dormancy length -> count
  std::int64_t censored_dormancies = 0;            // still dormant at the horizon
  double mean_revivals = 0.0;
  double zone_zero_fraction = 0.0;                 // mean fraction of ticks spent at level 0
  double zone_zero_fraction_se = 0.0;              // standard error across words
};

RevivalSummary simulate_revival(const TransitionKernel &kernel, std::uint64_t master_seed, std::int64_t count,
                                std::int64_t horizon);

}  // namespace lexwalk::montecarlo
