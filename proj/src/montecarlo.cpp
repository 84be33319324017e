#include "lexwalk/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lexwalk/error.hpp"
#include "lexwalk/rng.hpp"

namespace lexwalk::montecarlo {

namespace {

// Tridiagonal sampler over a kernel's rows.
class Stepper {
public:
  explicit Stepper(const TransitionKernel &kernel) {
    const int top = kernel.max_level();
    down_.assign(static_cast<std::size_t>(top + 1), 0.0);
    up_.assign(static_cast<std::size_t>(top + 1), 0.0);
    for (int l = 0; l <= top; ++l) {
      if (l > 0) down_[static_cast<std::size_t>(l)] = kernel(l, l - 1);
      if (l < top) up_[static_cast<std::size_t>(l)] = kernel(l, l + 1);
    }
  }

  int step(int level, Rng &rng) const noexcept {
    const double u = rng.uniform();
    const double down = down_[static_cast<std::size_t>(level)];
    if (u < down) return level - 1;
    if (u < down + up_[static_cast<std::size_t>(level)]) return level + 1;
    return level;
  }

private:
  std::vector<double> down_;
  std::vector<double> up_;
};

void require_absorbing(const TransitionKernel &kernel, const char *what) {
  if (!kernel.boundary().absorbing()) {
    throw Error(Errc::RevivalUnsupported, std::string(what) + " requires an absorbing bottom level");
  }
}

std::int64_t characteristic_ticks(const TransitionKernel &kernel, double multiple) {
  return static_cast<std::int64_t>(std::ceil(multiple * kernel.profile().total_words()));
}

// Words grouped by birth tick; within a cohort only per-level counts are kept.
struct Cohort {
  std::int64_t birth = 0;
  std::vector<std::int64_t> at_level;  // index 0 unused under absorption
  std::int64_t alive = 0;
};

class Population {
public:
  Population(const TransitionKernel &kernel, InitialState initial, std::uint64_t master_seed)
      : stepper_(kernel), top_(kernel.max_level()), rng_(stream_seed(master_seed, kPopulationStream)),
        scratch_(static_cast<std::size_t>(top_ + 1), 0) {
    if (initial == InitialState::Stationary) {
      Cohort seed{0, std::vector<std::int64_t>(static_cast<std::size_t>(top_ + 1), 0), 0};
      for (int m = 1; m <= top_; ++m) {
        const auto n = static_cast<std::int64_t>(std::llround(kernel.profile().occupancy(m)));
        seed.at_level[static_cast<std::size_t>(m)] = n;
        seed.alive += n;
      }
      initial_population_ = seed.alive;
      if (seed.alive > 0) cohorts_.push_back(std::move(seed));
    }
  }

  void advance(std::int64_t tick) {
    for (auto &cohort : cohorts_) {
      std::fill(scratch_.begin(), scratch_.end(), 0);
      for (int l = 1; l <= top_; ++l) {
        for (std::int64_t k = cohort.at_level[static_cast<std::size_t>(l)]; k > 0; --k) {
          ++scratch_[static_cast<std::size_t>(stepper_.step(l, rng_))];
        }
      }
      const std::int64_t died = scratch_[0];
      scratch_[0] = 0;
      cohort.at_level.swap(scratch_);
      cohort.alive -= died;
      deaths_ += died;
    }
    std::erase_if(cohorts_, [](const Cohort &c) { return c.alive == 0; });

    Cohort newborn{tick, std::vector<std::int64_t>(static_cast<std::size_t>(top_ + 1), 0), 1};
    newborn.at_level[1] = 1;
    cohorts_.push_back(std::move(newborn));
    ++births_;
  }

  void level_counts(std::vector<std::int64_t> &out) const {
    out.assign(static_cast<std::size_t>(top_), 0);
    for (const auto &c : cohorts_) {
      for (int l = 1; l <= top_; ++l) out[static_cast<std::size_t>(l - 1)] += c.at_level[static_cast<std::size_t>(l)];
    }
  }

  const std::vector<Cohort> &cohorts() const noexcept { return cohorts_; }
  std::int64_t births() const noexcept { return births_; }
  std::int64_t deaths() const noexcept { return deaths_; }
  std::int64_t initial_population() const noexcept { return initial_population_; }

private:
  Stepper stepper_;
  int top_;
  Rng rng_;
  std::vector<std::int64_t> scratch_;
  std::vector<Cohort> cohorts_;
  std::int64_t births_ = 0;
  std::int64_t deaths_ = 0;
  std::int64_t initial_population_ = 0;
};

}  // namespace

Trajectory simulate_trajectory(const TransitionKernel &kernel, std::uint64_t master_seed, std::uint64_t index,
                               std::int64_t horizon) {
  if (horizon < 0) throw Error(Errc::InvalidArgument, "trajectory horizon must be >= 0");
  const Stepper stepper(kernel);
  const bool absorbing = kernel.boundary().absorbing();

  Trajectory traj;
  traj.index = index;
  traj.seed = stream_seed(master_seed, index);
  Rng rng(traj.seed);
  traj.levels.reserve(static_cast<std::size_t>(std::min<std::int64_t>(horizon + 1, 4096)));
  traj.levels.push_back(1);

  int level = 1;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const int next = stepper.step(level, rng);
    if (level == 0 && next == 1) ++traj.revivals;
    level = next;
    traj.levels.push_back(level);
    if (absorbing && level == 0) {
      traj.absorbed_at = t;
      break;
    }
  }
  return traj;
}

std::vector<Trajectory> select_trajectories(const TransitionKernel &kernel, std::uint64_t master_seed,
                                            std::int64_t count, LifetimeWindow window,
                                            const SelectionOptions &options) {
  require_absorbing(kernel, "trajectory selection");
  if (!(window.lo < window.hi) || window.lo < 0.0) {
    throw Error(Errc::InvalidArgument, "lifetime window needs 0 <= lo < hi");
  }
  if (count < 0) throw Error(Errc::InvalidArgument, "count must be >= 0");

  const double unit = kernel.profile().total_words();
  const double lo_ticks = window.lo * unit;
  const double hi_ticks = window.hi * unit;
  // Walks that outlive the window are cut one tick past it.
  const std::int64_t horizon = std::isfinite(hi_ticks)
                                   ? static_cast<std::int64_t>(std::floor(hi_ticks)) + 1
                                   : (options.horizon > 0 ? options.horizon : characteristic_ticks(kernel, 100.0));

  std::vector<Trajectory> selected;
  for (std::int64_t attempt = 0; static_cast<std::int64_t>(selected.size()) < count; ++attempt) {
    if (attempt >= options.max_attempts) {
      throw Error(Errc::SamplingBudgetExhausted,
                  "only " + std::to_string(selected.size()) + " of " + std::to_string(count) +
                      " trajectories fell in the lifetime window after " + std::to_string(attempt) + " attempts");
    }
    Trajectory t = simulate_trajectory(kernel, master_seed, static_cast<std::uint64_t>(attempt), horizon);
    if (!t.absorbed_at) continue;
    const auto life = static_cast<double>(*t.absorbed_at);
    if (life >= lo_ticks && life <= hi_ticks) selected.push_back(std::move(t));
  }
  return selected;
}

OccupancyCensus simulate_population(const TransitionKernel &kernel, std::int64_t ticks, InitialState initial,
                                    std::uint64_t master_seed) {
  require_absorbing(kernel, "population simulation");
  if (ticks < 1) throw Error(Errc::InvalidArgument, "ticks must be >= 1");

  Population pop(kernel, initial, master_seed);
  OccupancyCensus census;
  census.max_level = kernel.max_level();
  census.initial_population = pop.initial_population();
  census.counts.reserve(static_cast<std::size_t>(ticks * census.max_level));
  census.births.reserve(static_cast<std::size_t>(ticks));
  census.deaths.reserve(static_cast<std::size_t>(ticks));

  std::vector<std::int64_t> levels;
  for (std::int64_t t = 1; t <= ticks; ++t) {
    pop.advance(t);
    pop.level_counts(levels);
    census.counts.insert(census.counts.end(), levels.begin(), levels.end());
    census.births.push_back(pop.births());
    census.deaths.push_back(pop.deaths());
  }
  return census;
}

AgeCensus age_census(const TransitionKernel &kernel, std::int64_t ticks, std::uint64_t master_seed,
                     const CensusOptions &options) {
  require_absorbing(kernel, "age census");
  const std::int64_t burn_in = options.burn_in > 0 ? options.burn_in : characteristic_ticks(kernel, 20.0);
  const std::int64_t spacing = options.spacing > 0 ? options.spacing : characteristic_ticks(kernel, 20.0);
  if (ticks < burn_in) {
    throw Error(Errc::InvalidArgument, "census run of " + std::to_string(ticks) +
                                           " ticks does not pass the burn-in of " + std::to_string(burn_in));
  }

  Population pop(kernel, InitialState::Stationary, master_seed);
  AgeCensus census;
  double pop_sum = 0.0;
  double pop_sq = 0.0;
  for (std::int64_t t = 1; t <= ticks; ++t) {
    pop.advance(t);
    if (t < burn_in || (t - burn_in) % spacing != 0) continue;
    std::int64_t population = 0;
    for (const auto &c : pop.cohorts()) {
      const auto age = static_cast<std::size_t>(t - c.birth);
      if (census.counts.size() <= age) census.counts.resize(age + 1, 0);
      census.counts[age] += c.alive;
      population += c.alive;
    }
    ++census.snapshots;
    pop_sum += static_cast<double>(population);
    pop_sq += static_cast<double>(population) * static_cast<double>(population);
  }

  std::int64_t total = 0;
  for (auto c : census.counts) total += c;
  census.pmf.support_start = 0;
  census.pmf.masses.reserve(census.counts.size());
  for (auto c : census.counts) {
    census.pmf.masses.push_back(total > 0 ? static_cast<double>(c) / static_cast<double>(total) : 0.0);
  }
  if (census.snapshots > 0) {
    const auto k = static_cast<double>(census.snapshots);
    census.mean_population = pop_sum / k;
    census.population_variance =
        census.snapshots > 1 ? (pop_sq - k * census.mean_population * census.mean_population) / (k - 1.0) : 0.0;
  }
  return census;
}

RevivalSummary simulate_revival(const TransitionKernel &kernel, std::uint64_t master_seed, std::int64_t count,
                                std::int64_t horizon) {
  const auto *revival = std::get_if<FiniteRevival>(&kernel.boundary().bottom);
  if (revival == nullptr) {
    throw Error(Errc::InvalidBoundary, "revival simulation requires a finite zone-0 occupancy");
  }
  if (count < 1 || horizon < 1) throw Error(Errc::InvalidArgument, "count and horizon must be >= 1");

  const Stepper stepper(kernel);
  RevivalSummary summary;
  summary.words = count;
  summary.horizon = horizon;
  summary.zone_zero_occupancy = revival->zone_zero_occupancy;

  double frac_sum = 0.0;
  double frac_sq = 0.0;
  std::int64_t revival_total = 0;
  for (std::int64_t w = 0; w < count; ++w) {
    Rng rng(stream_seed(master_seed, static_cast<std::uint64_t>(w)));
    int level = 1;
    std::int64_t revivals = 0;
    std::int64_t dormant_ticks = 0;
    std::int64_t sojourn = 0;
    for (std::int64_t t = 1; t <= horizon; ++t) {
      const int next = stepper.step(level, rng);
      if (level == 0 && next == 1) {
        ++revivals;
        ++summary.dormancy[sojourn];
        sojourn = 0;
      }
      level = next;
      if (level == 0) {
        ++dormant_ticks;
        ++sojourn;
      }
    }
    if (level == 0) ++summary.censored_dormancies;
    if (summary.revival_histogram.size() <= static_cast<std::size_t>(revivals)) {
      summary.revival_histogram.resize(static_cast<std::size_t>(revivals) + 1, 0);
    }
    ++summary.revival_histogram[static_cast<std::size_t>(revivals)];
    revival_total += revivals;
    const double frac = static_cast<double>(dormant_ticks) / static_cast<double>(horizon);
    frac_sum += frac;
    frac_sq += frac * frac;
  }

  const auto n = static_cast<double>(count);
  summary.mean_revivals = static_cast<double>(revival_total) / n;
  summary.zone_zero_fraction = frac_sum / n;
  if (count > 1) {
    const double var = std::max(0.0, (frac_sq - n * summary.zone_zero_fraction * summary.zone_zero_fraction) / (n - 1.0));
    summary.zone_zero_fraction_se = std::sqrt(var / n);
  }
  return summary;
}

}  // namespace lexwalk::montecarlo
