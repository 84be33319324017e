#pragma once

#include "lexwalk/pmf.hpp"

// Equilibrium age of words in a stationary lexicon with one birth per tick.
// Age counts completed ticks since birth, so a word absorbed at tick t was
// seen at ages 0..t-1 and P(age = a) = P(L > a) / E[L].
namespace lexwalk::renewal {

inline constexpr double kMaxTailMass = 1e-6;

/// Lifetime mass beyond the horizon is treated as an atom at the first tick
/// past the horizon; it is below kMaxTailMass or the call fails with HeavyTail.
DiscretePmf equilibrium_age_pmf(const DiscretePmf &lifetime);

double mean_age(const DiscretePmf &age_pmf);

/// (E[L^2] - E[L]) / (2 E[L]) from the lifetime moments, same tail convention.
double mean_age_from_lifetime_moments(const DiscretePmf &lifetime);

}  // namespace lexwalk::renewal
