#include "lexwalk/renewal.hpp"

#include <string>

#include "lexwalk/error.hpp"

namespace lexwalk::renewal {

namespace {

void require_light_tail(const DiscretePmf &pmf) {
  if (!(pmf.tail_mass < kMaxTailMass)) {
    throw Error(Errc::HeavyTail, "tail mass " + std::to_string(pmf.tail_mass) +
                                     " beyond the horizon is too large; extend the horizon");
  }
}

}  // namespace

DiscretePmf equilibrium_age_pmf(const DiscretePmf &lifetime) {
  require_light_tail(lifetime);
  if (lifetime.support_start < 0) {
    throw Error(Errc::InvalidArgument, "lifetimes must be non-negative");
  }
  // Ages 0..T where T is the last stored lifetime; S(T) is the tail atom.
  const std::int64_t last = lifetime.support_end();
  if (last < 0) throw Error(Errc::ZeroMean, "lifetime pmf is empty");

  DiscretePmf age;
  age.support_start = 0;
  age.masses.assign(static_cast<std::size_t>(last + 1), 0.0);
  double s = lifetime.tail_mass;
  for (std::int64_t a = last; a >= 0; --a) {
    age.masses[static_cast<std::size_t>(a)] = s;
    s += lifetime.mass(a);
  }
  double mu = 0.0;
  for (double v : age.masses) mu += v;
  if (!(mu > 0.0)) throw Error(Errc::ZeroMean, "lifetime pmf has zero mean");
  for (double &v : age.masses) v /= mu;
  return age;
}

double mean_age(const DiscretePmf &age_pmf) {
  require_light_tail(age_pmf);
  double mean = 0.0;
  for (std::size_t i = 0; i < age_pmf.masses.size(); ++i) {
    mean += static_cast<double>(age_pmf.support_start + static_cast<std::int64_t>(i)) * age_pmf.masses[i];
  }
  return mean;
}

double mean_age_from_lifetime_moments(const DiscretePmf &lifetime) {
  require_light_tail(lifetime);
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < lifetime.masses.size(); ++i) {
    const double t = static_cast<double>(lifetime.support_start + static_cast<std::int64_t>(i));
    m1 += t * lifetime.masses[i];
    m2 += t * t * lifetime.masses[i];
  }
  const double beyond = static_cast<double>(lifetime.support_end() + 1);
  m1 += beyond * lifetime.tail_mass;
  m2 += beyond * beyond * lifetime.tail_mass;
  if (!(m1 > 0.0)) throw Error(Errc::ZeroMean, "lifetime pmf has zero mean");
  return (m2 - m1) / (2.0 * m1);
}

}  // namespace lexwalk::renewal
