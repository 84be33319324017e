#include "lexwalk/pmf.hpp"

namespace lexwalk {

double DiscretePmf::stored_mass() const noexcept {
  double total = 0.0;
  for (double m : masses) total += m;
  return total;
}

double DiscretePmf::survival(std::int64_t x) const noexcept {
  if (x < support_start) return stored_mass() + tail_mass;
  double s = tail_mass;
  for (std::int64_t i = support_end(); i > x; --i) {
    s += masses[static_cast<std::size_t>(i - support_start)];
  }
  return s;
}

std::vector<double> DiscretePmf::survival_curve() const {
  std::vector<double> s(masses.size());
  double acc = tail_mass;
  for (std::size_t i = masses.size(); i-- > 0;) {
    s[i] = acc;
    acc += masses[i];
  }
  return s;
}

}  // namespace lexwalk
