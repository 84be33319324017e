#pragma once

#include <cstdint>
#include <vector>

namespace lexwalk {

/// Probability mass function on the integers support_start, support_start+1, ...
/// with `tail_mass` carrying whatever lies beyond the last stored point.
struct DiscretePmf {
  std::int64_t support_start = 0;
  std::vector<double> masses;
  double tail_mass = 0.0;

  std::int64_t support_end() const noexcept {
    return support_start + static_cast<std::int64_t>(masses.size()) - 1;
  }

  double mass(std::int64_t x) const noexcept {
    if (x < support_start || x > support_end()) return 0.0;
    return masses[static_cast<std::size_t>(x - support_start)];
  }

  double stored_mass() const noexcept;

  /// P(X > x), tail included.
  double survival(std::int64_t x) const noexcept;

  /// Survival at every stored support point, computed as a running sum from
  /// the right so it is non-increasing by construction.
  std::vector<double> survival_curve() const;
};

}  // namespace lexwalk
