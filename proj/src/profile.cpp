#include "lexwalk/profile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lexwalk/error.hpp"

namespace lexwalk {

ZoneProfile validate_profile(std::span<const double> raw) {
  if (raw.empty()) {
    throw Error(Errc::EmptyProfile, "zone profile has no levels");
  }
  ZoneProfile profile;
  profile.occupancies_.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double n = raw[i];
    const auto level = std::to_string(i + 1);
    if (!std::isfinite(n) || n <= 0.0) {
      throw Error(Errc::NonPositiveOccupancy, "occupancy of zone " + level + " must be positive");
    }
    if (n < 2.0) {
      throw Error(Errc::OccupancyBelowTwo,
                  "occupancy of zone " + level + " is below 2 (stay probability would be negative)");
    }
    profile.occupancies_.push_back(n);
    profile.total_words_ += n;
    profile.total_meanings_ += static_cast<double>(i + 1) * n;
  }
  return profile;
}

TransitionKernel build_kernel(const ZoneProfile &profile, const BoundaryPolicy &boundary) {
  const int top = profile.max_level();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(top + 1, top + 1);

  if (const auto *revival = std::get_if<FiniteRevival>(&boundary.bottom)) {
    const double n0 = revival->zone_zero_occupancy;
    if (!std::isfinite(n0) || n0 < 1.0) {
      throw Error(Errc::InvalidBoundary, "revival zone occupancy n0 must be >= 1");
    }
    p(0, 1) = 1.0 / n0;
    p(0, 0) = 1.0 - 1.0 / n0;
  } else {
    p(0, 0) = 1.0;
  }

  for (int m = 1; m < top; ++m) {
    const double move = 1.0 / profile.occupancy(m);
    p(m, m - 1) = move;
    p(m, m + 1) = move;
    p(m, m) = 1.0 - 2.0 * move;
  }
  const double down = (boundary.top == TopPolicy::FlowPreserving ? 1.0 : 2.0) / profile.occupancy(top);
  p(top, top - 1) = down;
  p(top, top) = 1.0 - down;

  return TransitionKernel(profile, boundary, std::move(p));
}

namespace {

// Mean level of the truncated geometric weights r^(m-1), m = 1..M,
// evaluated in log space so large M and extreme r stay finite.
double truncated_geometric_mean(double log_ratio, int max_level) {
  const double top = log_ratio > 0.0 ? (max_level - 1) * log_ratio : 0.0;
  double weight_sum = 0.0;
  double level_sum = 0.0;
  for (int m = 1; m <= max_level; ++m) {
    const double w = std::exp((m - 1) * log_ratio - top);
    weight_sum += w;
    level_sum += m * w;
  }
  return level_sum / weight_sum;
}

}  // namespace

GeneratedProfile generate_profile(double total_words, double total_meanings, int max_level) {
  if (!(total_words > 0.0) || !std::isfinite(total_words) || !std::isfinite(total_meanings)) {
    throw Error(Errc::InvalidArgument, "total word count must be positive and finite");
  }
  if (max_level < 1) {
    throw Error(Errc::InvalidArgument, "max level must be >= 1");
  }
  if (total_meanings < total_words) {
    throw Error(Errc::InfeasibleConstraints, "total meanings must be >= total words");
  }
  if (total_words < 2.0) {
    throw Error(Errc::InfeasibleConstraints, "total word count below 2 cannot fill a zone");
  }

  const double target = total_meanings / total_words;
  for (int top = max_level; top >= 1; --top) {
    if (target == 1.0) {
      // All mass at level 1; higher zones would be empty.
      const double single[] = {total_words};
      return {validate_profile(single), 0.0, max_level};
    }
    if (top == 1 || target >= static_cast<double>(top)) {
      throw Error(Errc::InfeasibleConstraints,
                  "mean polysemy " + std::to_string(target) + " is not reachable with " +
                      std::to_string(top) + " levels and n_m >= 2");
    }

    // Mean is strictly increasing in log r; bisect to machine resolution.
    double lo = -60.0;
    double hi = 60.0;
    for (int it = 0; it < 400 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (truncated_geometric_mean(mid, top) < target ? lo : hi) = mid;
    }
    const double log_ratio = 0.5 * (lo + hi);
    const double ratio = std::exp(log_ratio);

    std::vector<double> n(static_cast<std::size_t>(top));
    double power_sum = 0.0;
    for (int m = 1; m <= top; ++m) power_sum += std::exp((m - 1) * log_ratio);
    const double first = total_words / power_sum;
    double words = 0.0;
    double meanings = 0.0;
    for (int m = 1; m <= top; ++m) {
      n[static_cast<std::size_t>(m - 1)] = first * std::exp((m - 1) * log_ratio);
      words += n[static_cast<std::size_t>(m - 1)];
      meanings += m * n[static_cast<std::size_t>(m - 1)];
    }
    if (std::abs(words - total_words) > 1e-9 * total_words ||
        std::abs(meanings - total_meanings) > 1e-9 * total_meanings) {
      throw Error(Errc::NoConvergence, "truncated-geometric solve missed (N, S) by more than 1e-9");
    }
    if (*std::min_element(n.begin(), n.end()) >= 2.0) {
      return {validate_profile(n), ratio, max_level};
    }
  }
  throw Error(Errc::InfeasibleConstraints, "no level count admits n_m >= 2");
}

}  // namespace lexwalk
