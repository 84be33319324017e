#include "lexwalk/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lexwalk/error.hpp"

namespace lexwalk::analytics {

namespace {

constexpr double kUnderflow = 1e-300;

void require_absorbing(const TransitionKernel &kernel) {
  if (!kernel.boundary().absorbing()) {
    throw Error(Errc::RevivalUnsupported, "exact analytics require an absorbing bottom level");
  }
}

Eigen::RowVectorXd birth_vector(const TransitionKernel &kernel) {
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(kernel.max_level());
  v(0) = 1.0;
  return v;
}

LevelDistribution normalized(const Eigen::RowVectorXd &u, double total, std::optional<std::int64_t> age) {
  LevelDistribution d;
  d.age = age;
  d.probabilities.resize(static_cast<std::size_t>(u.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i) d.probabilities[static_cast<std::size_t>(i)] = u(i) / total;
  return d;
}

void check_survival(double survival, std::int64_t age) {
  if (!(survival >= kUnderflow)) {
    throw Error(Errc::ZeroSurvival, "survival underflows at age " + std::to_string(age) +
                                        "; use a smaller age");
  }
}

// (I - Q)^T x = rhs^T, i.e. the row-vector solve x (I - Q) = rhs.
Eigen::RowVectorXd solve_left(const Eigen::FullPivLU<Eigen::MatrixXd> &lu_transposed,
                              const Eigen::RowVectorXd &rhs) {
  return lu_transposed.solve(rhs.transpose()).transpose();
}

}  // namespace

double LevelDistribution::mean_level() const noexcept {
  double mean = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) mean += static_cast<double>(i + 1) * probabilities[i];
  return mean;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) d += std::abs(a[i] - b[i]);
  return 0.5 * d;
}

DiscretePmf lifetime_pmf(const TransitionKernel &kernel, std::int64_t horizon) {
  require_absorbing(kernel);
  if (horizon < 1) throw Error(Errc::InvalidArgument, "lifetime horizon must be >= 1");

  const Eigen::MatrixXd q = kernel.transient_block();
  const double exit_rate = kernel(1, 0);
  Eigen::RowVectorXd v = birth_vector(kernel);
  Eigen::RowVectorXd next(v.size());

  DiscretePmf pmf;
  pmf.support_start = 1;
  pmf.masses.resize(static_cast<std::size_t>(horizon));
  for (std::int64_t t = 1; t <= horizon; ++t) {
    pmf.masses[static_cast<std::size_t>(t - 1)] = v(0) * exit_rate;
    next.noalias() = v * q;
    v.swap(next);
  }
  pmf.tail_mass = v.sum();
  return pmf;
}

DiscretePmf lifetime_pmf_light_tail(const TransitionKernel &kernel, std::int64_t min_horizon, double max_tail,
                                    std::int64_t max_horizon) {
  require_absorbing(kernel);
  if (min_horizon < 1 || max_horizon < min_horizon) {
    throw Error(Errc::InvalidArgument, "need 1 <= min_horizon <= max_horizon");
  }
  const Eigen::MatrixXd q = kernel.transient_block();
  const double exit_rate = kernel(1, 0);
  Eigen::RowVectorXd v = birth_vector(kernel);
  Eigen::RowVectorXd next(v.size());

  DiscretePmf pmf;
  pmf.support_start = 1;
  pmf.masses.reserve(static_cast<std::size_t>(min_horizon));
  for (std::int64_t t = 1;; ++t) {
    pmf.masses.push_back(v(0) * exit_rate);
    next.noalias() = v * q;
    v.swap(next);
    if (t >= min_horizon && v.sum() < max_tail) break;
    if (t >= max_horizon) {
      throw Error(Errc::HeavyTail, "tail mass still above " + std::to_string(max_tail) + " after " +
                                       std::to_string(max_horizon) + " ticks");
    }
  }
  pmf.tail_mass = v.sum();
  return pmf;
}

double mean_lifetime(const TransitionKernel &kernel) {
  require_absorbing(kernel);
  const auto m = kernel.max_level();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m) - kernel.transient_block();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) {
    throw Error(Errc::SingularSystem, "hitting-time system I - Q is singular");
  }
  const Eigen::VectorXd h = lu.solve(Eigen::VectorXd::Ones(m));
  if (!std::isfinite(h(0)) || h(0) <= 0.0) {
    throw Error(Errc::SingularSystem, "hitting-time solve produced a non-positive mean");
  }
  return h(0);
}

LevelSnapshot level_distribution_at_age(const TransitionKernel &kernel, std::int64_t age) {
  require_absorbing(kernel);
  if (age < 0) throw Error(Errc::InvalidArgument, "age must be >= 0");

  const Eigen::MatrixXd q = kernel.transient_block();
  Eigen::RowVectorXd u = birth_vector(kernel);
  Eigen::RowVectorXd next(u.size());
  for (std::int64_t a = 0; a < age; ++a) {
    next.noalias() = u * q;
    u.swap(next);
  }
  const double survival = u.sum();
  check_survival(survival, age);
  return {normalized(u, survival, age), survival};
}

QuasiStationary quasi_stationary(const TransitionKernel &kernel, const PowerIterationOptions &options) {
  require_absorbing(kernel);
  const Eigen::MatrixXd q = kernel.transient_block();

  // Power iteration on P = Q^K, K doubling whenever a block of steps fails to
  // converge. Q^K shares the left Perron vector of Q and contracts the
  // subdominant modes K times faster. P is rescaled after each squaring.
  constexpr int kBlock = 32;
  constexpr int kMaxSquarings = 60;
  Eigen::MatrixXd p = q;
  int squarings = 0;

  Eigen::RowVectorXd x = birth_vector(kernel);
  Eigen::RowVectorXd y(x.size());
  double previous_tv = 1.0;
  std::int64_t iterations = 0;
  bool converged = false;

  while (iterations < options.max_iterations && !converged) {
    for (int step = 0; step < kBlock && iterations < options.max_iterations; ++step) {
      y.noalias() = x * p;
      const double total = y.sum();
      if (!(total > 0.0) || !std::isfinite(total)) {
        throw Error(Errc::NoConvergence, "power iteration lost all mass");
      }
      y /= total;
      ++iterations;
      const double tv = 0.5 * (y - x).cwiseAbs().sum();
      x.swap(y);
      const double ratio = tv / previous_tv;
      previous_tv = tv;
      // Accept once the step is below tolerance and the geometric estimate of
      // the remaining error is too; at rounding level accept unconditionally.
      if (tv < options.tolerance &&
          (tv < 1e-15 || (ratio < 0.999 && tv * ratio / (1.0 - ratio) < options.tolerance))) {
        converged = true;
        break;
      }
    }
    if (!converged && squarings < kMaxSquarings) {
      p = (p * p).eval();
      const double scale = p.cwiseAbs().maxCoeff();
      if (scale > 0.0) p /= scale;
      ++squarings;
      previous_tv = 1.0;
    }
  }
  if (!converged) {
    throw Error(Errc::NoConvergence, "quasi-stationary power iteration did not converge in " +
                                         std::to_string(options.max_iterations) + " iterations");
  }

  QuasiStationary result;
  result.distribution = normalized(x, x.sum(), std::nullopt);
  const Eigen::RowVectorXd xq = x * q;
  result.perron_value = xq.sum() / x.sum();
  result.iterations = iterations;
  return result;
}

std::vector<std::pair<std::int64_t, double>> mean_polysemy_vs_age(const TransitionKernel &kernel,
                                                                  std::span<const std::int64_t> ages) {
  require_absorbing(kernel);
  std::vector<std::size_t> order(ages.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ages[a] < ages[b]; });

  const Eigen::MatrixXd q = kernel.transient_block();
  const Eigen::VectorXd levels = Eigen::VectorXd::LinSpaced(q.rows(), 1.0, static_cast<double>(q.rows()));
  Eigen::RowVectorXd u = birth_vector(kernel);
  Eigen::RowVectorXd next(u.size());
  std::int64_t current = 0;

  std::vector<std::pair<std::int64_t, double>> out(ages.size());
  for (std::size_t idx : order) {
    const std::int64_t age = ages[idx];
    if (age < 0) throw Error(Errc::InvalidArgument, "age must be >= 0");
    for (; current < age; ++current) {
      next.noalias() = u * q;
      u.swap(next);
    }
    const double survival = u.sum();
    check_survival(survival, age);
    out[idx] = {age, u.dot(levels.transpose()) / survival};
  }
  return out;
}

AgeGivenLevel age_distribution_given_level(const TransitionKernel &kernel, int level, std::int64_t horizon) {
  require_absorbing(kernel);
  const int top = kernel.max_level();
  if (level < 1 || level > top) {
    throw Error(Errc::InvalidArgument, "level must lie in 1.." + std::to_string(top));
  }
  if (horizon < 0) throw Error(Errc::InvalidArgument, "horizon must be >= 0");

  const Eigen::MatrixXd q = kernel.transient_block();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(top, top) - q;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu_t(a.transpose());
  if (!lu_t.isInvertible()) {
    throw Error(Errc::SingularSystem, "I - Q is singular");
  }
  // Green's row G = e_1 (I - Q)^-1 holds the expected occupancy per level;
  // sum_a a e_1 Q^a = G Q (I - Q)^-1 gives the exact age moment.
  const Eigen::RowVectorXd green = solve_left(lu_t, birth_vector(kernel));
  const Eigen::RowVectorXd age_moment = solve_left(lu_t, (green * q).eval());

  const auto col = static_cast<Eigen::Index>(level - 1);
  const double normalizer = green(col);
  if (!(normalizer >= kUnderflow)) {
    throw Error(Errc::DegenerateLevel, "level " + std::to_string(level) + " is never visited");
  }

  AgeGivenLevel result;
  result.level = level;
  result.expected_occupancy = normalizer;
  result.level_share = normalizer / green.sum();
  result.mean_age = age_moment(col) / normalizer;

  result.pmf.support_start = 0;
  result.pmf.masses.resize(static_cast<std::size_t>(horizon + 1));
  Eigen::RowVectorXd u = birth_vector(kernel);
  Eigen::RowVectorXd next(u.size());
  double stored = 0.0;
  for (std::int64_t age = 0; age <= horizon; ++age) {
    const double m = u(col) / normalizer;
    result.pmf.masses[static_cast<std::size_t>(age)] = m;
    stored += m;
    next.noalias() = u * q;
    u.swap(next);
  }
  result.pmf.tail_mass = std::max(0.0, 1.0 - stored);
  return result;
}

}  // namespace lexwalk::analytics
