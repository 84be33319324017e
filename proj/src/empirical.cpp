#include "lexwalk/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "lexwalk/error.hpp"

namespace lexwalk::empirical {

EmpiricalAgeTable builtin_table(bool correct_20th_century) {
  const std::int64_t twentieth = correct_20th_century ? 35000 : 5979;
  EmpiricalAgeTable table;
  table.rows = {
      {"20th c.", 50.0, twentieth, static_cast<double>(twentieth)},
      {"19th c.", 150.0, 14375, 14375.0},
      {"18th c.", 250.0, 13758, 13758.0},
      {"15th-17th c.", 450.0, 8361, 2787.0},
      {"7th-14th c.", 1000.0, 5868, 733.0},
      {"Common Slavic", 1800.0, 3619, 450.0},
      {"Indo-European", std::nullopt, 174, std::nullopt},
  };
  return table;
}

EmpiricalMeanAge empirical_mean_age(const EmpiricalAgeTable &table) {
  double weighted = 0.0;
  EmpiricalMeanAge out;
  for (const auto &row : table.rows) {
    if (!row.mean_age_years) continue;
    weighted += *row.mean_age_years * static_cast<double>(row.word_count);
    out.total_words += row.word_count;
  }
  if (out.total_words == 0) {
    throw Error(Errc::NoDatedRows, "age table has no dated rows with words");
  }
  out.mean_years = weighted / static_cast<double>(out.total_words);
  return out;
}

TimeCalibration calibrate(double model_mean_age_ticks, double empirical_mean_age_years) {
  if (!(model_mean_age_ticks > 0.0) || !(empirical_mean_age_years > 0.0) || !std::isfinite(model_mean_age_ticks) ||
      !std::isfinite(empirical_mean_age_years)) {
    throw Error(Errc::NonPositiveInput, "calibration needs positive mean ages");
  }
  return {empirical_mean_age_years / model_mean_age_ticks, std::nullopt};
}

double warp_age(double historical_age_years, const Warp &warp) {
  if (historical_age_years < 0.0) {
    throw Error(Errc::InvalidArgument, "historical age must be >= 0");
  }
  const double ref = warp.reference_year;
  const double brk = warp.breakpoint_year;
  const double born = ref - historical_age_years;
  const double fast = std::max(0.0, ref - std::max(born, brk));
  const double slow = std::max(0.0, std::min(ref, brk) - born);
  return warp.rate_factor * fast + slow;
}

double warp_rate(double historical_age_years, const Warp &warp) {
  return warp.reference_year - historical_age_years >= warp.breakpoint_year ? warp.rate_factor : 1.0;
}

double warped_mean_age(const EmpiricalAgeTable &table, const Warp &warp) {
  double weighted = 0.0;
  std::int64_t total = 0;
  for (const auto &row : table.rows) {
    if (!row.mean_age_years) continue;
    weighted += warp_age(*row.mean_age_years, warp) * static_cast<double>(row.word_count);
    total += row.word_count;
  }
  if (total == 0) throw Error(Errc::NoDatedRows, "age table has no dated rows with words");
  return weighted / static_cast<double>(total);
}

namespace {

double interpolate(const DiscretePmf &pmf, double x) {
  const double base = std::floor(x);
  const auto i = static_cast<std::int64_t>(base);
  const double frac = x - base;
  return (1.0 - frac) * pmf.mass(i) + frac * pmf.mass(i + 1);
}

double trapezoid(const std::vector<double> &x, const std::vector<double> &y) {
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) area += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return area;
}

std::vector<double> average_ranks(const std::vector<double> &v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_correlation(const std::vector<double> &x, const std::vector<double> &y) {
  if (x.size() != y.size() || x.size() < 2) return 0.0;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

ComparisonReport compare_age_distribution(const DiscretePmf &model_age,
                                          const std::optional<TimeCalibration> &calibration,
                                          const EmpiricalAgeTable &table) {
  if (!calibration) {
    throw Error(Errc::CalibrationMissing, "model-vs-data comparison needs a tick-to-year calibration");
  }
  const double ypt = calibration->years_per_tick;
  if (!(ypt > 0.0)) throw Error(Errc::NonPositiveInput, "years per tick must be positive");

  ComparisonReport report;
  report.warped = calibration->warp.has_value();
  std::vector<double> ages, model, empirical;
  for (const auto &row : table.rows) {
    if (!row.mean_age_years || !row.words_per_century) continue;
    const double age = *row.mean_age_years;
    double linguistic = age;
    double jacobian = 1.0;
    if (calibration->warp) {
      linguistic = warp_age(age, *calibration->warp);
      jacobian = warp_rate(age, *calibration->warp);
    }
    ComparisonPoint p;
    p.period = row.period;
    p.age_years = age;
    p.raw_model = interpolate(model_age, linguistic / ypt) / ypt * jacobian;
    p.raw_empirical = *row.words_per_century;
    report.points.push_back(p);
    ages.push_back(age);
    model.push_back(p.raw_model);
    empirical.push_back(p.raw_empirical);
  }
  if (report.points.size() < 2) {
    throw Error(Errc::InvalidArgument, "comparison needs at least two dated rows with densities");
  }

  const double model_area = trapezoid(ages, model);
  const double empirical_area = trapezoid(ages, empirical);
  if (!(model_area > 0.0) || !(empirical_area > 0.0)) {
    throw Error(Errc::InvalidArgument, "a series has no mass over the dated age range");
  }
  std::vector<double> gap(ages.size());
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    auto &p = report.points[i];
    p.model_density = p.raw_model / model_area;
    p.empirical_density = p.raw_empirical / empirical_area;
    p.ratio = p.model_density / p.empirical_density;
    gap[i] = std::abs(p.model_density - p.empirical_density);
  }
  report.spearman = spearman_correlation(model, empirical);
  report.l1_distance = trapezoid(ages, gap);
  return report;
}

std::vector<PointContrast> warp_contrast(const ComparisonReport &plain, const ComparisonReport &warped) {
  std::vector<PointContrast> out;
  for (const auto &p : plain.points) {
    const auto it = std::find_if(warped.points.begin(), warped.points.end(),
                                 [&](const ComparisonPoint &w) { return w.period == p.period; });
    if (it == warped.points.end()) continue;
    PointContrast c;
    c.period = p.period;
    c.age_years = p.age_years;
    c.log_error_plain = std::abs(std::log(p.ratio));
    c.log_error_warped = std::abs(std::log(it->ratio));
    c.improved = c.log_error_warped < c.log_error_plain;
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Geometric mixture fit

namespace {

constexpr double kMinLogRate = -35.0;  // keeps q = exp(-exp(c)) strictly below 1
constexpr double kMaxLogRate = 5.0;
constexpr double kMaxLogit = 40.0;

double logistic(double a) { return 1.0 / (1.0 + std::exp(-a)); }
double ratio_of(double c) { return std::exp(-std::exp(c)); }

struct LmResult {
  Eigen::VectorXd params;
  double cost = 0.0;
  bool converged = false;
};

// Accumulator signature: cost(params, JtJ*, Jtr*) -> sum of squared residuals;
// the normal-equation pieces are filled when the pointers are non-null.
using Accumulator = std::function<double(const Eigen::VectorXd &, Eigen::MatrixXd *, Eigen::VectorXd *)>;

LmResult levenberg_marquardt(const Accumulator &accumulate, Eigen::VectorXd params,
                             const std::function<void(Eigen::VectorXd &)> &clamp, int max_iterations) {
  const auto n = params.size();
  Eigen::MatrixXd jtj(n, n);
  Eigen::VectorXd jtr(n);
  double cost = accumulate(params, &jtj, &jtr);
  double damping = 1e-3;
  LmResult result{params, cost, false};

  for (int it = 0; it < max_iterations; ++it) {
    bool accepted = false;
    while (damping < 1e12) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index i = 0; i < n; ++i) a(i, i) += damping * std::max(jtj(i, i), 1e-12);
      Eigen::VectorXd trial = params - a.ldlt().solve(jtr);
      clamp(trial);
      const double trial_cost = accumulate(trial, nullptr, nullptr);
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        const double drop = cost - trial_cost;
        const double step = (trial - params).norm();
        params = trial;
        cost = trial_cost;
        damping = std::max(damping / 3.0, 1e-12);
        accepted = true;
        if (drop <= 1e-14 * cost || drop <= 1e-30 || step <= 1e-12) {
          result = {params, cost, true};
          return result;
        }
        break;
      }
      damping *= 4.0;
    }
    if (!accepted) {
      // No descent direction left at any damping: a stationary point.
      return {params, cost, true};
    }
    cost = accumulate(params, &jtj, &jtr);
  }
  return {params, cost, false};
}

}  // namespace

GeometricMixtureFit fit_two_geometrics(const DiscretePmf &pmf, const FitOptions &options) {
  if (!(pmf.tail_mass < 1e-6)) {
    throw Error(Errc::HeavyTail, "fit needs a pmf whose tail beyond the horizon is below 1e-6");
  }
  const auto &p = pmf.masses;
  double norm2 = 0.0, mass = 0.0, first = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    norm2 += p[k] * p[k];
    mass += p[k];
    first += static_cast<double>(k + 1) * p[k];
  }
  if (!(norm2 > 0.0)) throw Error(Errc::InvalidArgument, "cannot fit an all-zero pmf");
  const double base_rate = mass / first;  // 1 / mean over k + 1
  const double scale = 1.0 / norm2;

  // params: (logit w, log rate_1, log rate_2)
  const Accumulator two = [&](const Eigen::VectorXd &th, Eigen::MatrixXd *jtj, Eigen::VectorXd *jtr) {
    const double w = logistic(th(0));
    const double r1 = std::exp(th(1)), r2 = std::exp(th(2));
    const double q1 = std::exp(-r1), q2 = std::exp(-r2);
    double pw1 = 1.0, pw2 = 1.0, cost = 0.0;
    Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double g1 = (1.0 - q1) * pw1;
      const double g2 = (1.0 - q2) * pw2;
      const double res = w * g1 + (1.0 - w) * g2 - p[k];
      cost += res * res;
      if (jtj != nullptr) {
        const double kk = static_cast<double>(k);
        Eigen::Vector3d j;
        j(0) = w * (1.0 - w) * (g1 - g2);
        j(1) = w * r1 * pw1 * (q1 - kk * (1.0 - q1));
        j(2) = (1.0 - w) * r2 * pw2 * (q2 - kk * (1.0 - q2));
        a.noalias() += j * j.transpose();
        g.noalias() += j * res;
      }
      pw1 *= q1;
      pw2 *= q2;
    }
    if (jtj != nullptr) {
      *jtj = a * scale;
      *jtr = g * scale;
    }
    return cost * scale;
  };
  const auto clamp_two = [](Eigen::VectorXd &th) {
    th(0) = std::clamp(th(0), -kMaxLogit, kMaxLogit);
    th(1) = std::clamp(th(1), kMinLogRate, kMaxLogRate);
    th(2) = std::clamp(th(2), kMinLogRate, kMaxLogRate);
  };

  const Accumulator one = [&](const Eigen::VectorXd &th, Eigen::MatrixXd *jtj, Eigen::VectorXd *jtr) {
    const double r = std::exp(th(0));
    const double q = std::exp(-r);
    double pw = 1.0, cost = 0.0, a = 0.0, g = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double res = (1.0 - q) * pw - p[k];
      cost += res * res;
      if (jtj != nullptr) {
        const double j = r * pw * (q - static_cast<double>(k) * (1.0 - q));
        a += j * j;
        g += j * res;
      }
      pw *= q;
    }
    if (jtj != nullptr) {
      (*jtj)(0, 0) = a * scale;
      (*jtr)(0) = g * scale;
    }
    return cost * scale;
  };
  const auto clamp_one = [](Eigen::VectorXd &th) { th(0) = std::clamp(th(0), kMinLogRate, kMaxLogRate); };

  constexpr std::array<double, 6> multipliers = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};

  GeometricMixtureFit fit;
  LmResult best_single{Eigen::VectorXd(), std::numeric_limits<double>::infinity(), false};
  for (double m : {0.5, 1.0, 2.0}) {
    Eigen::VectorXd th(1);
    th << std::log(m * base_rate);
    clamp_one(th);
    auto r = levenberg_marquardt(one, th, clamp_one, options.max_iterations);
    if (r.cost < best_single.cost) best_single = r;
  }

  LmResult best_two{Eigen::VectorXd(), std::numeric_limits<double>::infinity(), false};
  bool any_converged = best_single.converged;
  for (std::size_t i = 0; i < multipliers.size(); ++i) {
    for (std::size_t j = i + 1; j < multipliers.size(); ++j) {
      Eigen::VectorXd th(3);
      th << 0.0, std::log(multipliers[i] * base_rate), std::log(multipliers[j] * base_rate);
      clamp_two(th);
      auto r = levenberg_marquardt(two, th, clamp_two, options.max_iterations);
      ++fit.starts;
      any_converged = any_converged || r.converged;
      if (std::isfinite(r.cost) && r.cost < best_two.cost) best_two = r;
    }
  }
  if (!std::isfinite(best_two.cost) || !std::isfinite(best_single.cost)) {
    throw Error(Errc::NoConvergence, "no start of the geometric fit produced a finite residual");
  }

  fit.single_ratio = ratio_of(best_single.params(0));
  fit.single_residual = std::sqrt(best_single.cost);
  fit.residual = std::sqrt(best_two.cost);
  fit.converged = any_converged && best_two.converged;

  if (fit.single_residual <= fit.residual + 1e-9) {
    // Nested model: the second component adds nothing.
    fit.components = {GeometricComponent{1.0, fit.single_ratio}, GeometricComponent{0.0, fit.single_ratio}};
    fit.residual = fit.single_residual;
    fit.converged = best_single.converged;
    return fit;
  }

  const double w = logistic(best_two.params(0));
  GeometricComponent a{w, ratio_of(best_two.params(1))};
  GeometricComponent b{1.0 - w, ratio_of(best_two.params(2))};
  if (a.ratio < b.ratio) std::swap(a, b);
  fit.components = {a, b};
  return fit;
}

}  // namespace lexwalk::empirical
