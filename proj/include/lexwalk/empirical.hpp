#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lexwalk/pmf.hpp"

namespace lexwalk::empirical {

struct AgeRow {
  std::string period;
  std::optional<double> mean_age_years;
  std::int64_t word_count = 0;
  std::optional<double> words_per_century;
};

/// Surviving Russian words by the period in which they entered the language.
struct EmpiricalAgeTable {
  std::vector<AgeRow> rows;
};

/// `correct_20th_century` replaces the under-registered 20th-century count
/// (5979) by 35000.
EmpiricalAgeTable builtin_table(bool correct_20th_century);

struct EmpiricalMeanAge {
  double mean_years = 0.0;
  std::int64_t total_words = 0;
};

/// Count-weighted mean over the rows with a known age; undated rows are ignored.
EmpiricalMeanAge empirical_mean_age(const EmpiricalAgeTable &table);

/// Piecewise-linear time warp: calendar years on or after `breakpoint_year`
/// count `rate_factor` times.
struct Warp {
  int breakpoint_year = 1700;
  double rate_factor = 3.0;
  int reference_year = 2000;
};

struct TimeCalibration {
  double years_per_tick = 1.0;
  std::optional<Warp> warp;
};

TimeCalibration calibrate(double model_mean_age_ticks, double empirical_mean_age_years);

/// Linguistic age of a word born `historical_age_years` before the reference year.
double warp_age(double historical_age_years, const Warp &warp);

/// d(linguistic age) / d(historical age).
double warp_rate(double historical_age_years, const Warp &warp);

/// Count-weighted mean of the warped ages of the dated rows.
double warped_mean_age(const EmpiricalAgeTable &table, const Warp &warp);

struct ComparisonPoint {
  std::string period;
  double age_years = 0.0;
  double model_density = 0.0;      // unit area over the common range
  double empirical_density = 0.0;  // unit area over the common range
  double ratio = 0.0;              // model / empirical
  double raw_model = 0.0;          // model probability per calendar year
  double raw_empirical = 0.0;      // words per century
};

struct ComparisonReport {
  std::vector<ComparisonPoint> points;
  double spearman = 0.0;
  double l1_distance = 0.0;  // trapezoid integral of |model - empirical|, in [0, 2]
  bool warped = false;
};

/// Evaluates the model age pmf (in ticks) at each dated row through the
/// calibration and, when present, its warp. Throws CalibrationMissing when
/// `calibration` is empty.
ComparisonReport compare_age_distribution(const DiscretePmf &model_age,
                                          const std::optional<TimeCalibration> &calibration,
                                          const EmpiricalAgeTable &table);

struct PointContrast {
  std::string period;
  double age_years = 0.0;
  double log_error_plain = 0.0;   // |ln ratio| without warp
  double log_error_warped = 0.0;  // |ln ratio| with warp
  bool improved = false;
};

std::vector<PointContrast> warp_contrast(const ComparisonReport &plain, const ComparisonReport &warped);

double spearman_correlation(const std::vector<double> &x, const std::vector<double> &y);

struct GeometricComponent {
  double weight = 0.0;
  double ratio = 0.0;  // q: per-tick survival within the component
};

struct GeometricMixtureFit {
  std::array<GeometricComponent, 2> components;  // slower decay first
  double residual = 0.0;                         // relative L2 error of the mixture
  double single_ratio = 0.0;                     // best single geometric
  double single_residual = 0.0;
  bool converged = false;
  int starts = 0;
};

struct FitOptions {
  int max_iterations = 200;
};

/// Least-squares fit of w1 (1-q1) q1^k + w2 (1-q2) q2^k, k = t - support_start,
/// with w1 + w2 = 1, minimizing the relative L2 error. Levenberg-Marquardt
/// runs from every pair of starting decay rates {1/4,1/2,1,2,4,8} / mean with
/// w = 1/2; the best end point wins. When a single geometric fits as well,
/// the result degenerates to weights (1, 0).
GeometricMixtureFit fit_two_geometrics(const DiscretePmf &pmf, const FitOptions &options = {});

}  // namespace lexwalk::empirical
