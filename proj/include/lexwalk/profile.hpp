#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace lexwalk {

/// Expected word counts n_1..n_M of the polysemy zones. Level m holds the
/// words with exactly m meanings. Instances are only produced by
/// validate_profile(), so every ZoneProfile satisfies n_m >= 2.
class ZoneProfile {
public:
  int max_level() const noexcept { return static_cast<int>(occupancies_.size()); }

  /// 1-based: occupancy(1) is the monosemantic zone.
  double occupancy(int level) const { return occupancies_.at(static_cast<std::size_t>(level - 1)); }
  std::span<const double> occupancies() const noexcept { return occupancies_; }

  double total_words() const noexcept { return total_words_; }
  double total_meanings() const noexcept { return total_meanings_; }
  double mean_polysemy() const noexcept { return total_meanings_ / total_words_; }

private:
  friend ZoneProfile validate_profile(std::span<const double> raw);
  ZoneProfile() = default;

  std::vector<double> occupancies_;
  double total_words_ = 0.0;
  double total_meanings_ = 0.0;
};

ZoneProfile validate_profile(std::span<const double> raw);

enum class TopPolicy {
  FlowPreserving,  // at M: down 1/n_M, stay 1 - 1/n_M
  HardReflect,     // at M: down 2/n_M, stay 1 - 2/n_M
};

struct Absorbing {};

// Zone 0 holds n0 dormant words; a dormant word returns to level 1 with
// probability 1/n0 per tick.
struct FiniteRevival {
  double zone_zero_occupancy = 1.0;
};

using BottomPolicy = std::variant<Absorbing, FiniteRevival>;

struct BoundaryPolicy {
  TopPolicy top = TopPolicy::FlowPreserving;
  BottomPolicy bottom = Absorbing{};

  bool absorbing() const noexcept { return std::holds_alternative<Absorbing>(bottom); }
};

/// One-tick transition law over states 0..M, state 0 being "out of the
/// lexicon". Row-stochastic and tridiagonal.
class TransitionKernel {
public:
  TransitionKernel(ZoneProfile profile, BoundaryPolicy boundary, Eigen::MatrixXd matrix)
      : profile_(std::move(profile)), boundary_(boundary), matrix_(std::move(matrix)) {}

  const ZoneProfile &profile() const noexcept { return profile_; }
  const BoundaryPolicy &boundary() const noexcept { return boundary_; }
  const Eigen::MatrixXd &matrix() const noexcept { return matrix_; }
  int max_level() const noexcept { return profile_.max_level(); }

  double operator()(int from, int to) const { return matrix_(from, to); }

  /// Sub-stochastic block over the in-lexicon levels 1..M (row/col i is level i+1).
  Eigen::MatrixXd transient_block() const {
    const auto m = matrix_.rows() - 1;
    return matrix_.bottomRightCorner(m, m);
  }

private:
  ZoneProfile profile_;
  BoundaryPolicy boundary_;
  Eigen::MatrixXd matrix_;
};

TransitionKernel build_kernel(const ZoneProfile &profile, const BoundaryPolicy &boundary = {});

struct GeneratedProfile {
  ZoneProfile profile;
  double ratio = 0.0;           // n_{m+1} / n_m
  int requested_max_level = 0;  // profile.max_level() may be smaller
};

/// Truncated-geometric stand-in profile n_m = n_1 r^(m-1) with
/// sum n_m = N and sum m n_m = S. The top level is lowered until n_M >= 2.
GeneratedProfile generate_profile(double total_words, double total_meanings, int max_level);

}  // namespace lexwalk
