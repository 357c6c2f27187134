#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ozd/directions.hpp"
#include "ozd/estimators.hpp"
#include "ozd/objective.hpp"
#include "ozd/rng.hpp"
#include "ozd/schedule.hpp"

namespace ozd {

/// Smallest smoothing parameter the optimizer will probe with.
inline constexpr double kMinSmoothing = 1e-12;

/// Iterate plus the running alpha-weighted sum behind the averaged iterate.
struct OzdState {
  std::int64_t k = 0;
  Vec x;
  Vec weighted_sum;
  double weight_total = 0.0;
  std::int64_t eval_count = 0;

  explicit OzdState(Vec x0 = {});

  /// Folds alpha * point into the running average.
  void accumulate(double alpha, const Vec& point);
};

/// sum_i alpha_i x_i / A_k.  Throws StateError before the first step.
Vec averaged_iterate(const OzdState& state);

struct RunOptions {
  SurrogateKind estimator = SurrogateKind::CentralOrthogonal;
  Eigen::Index l = 1;
  DirectionGenerator generator;
  std::int64_t budget = 0;  // objective evaluations
  bool record_iterates = false;
};

struct TraceMetadata {
  std::string objective;
  Eigen::Index dim = 0;
  Eigen::Index l = 0;
  std::string schedule;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string estimator;
  std::string generator;
  std::int64_t budget = 0;
  bool gap_relative_to_minimum = false;
  bool h_clamped = false;
};

struct IterationRecord {
  std::int64_t k = 0;
  std::int64_t first_eval = 0;
  double alpha = 0.0;
  double h = 0.0;
  double gap = 0.0;
  /// f(xbar_k) - f_star, present when f_star is known.
  std::optional<double> average_gap;
};

struct RunTrace {
  TraceMetadata meta;
  /// One entry per objective evaluation: the current iterate's gap, repeated
  /// evals-per-iteration times.
  std::vector<double> gap;
  std::vector<IterationRecord> iterations;
  /// x_0 .. x_{K-1} when RunOptions::record_iterates is set.
  std::vector<Vec> iterates;
  OzdState state;
  double final_gap = 0.0;
  std::optional<double> final_average_gap;

  std::vector<double> alphas() const;
};

/// Orthogonal zeroth-order descent: x_{k+1} = x_k - alpha_k g_(G_k, h_k)(x_k) with
/// a fresh direction matrix per iteration, until the evaluation budget is spent.
RunTrace run_ozd(const Objective& f, const Vec& x0, const Schedule& schedule,
                 const RunOptions& options, RngStream rng);

enum class BaselineKind { Gaussian, Spherical };

/// Same iteration with i.i.d. Gaussian or spherical probe directions.
RunTrace run_baseline(const Objective& f, const Vec& x0, const Schedule& schedule,
                      Eigen::Index l, BaselineKind kind, std::int64_t budget, RngStream rng,
                      bool record_iterates = false);

}  // namespace ozd
