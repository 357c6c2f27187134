#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace ozd {

enum class ScheduleKind {
  Power,                      // alpha (k+1)^-theta, h (k+1)^-rho; theta in (1/2, 1), theta + rho > 1
  Constant,                   // alpha, h (k+1)^-rho; no convergence claim
  NonsmoothConvexOptimal,     // constant step tuned to a horizon K (convex, Lipschitz)
  NonsmoothNonconvexOptimal,  // constant step tuned to a horizon K (non-convex, Lipschitz)
  SmoothCapped,               // alpha < l/(d L1), h (k+1)^-theta with theta > 1
};

std::string to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(const std::string& text);

/// Inputs to make_schedule.  Which fields are read depends on the kind; the
/// preset kinds derive `alpha` from the problem quantities below.
struct ScheduleParams {
  double alpha = 1.0;
  double theta = 0.0;
  double h = 1.0;
  double rho = 0.0;
  double c = 1.0;
  std::optional<std::int64_t> horizon;

  Eigen::Index dim = 0;
  Eigen::Index l = 0;
  std::optional<double> L0;
  std::optional<double> L1;
  /// ||x0 - x*|| for the convex preset.
  std::optional<double> initial_distance;
  /// f_h(x0) - min f for the non-convex preset.
  std::optional<double> initial_gap;
  /// Target accuracy epsilon; when set the presets also check h and K against it.
  std::optional<double> accuracy;
};

class Schedule {
 public:
  /// Validates the kind's inequalities and throws ConfigError naming the
  /// first one that fails.
  static Schedule make(ScheduleKind kind, const ScheduleParams& params);

  ScheduleKind kind() const { return kind_; }
  const ScheduleParams& params() const { return params_; }

  double alpha(std::int64_t k) const;
  double h(std::int64_t k) const;

  /// Exponent of h_k = h (k+1)^-exponent.
  double smoothing_exponent() const;

  std::string describe() const;

 private:
  Schedule(ScheduleKind kind, ScheduleParams params) : kind_(kind), params_(std::move(params)) {}

  ScheduleKind kind_;
  ScheduleParams params_;
};

}  // namespace ozd
