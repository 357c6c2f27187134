#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "ozd/rng.hpp"

namespace ozd {

using Vec = Eigen::VectorXd;

/// Black-box objective plus the metadata schedules and checks rely on.
/// Immutable after construction; copies share the underlying callable.
struct Objective {
  std::string name;
  Eigen::Index dim = 0;
  std::function<double(const Vec&)> eval;
  /// Analytic gradient when known (only used by oracles, never by optimizers).
  std::function<Vec(const Vec&)> gradient;
  std::optional<double> L0;
  std::optional<double> L1;
  std::optional<double> f_star;
  std::optional<Vec> x_star;
  bool convex = true;
  bool thread_safe = true;

  double operator()(const Vec& x) const { return eval(x); }
  bool has_gradient() const { return static_cast<bool>(gradient); }
};

/// f(x) = 1/2 ||A x||^2 with L1 = lambda_max(A^T A) from power iteration.
Objective make_quadratic(Eigen::MatrixXd a);
/// As above with A_ij ~ N(0, 1) drawn from `rng` row-major.
Objective make_quadratic(Eigen::Index d, RngStream rng);

/// f(x) = ||x - v||_1 with v = (0, 1, ..., d-1).
Objective make_shifted_l1(Eigen::Index d);

/// f(x) = <c, x> + b.  Unbounded below, so no f_star.
Objective make_affine(Vec c, double b = 0.0);

/// f(x) = 1/2 ||x||^2.
Objective make_half_squared_norm(Eigen::Index d);

/// Parameters for the extended zoo.  Unset fields take the usual defaults:
/// huber delta 0.5, elastic-net alpha = beta = 0.5, group lasso 3 groups of 3.
struct ZooParams {
  double huber_delta = 0.5;
  double elastic_alpha = 0.5;
  double elastic_beta = 0.5;
  int group_count = 3;
  int group_size = 3;
};

/// Names: sparse-group-lasso, huber, elastic-net, l1, inf-norm, total-variation.
Objective make_table3_objective(const std::string& name, Eigen::Index d,
                                const ZooParams& params = {});

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.  Stops
/// when ||M v - lambda v|| <= tol * lambda; throws ConfigError otherwise.
double power_iteration(const Eigen::MatrixXd& m, double tol = 1e-10, int max_iterations = 10000);

}  // namespace ozd
