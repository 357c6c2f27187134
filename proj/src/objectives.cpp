#include "ozd/objective.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ozd/errors.hpp"

namespace ozd {

double power_iteration(const Eigen::MatrixXd& m, double tol, int max_iterations) {
  const Eigen::Index n = m.rows();
  if (n == 0 || m.cols() != n) throw ConfigError("power iteration needs a square matrix");
  // Non-uniform start so it is unlikely to be orthogonal to the top eigenvector.
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i) / n;
  v.normalize();
  for (int it = 0; it < max_iterations; ++it) {
    const Vec mv = m * v;
    const double lambda = v.dot(mv);
    if (lambda <= 0.0) {
      if (mv.norm() == 0.0) return 0.0;
    } else if ((mv - lambda * v).norm() <= tol * lambda) {
      return lambda;
    }
    v = mv.normalized();
  }
  throw ConfigError(
      fmt::format("power iteration did not converge in {} iterations", max_iterations));
}

Objective make_quadratic(Eigen::MatrixXd a) {
  if (a.rows() != a.cols() || a.rows() < 1) throw ConfigError("quadratic needs a square A");
  const Eigen::Index d = a.rows();
  auto shared = std::make_shared<const Eigen::MatrixXd>(std::move(a));
  const Eigen::MatrixXd ata = shared->transpose() * *shared;
  auto gram = std::make_shared<const Eigen::MatrixXd>(ata);

  Objective f;
  f.name = "quadratic";
  f.dim = d;
  f.eval = [shared](const Vec& x) { return 0.5 * (*shared * x).squaredNorm(); };
  f.gradient = [gram](const Vec& x) -> Vec { return *gram * x; };
  f.L1 = power_iteration(ata);
  f.f_star = 0.0;
  f.x_star = Vec::Zero(d);
  return f;
}

Objective make_quadratic(Eigen::Index d, RngStream rng) {
  if (d < 1) throw ConfigError("dimension must be >= 1");
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = rng.normal();
  return make_quadratic(std::move(a));
}

Objective make_shifted_l1(Eigen::Index d) {
  if (d < 1) throw ConfigError("dimension must be >= 1");
  Vec shift = Vec::LinSpaced(d, 0.0, static_cast<double>(d - 1));
  Objective f;
  f.name = "shifted-l1";
  f.dim = d;
  f.eval = [shift](const Vec& x) { return (x - shift).lpNorm<1>(); };
  f.L0 = std::sqrt(static_cast<double>(d));
  f.f_star = 0.0;
  f.x_star = shift;
  return f;
}

Objective make_affine(Vec c, double b) {
  Objective f;
  f.name = "affine";
  f.dim = c.size();
  f.L0 = c.norm();
  f.L1 = 0.0;
  f.eval = [c, b](const Vec& x) { return c.dot(x) + b; };
  f.gradient = [c](const Vec&) { return c; };
  return f;
}

Objective make_half_squared_norm(Eigen::Index d) {
  Objective f;
  f.name = "half-squared-norm";
  f.dim = d;
  f.eval = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
  f.gradient = [](const Vec& x) { return x; };
  f.L1 = 1.0;
  f.f_star = 0.0;
  f.x_star = Vec::Zero(d);
  return f;
}

namespace {

Objective norm_like(std::string name, Eigen::Index d, std::function<double(const Vec&)> eval) {
  Objective f;
  f.name = std::move(name);
  f.dim = d;
  f.eval = std::move(eval);
  f.f_star = 0.0;
  f.x_star = Vec::Zero(d);
  return f;
}

}  // namespace

Objective make_table3_objective(const std::string& name, Eigen::Index d, const ZooParams& p) {
  if (d < 1) throw ConfigError("dimension must be >= 1");
  if (name == "l1") {
    Objective f = norm_like(name, d, [](const Vec& x) { return x.lpNorm<1>(); });
    f.L0 = std::sqrt(static_cast<double>(d));
    return f;
  }
  if (name == "inf-norm") {
    Objective f = norm_like(name, d, [](const Vec& x) { return x.lpNorm<Eigen::Infinity>(); });
    f.L0 = 1.0;
    return f;
  }
  if (name == "total-variation") {
    if (d < 2) throw ConfigError("total-variation needs d >= 2");
    Objective f = norm_like(name, d, [](const Vec& x) {
      const Eigen::Index n = x.size();
      return (x.tail(n - 1) - x.head(n - 1)).lpNorm<1>();
    });
    f.L0 = 2.0 * std::sqrt(static_cast<double>(d - 1));
    return f;
  }
  if (name == "huber") {
    if (!(p.huber_delta > 0.0)) throw ConfigError("huber delta must be > 0");
    const double delta = p.huber_delta;
    Objective f = norm_like(name, d, [delta](const Vec& x) {
      const double r = x.norm();
      return r <= delta ? 0.5 * r * r : delta * r - 0.5 * delta * delta;
    });
    f.gradient = [delta](const Vec& x) -> Vec {
      const double r = x.norm();
      return r <= delta ? Vec(x) : Vec(delta * x / r);
    };
    f.L0 = delta;
    f.L1 = 1.0;
    return f;
  }
  if (name == "elastic-net") {
    const double alpha = p.elastic_alpha;
    const double beta = p.elastic_beta;
    if (alpha < 0.0 || beta < 0.0) throw ConfigError("elastic-net weights must be >= 0");
    return norm_like(name, d, [alpha, beta](const Vec& x) {
      return alpha * x.lpNorm<1>() + 0.5 * beta * x.squaredNorm();
    });
  }
  if (name == "sparse-group-lasso") {
    if (p.group_count < 1 || p.group_size < 1) throw ConfigError("group lasso needs groups");
    const Eigen::Index count = p.group_count;
    const Eigen::Index size = p.group_size;
    Objective f = norm_like(name, d, [count, size](const Vec& x) {
      double total = 0.0;
      for (Eigen::Index g = 0; g < count; ++g) {
        const Eigen::Index begin = g * size;
        if (begin >= x.size()) break;
        total += x.segment(begin, std::min(size, x.size() - begin)).norm();
      }
      return total;
    });
    // sum_g ||x_g|| <= sqrt(#nonempty groups) ||x||
    const Eigen::Index nonempty = std::min(count, (d + size - 1) / size);
    f.L0 = std::sqrt(static_cast<double>(nonempty));
    return f;
  }
  throw ConfigError(fmt::format("unknown objective '{}'", name));
}

}  // namespace ozd
