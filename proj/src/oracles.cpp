#include "ozd/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ozd/errors.hpp"

namespace ozd {

namespace {

struct Accumulator {
  std::int64_t n = 0;
  Vec mean;
  Vec m2;

  explicit Accumulator(Eigen::Index width) : mean(Vec::Zero(width)), m2(Vec::Zero(width)) {}

  void push(const Vec& y) {
    ++n;
    const Vec delta = y - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta.cwiseProduct(y - mean);
  }

  void merge(const Accumulator& other) {
    if (other.n == 0) return;
    if (n == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(other.n);
    const double total = na + nb;
    const Vec delta = other.mean - mean;
    mean += delta * (nb / total);
    m2 += other.m2 + delta.cwiseProduct(delta) * (na * nb / total);
    n += other.n;
  }
};

MonteCarloMoments finish(const Accumulator& acc) {
  MonteCarloMoments out;
  out.samples = acc.n;
  out.mean = acc.mean;
  if (acc.n >= 2) {
    const double n = static_cast<double>(acc.n);
    out.standard_error = (acc.m2 / (n - 1.0) / n).cwiseSqrt();
  } else {
    out.standard_error = Vec::Zero(acc.mean.size());
  }
  return out;
}

Execution effective(const Objective& f, Execution exec) {
  return f.thread_safe ? exec : Execution::Serial;
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

void check_samples(std::int64_t samples) {
  if (samples < 2) throw DomainError("Monte-Carlo estimates need at least 2 samples");
}

void check_h(double h) {
  if (!(h > 0.0)) throw DomainError(fmt::format("h must be > 0, got {}", h));
}

}  // namespace

double MonteCarloMoments::norm_standard_error() const { return standard_error.norm(); }

MonteCarloMoments monte_carlo_mean(std::int64_t samples, Eigen::Index width,
                                   const RngStream& rng, const SampleFn& sample, Execution exec) {
  if (exec == Execution::Serial) {
    Accumulator acc(width);
    Vec y(width);
    for (std::int64_t j = 0; j < samples; ++j) {
      RngStream stream = rng.split(static_cast<std::uint64_t>(j));
      y.setZero();
      sample(j, stream, y);
      acc.push(y);
    }
    return finish(acc);
  }

  const std::int64_t blocks = (samples + kMonteCarloBlock - 1) / kMonteCarloBlock;
  std::vector<Accumulator> partial(static_cast<std::size_t>(blocks), Accumulator(width));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t b = 0; b < blocks; ++b) {
    Accumulator& acc = partial[static_cast<std::size_t>(b)];
    Vec y(width);
    const std::int64_t end = std::min(samples, (b + 1) * kMonteCarloBlock);
    for (std::int64_t j = b * kMonteCarloBlock; j < end; ++j) {
      RngStream stream = rng.split(static_cast<std::uint64_t>(j));
      y.setZero();
      sample(j, stream, y);
      acc.push(y);
    }
  }
  Accumulator total(width);
  for (const Accumulator& acc : partial) total.merge(acc);
  return finish(total);
}

OracleReport mc_smoothed_value(const Objective& f, const Vec& x, double h, std::int64_t samples,
                               const RngStream& rng, Execution exec) {
  check_h(h);
  check_samples(samples);
  const Eigen::Index d = x.size();
  const auto m = monte_carlo_mean(
      samples, 1, rng,
      [&](std::int64_t, RngStream& s, Eigen::Ref<Vec> out) {
        out[0] = f.eval(x + h * s.unit_ball(d));
      },
      effective(f, exec));
  OracleReport r;
  r.name = "smoothed-value";
  r.estimate = to_std(m.mean);
  r.standard_error = to_std(m.standard_error);
  r.samples = m.samples;
  r.passed = std::isfinite(m.mean[0]);
  return r;
}

OracleReport mc_smoothed_grad(const Objective& f, const Vec& x, double h, std::int64_t samples,
                              const RngStream& rng, GradientBaseline baseline, Execution exec) {
  check_h(h);
  check_samples(samples);
  const Eigen::Index d = x.size();
  const double offset = baseline == GradientBaseline::Center ? f.eval(x) : 0.0;
  const double scale = static_cast<double>(d) / h;
  const auto m = monte_carlo_mean(
      samples, d, rng,
      [&](std::int64_t, RngStream& s, Eigen::Ref<Vec> out) {
        const Vec v = s.unit_sphere(d);
        out = (scale * (f.eval(x + h * v) - offset)) * v;
      },
      effective(f, exec));
  OracleReport r;
  r.name = "smoothed-gradient";
  r.estimate = to_std(m.mean);
  r.standard_error = to_std(m.standard_error);
  r.samples = m.samples;
  r.passed = m.mean.allFinite();
  return r;
}

MonteCarloMoments surrogate_moments(const Objective& f, const Vec& x, const SurrogateSpec& spec,
                                    const DirectionGenerator& gen, std::int64_t samples,
                                    const RngStream& rng, Execution exec) {
  check_samples(samples);
  spec.validate(x.size());
  return monte_carlo_mean(
      samples, x.size(), rng,
      [&](std::int64_t, RngStream& s, Eigen::Ref<Vec> out) {
        out = estimate_gradient(f, x, spec, gen, s).vector;
      },
      effective(f, exec));
}

MonteCarloMoments surrogate_second_moment(const Objective& f, const Vec& x,
                                          const SurrogateSpec& spec,
                                          const DirectionGenerator& gen, std::int64_t samples,
                                          const RngStream& rng, Execution exec) {
  check_samples(samples);
  spec.validate(x.size());
  return monte_carlo_mean(
      samples, 1, rng,
      [&](std::int64_t, RngStream& s, Eigen::Ref<Vec> out) {
        out[0] = estimate_gradient(f, x, spec, gen, s).vector.squaredNorm();
      },
      effective(f, exec));
}

OracleReport verify_smoothing_lemma(const Objective& f, const Vec& x, double h, Eigen::Index l,
                                    std::int64_t samples, const RngStream& rng,
                                    SurrogateKind kind, Execution exec) {
  if (!is_orthogonal(kind)) throw DomainError("smoothing lemma applies to orthogonal estimators");
  const SurrogateSpec spec{kind, l, h};
  const auto lhs = surrogate_moments(f, x, spec, DirectionGenerator{GeneratorKind::Qr, 1},
                                     samples, rng.split(0), exec);
  const auto rhs = mc_smoothed_grad(f, x, h, samples, rng.split(1), GradientBaseline::Center, exec);

  constexpr double kSigmas = 4.0;
  constexpr double kAbsoluteFloor = 1e-10;
  OracleReport r;
  r.name = fmt::format("smoothing-lemma[{}, l={}]", to_string(kind), l);
  r.samples = samples;
  r.tolerance = kSigmas;
  r.passed = true;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double se = std::hypot(lhs.standard_error[i], rhs.standard_error[static_cast<std::size_t>(i)]);
    const double diff = std::abs(lhs.mean[i] - rhs.estimate[static_cast<std::size_t>(i)]);
    r.estimate.push_back(lhs.mean[i]);
    r.standard_error.push_back(se);
    if (diff > kSigmas * se + kAbsoluteFloor) r.passed = false;
    if (se > 0.0) worst = std::max(worst, diff / se);
  }
  r.detail = fmt::format("max |E[g] - grad f_h| / SE = {:.3f}", worst);
  return r;
}

OracleReport verify_variance_bound(const Objective& f, const Vec& x, double h, Eigen::Index l,
                                   std::int64_t samples, const RngStream& rng, VarianceKind kind,
                                   Execution exec) {
  const Eigen::Index d = x.size();
  const double dd = static_cast<double>(d);
  const double ll = static_cast<double>(l);
  if (kind == VarianceKind::Lipschitz && !f.L0)
    throw ConfigError(fmt::format("objective '{}' has no L0", f.name));
  if (kind == VarianceKind::Smooth && (!f.L1 || !f.has_gradient()))
    throw ConfigError(fmt::format("objective '{}' needs L1 and a gradient", f.name));

  const SurrogateSpec spec{SurrogateKind::CentralOrthogonal, l, h};
  const auto m = surrogate_second_moment(f, x, spec, DirectionGenerator{}, samples, rng, exec);
  const double second = m.mean[0];
  const double se = m.standard_error[0];

  OracleReport r;
  r.samples = samples;
  r.standard_error = {se};
  if (kind == VarianceKind::Lipschitz) {
    const double c_hat = second * ll / (2.0 * dd * *f.L0 * *f.L0);
    r.name = fmt::format("variance-lipschitz[d={}, l={}]", d, l);
    r.estimate = {second, c_hat};
    r.passed = std::isfinite(c_hat);
    r.detail = fmt::format("E||g||^2 = {:.6g}, c_hat = {:.6g}", second, c_hat);
  } else {
    const double l1 = *f.L1;
    const double bound =
        2.0 * dd / ll * f.gradient(x).squaredNorm() + l1 * l1 * dd * dd / (2.0 * ll) * h * h;
    r.name = fmt::format("variance-smooth[d={}, l={}]", d, l);
    r.estimate = {second, bound};
    r.tolerance = 4.0;
    r.passed = second <= bound + 4.0 * se;
    r.detail = fmt::format("E||g||^2 = {:.6g} <= bound {:.6g} + 4 SE ({:.3g})", second, bound, se);
  }
  return r;
}

OracleReport verify_variance_scaling(const std::function<Objective(Eigen::Index)>& make,
                                     std::span<const Eigen::Index> dims, double h,
                                     std::int64_t samples, const RngStream& rng, Execution exec) {
  OracleReport r;
  r.name = "variance-constant";
  r.samples = samples;
  r.tolerance = 3.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const Eigen::Index d : dims) {
    const Objective f = make(d);
    RngStream point_rng = rng.split(static_cast<std::uint64_t>(d)).split(0);
    const Vec x = f.x_star.value_or(Vec::Zero(d)) + point_rng.normal_vector(d);
    const auto sub = verify_variance_bound(f, x, h, 1, samples,
                                           rng.split(static_cast<std::uint64_t>(d)).split(1),
                                           VarianceKind::Lipschitz, exec);
    const double c_hat = sub.estimate[1];
    r.estimate.push_back(c_hat);
    r.standard_error.push_back(sub.standard_error[0] / sub.estimate[0] * c_hat);
    lo = std::min(lo, c_hat);
    hi = std::max(hi, c_hat);
    r.detail += fmt::format("{}d={}: c_hat={:.4f}", r.detail.empty() ? "" : ", ", d, c_hat);
  }
  r.passed = lo > 0.0 && hi / lo <= r.tolerance;
  r.detail += fmt::format("; max/min = {:.3f}", hi / lo);
  return r;
}

OracleReport variance_ratio(const Objective& f, const Vec& x, double h, std::int64_t samples,
                            const RngStream& rng, Execution exec) {
  const Eigen::Index d = x.size();
  const DirectionGenerator qr{};
  const auto single = surrogate_second_moment(
      f, x, {SurrogateKind::CentralOrthogonal, 1, h}, qr, samples, rng.split(0), exec);
  const auto full = surrogate_second_moment(
      f, x, {SurrogateKind::CentralOrthogonal, d, h}, qr, samples, rng.split(1), exec);
  const double ratio = single.mean[0] / full.mean[0];
  const double rel = std::hypot(single.standard_error[0] / single.mean[0],
                                full.standard_error[0] / full.mean[0]);
  OracleReport r;
  r.name = fmt::format("variance-scaling[d={}]", d);
  r.estimate = {ratio};
  r.standard_error = {ratio * rel};
  r.samples = samples;
  const double dd = static_cast<double>(d);
  r.passed = ratio >= dd / 2.0 && ratio <= 2.0 * dd;
  r.detail = fmt::format("E||g||^2(l=1) / E||g||^2(l=d) = {:.4f}, required in [{}, {}]", ratio,
                         dd / 2.0, 2.0 * dd);
  return r;
}

namespace {

double debiased_square_norm(const Objective& f, const Vec& x, double h, std::int64_t samples,
                            const RngStream& rng, Execution exec) {
  const auto g = mc_smoothed_grad(f, x, h, samples, rng, GradientBaseline::Center, exec);
  double norm2 = 0.0;
  double variance_trace = 0.0;
  for (std::size_t i = 0; i < g.estimate.size(); ++i) {
    norm2 += g.estimate[i] * g.estimate[i];
    variance_trace += g.standard_error[i] * g.standard_error[i];
  }
  return std::max(0.0, norm2 - variance_trace);
}

}  // namespace

EtaMetric eta_metrics(std::span<const Vec> iterates, std::span<const double> alphas,
                      const Objective& f, double h, EtaKind kind, std::int64_t mc_samples,
                      const RngStream& rng, Execution exec) {
  if (iterates.size() != alphas.size()) throw DomainError("iterates and alphas must pair up");
  if (kind == EtaKind::Exact && !f.has_gradient())
    throw ConfigError(fmt::format("exact eta needs an analytic gradient for '{}'", f.name));
  if (kind == EtaKind::Smoothed) {
    check_h(h);
    check_samples(mc_samples);
  }
  const auto n = static_cast<std::int64_t>(iterates.size());
  std::vector<double> q(iterates.size());
  const bool parallel = effective(f, exec) == Execution::Parallel;
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    const Vec& x = iterates[static_cast<std::size_t>(i)];
    q[static_cast<std::size_t>(i)] =
        kind == EtaKind::Exact
            ? f.gradient(x).squaredNorm()
            : debiased_square_norm(f, x, h, mc_samples, rng.split(static_cast<std::uint64_t>(i)),
                                   Execution::Serial);
  }
  EtaMetric eta;
  eta.kind = kind;
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!(alphas[i] > 0.0)) throw DomainError("step sizes must be positive");
    weighted += alphas[i] * q[i];
    total += alphas[i];
    eta.values.push_back(weighted / total);
    eta.weight_totals.push_back(total);
  }
  return eta;
}

GoldsteinSampler::GoldsteinSampler(std::span<const double> weights) {
  if (weights.empty()) throw DomainError("index sampler needs K >= 1 weights");
  double total = 0.0;
  cumulative_.reserve(weights.size());
  for (const double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw DomainError(fmt::format("index sampler weights must be positive, got {}", w));
    total += w;
    cumulative_.push_back(total);
  }
}

std::size_t GoldsteinSampler::operator()(RngStream& rng) const {
  const double target = rng.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  return std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
}

double GoldsteinSampler::probability(std::size_t i) const {
  const double below = i == 0 ? 0.0 : cumulative_[i - 1];
  return (cumulative_[i] - below) / cumulative_.back();
}

std::size_t goldstein_sample_index(std::span<const double> weights, RngStream& rng) {
  return GoldsteinSampler(weights)(rng);
}

OracleReport goldstein_stationarity(std::span<const Vec> iterates, std::span<const double> alphas,
                                    const Objective& f, double h, int draws,
                                    std::int64_t mc_samples, const RngStream& rng,
                                    Execution exec) {
  if (iterates.size() != alphas.size()) throw DomainError("iterates and alphas must pair up");
  if (draws < 1) throw DomainError("need at least one index draw");
  const GoldsteinSampler sampler(alphas);
  RngStream index_rng = rng.split(0);
  std::vector<double> values;
  for (int t = 0; t < draws; ++t) {
    const std::size_t index = sampler(index_rng);
    values.push_back(debiased_square_norm(f, iterates[index], h, mc_samples,
                                          rng.split(1).split(static_cast<std::uint64_t>(t)),
                                          effective(f, exec)));
  }
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (const double v : values) var += (v - mean) * (v - mean);
  const double se =
      values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1) / values.size())
                        : 0.0;
  OracleReport r;
  r.name = fmt::format("goldstein[K={}]", iterates.size());
  r.estimate = {mean};
  r.standard_error = {se};
  r.samples = mc_samples;
  r.passed = std::isfinite(mean);
  r.detail = fmt::format("E_I ||grad f_h(x_I)||^2 ~ {:.6g} over {} draws", mean, draws);
  return r;
}

OracleReport verify_smoothing_properties(const Objective& f, double h, int points,
                                         std::int64_t samples, const RngStream& rng,
                                         double scale, Execution exec) {
  check_h(h);
  if (points < 1) throw DomainError("need at least one test point");
  const Eigen::Index d = f.dim;
  const double dd = static_cast<double>(d);
  const Vec center = f.x_star.value_or(Vec::Zero(d));
  const bool smooth = f.L1.has_value();
  const bool gradient_check = smooth && f.has_gradient();

  // Worst (lhs - rhs) / SE for each applicable inequality; <= 4 passes.
  double convex_worst = -std::numeric_limits<double>::infinity();
  double lipschitz_worst = convex_worst;
  double smooth_value_worst = convex_worst;
  double smooth_grad_worst = convex_worst;
  auto ratio = [](double excess, double se) {
    if (se > 0.0) return excess / se;
    return excess <= 1e-12 ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
  };

  for (int p = 0; p < points; ++p) {
    const RngStream base = rng.split(static_cast<std::uint64_t>(p));
    RngStream point_rng = base.split(0);
    const Vec x = center + scale * point_rng.normal_vector(d);
    const double fx = f.eval(x);
    const auto fh = mc_smoothed_value(f, x, h, samples, base.split(1), exec);
    const double value = fh.estimate[0];
    const double se = fh.standard_error[0];
    if (f.convex) convex_worst = std::max(convex_worst, ratio(fx - value, se));
    if (f.L0) lipschitz_worst = std::max(lipschitz_worst, ratio(value - fx - *f.L0 * h, se));
    if (smooth)
      smooth_value_worst = std::max(smooth_value_worst, ratio(value - fx - 0.5 * *f.L1 * h * h, se));
    if (gradient_check) {
      const auto g = mc_smoothed_grad(f, x, h, samples, base.split(2), GradientBaseline::Center, exec);
      const Vec est = Eigen::Map<const Vec>(g.estimate.data(), d);
      const double se_norm = Eigen::Map<const Vec>(g.standard_error.data(), d).norm();
      const double gap = (est - f.gradient(x)).norm();
      smooth_grad_worst = std::max(smooth_grad_worst, ratio(gap - h * dd * *f.L1 / 2.0, se_norm));
    }
  }

  OracleReport r;
  r.name = fmt::format("smoothing-properties[{}, h={}]", f.name, h);
  r.samples = samples;
  r.tolerance = 4.0;
  r.passed = true;
  auto record = [&](bool applies, const char* label, double worst) {
    if (!applies) return;
    r.estimate.push_back(worst);
    r.standard_error.push_back(1.0);
    if (worst > r.tolerance) r.passed = false;
    r.detail += fmt::format("{}{}: worst excess {:.3f} SE", r.detail.empty() ? "" : ", ", label,
                            worst);
  };
  record(f.convex, "f <= f_h", convex_worst);
  record(f.L0.has_value(), "f_h <= f + L0 h", lipschitz_worst);
  record(smooth, "f_h <= f + L1 h^2/2", smooth_value_worst);
  record(gradient_check, "||grad f_h - grad f|| <= h d L1/2", smooth_grad_worst);
  return r;
}

OracleReport verify_ball_sampling(Eigen::Index d, std::int64_t samples, const RngStream& rng) {
  check_samples(samples);
  const auto m = monte_carlo_mean(samples, 1, rng,
                                  [d](std::int64_t, RngStream& s, Eigen::Ref<Vec> out) {
                                    out[0] = s.unit_ball(d).squaredNorm();
                                  });
  const double expected = static_cast<double>(d) / static_cast<double>(d + 2);
  OracleReport r;
  r.name = fmt::format("ball-sampling[d={}]", d);
  r.estimate = {m.mean[0]};
  r.standard_error = {m.standard_error[0]};
  r.samples = samples;
  r.tolerance = 4.0;
  r.passed = std::abs(m.mean[0] - expected) <= 4.0 * m.standard_error[0];
  r.detail = fmt::format("E||u||^2 = {:.6f}, expected {:.6f}", m.mean[0], expected);
  return r;
}

OracleReport verify_sphere_sampling(Eigen::Index d, std::int64_t samples, const RngStream& rng) {
  check_samples(samples);
  const auto m = monte_carlo_mean(samples, d * d, rng,
                                  [d](std::int64_t, RngStream& s, Eigen::Ref<Vec> out) {
                                    const Vec v = s.unit_sphere(d);
                                    for (Eigen::Index i = 0; i < d; ++i)
                                      for (Eigen::Index j = 0; j < d; ++j) out[i * d + j] = v[i] * v[j];
                                  });
  OracleReport r;
  r.name = fmt::format("sphere-sampling[d={}]", d);
  r.estimate = to_std(m.mean);
  r.standard_error = to_std(m.standard_error);
  r.samples = samples;
  r.tolerance = 5.0;
  r.passed = true;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const double expected = i == j ? 1.0 / static_cast<double>(d) : 0.0;
      const double diff = std::abs(m.mean[i * d + j] - expected);
      const double se = m.standard_error[i * d + j];
      if (diff > 5.0 * se) r.passed = false;
      if (se > 0.0) worst = std::max(worst, diff / se);
    }
  r.detail = fmt::format("max |E[v v^T] - I/d| / SE = {:.3f}", worst);
  return r;
}

}  // namespace ozd
