#include "ozd/optimizer.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "ozd/errors.hpp"

namespace ozd {

OzdState::OzdState(Vec x0) : x(std::move(x0)), weighted_sum(Vec::Zero(x.size())) {}

void OzdState::accumulate(double alpha, const Vec& point) {
  if (weighted_sum.size() != point.size()) weighted_sum = Vec::Zero(point.size());
  weighted_sum += alpha * point;
  weight_total += alpha;
}

Vec averaged_iterate(const OzdState& state) {
  if (!(state.weight_total > 0.0))
    throw StateError("averaged iterate is undefined before the first completed step");
  return state.weighted_sum / state.weight_total;
}

std::vector<double> RunTrace::alphas() const {
  std::vector<double> out;
  out.reserve(iterations.size());
  for (const auto& it : iterations) out.push_back(it.alpha);
  return out;
}

namespace {

RunTrace run_descent(const Objective& f, const Vec& x0, const Schedule& schedule,
                     const SurrogateSpec& base_spec, const DirectionGenerator& gen,
                     std::int64_t budget, bool record_iterates, RngStream rng) {
  const Eigen::Index d = x0.size();
  if (f.dim != d)
    throw DomainError(fmt::format("x0 has dimension {}, objective expects {}", d, f.dim));
  base_spec.validate(d);
  const std::int64_t per_iteration = evals_per_estimate(base_spec.kind, base_spec.l);
  if (budget < per_iteration)
    throw DomainError(fmt::format("budget {} is below the {} evaluations one iteration needs",
                                  budget, per_iteration));

  RunTrace trace;
  trace.meta.objective = f.name;
  trace.meta.dim = d;
  trace.meta.l = base_spec.l;
  trace.meta.schedule = schedule.describe();
  trace.meta.seed = rng.seed();
  trace.meta.stream = rng.stream();
  trace.meta.estimator = to_string(base_spec.kind);
  trace.meta.generator = is_orthogonal(base_spec.kind) ? gen.name() : "none";
  trace.meta.budget = budget;
  trace.meta.gap_relative_to_minimum = f.f_star.has_value();

  const double offset = f.f_star.value_or(0.0);
  auto gap_of = [&](const Vec& point) { return f.eval(point) - offset; };

  const std::int64_t iterations = budget / per_iteration;
  trace.gap.reserve(static_cast<std::size_t>(iterations * per_iteration));
  trace.iterations.reserve(static_cast<std::size_t>(iterations));

  OzdState state(x0);
  EvalCounter counter;
  for (std::int64_t k = 0; k < iterations; ++k) {
    const double alpha = schedule.alpha(k);
    double h = schedule.h(k);
    if (h < kMinSmoothing) {
      h = kMinSmoothing;
      trace.meta.h_clamped = true;
    }
    state.k = k;
    state.accumulate(alpha, state.x);
    if (record_iterates) trace.iterates.push_back(state.x);

    IterationRecord record;
    record.k = k;
    record.first_eval = counter.evaluations;
    record.alpha = alpha;
    record.h = h;
    record.gap = gap_of(state.x);
    if (f.f_star) record.average_gap = gap_of(averaged_iterate(state));

    SurrogateSpec spec = base_spec;
    spec.h = h;
    RngStream step_rng = rng.split(static_cast<std::uint64_t>(k));
    GradientEstimate g;
    try {
      g = estimate_gradient(f, state.x, spec, gen, step_rng, &counter);
    } catch (const EstimationError& e) {
      throw EstimationError(fmt::format("iteration {}: {}", k, e.what()), e.probe());
    }
    trace.gap.insert(trace.gap.end(), static_cast<std::size_t>(g.evals_used), record.gap);
    trace.iterations.push_back(record);
    state.x -= alpha * g.vector;
    state.k = k + 1;
  }
  state.eval_count = counter.evaluations;
  trace.final_gap = gap_of(state.x);
  if (f.f_star) trace.final_average_gap = gap_of(averaged_iterate(state));
  trace.state = std::move(state);
  return trace;
}

}  // namespace

RunTrace run_ozd(const Objective& f, const Vec& x0, const Schedule& schedule,
                 const RunOptions& options, RngStream rng) {
  if (!is_orthogonal(options.estimator))
    throw DomainError("run_ozd needs an orthogonal estimator; use run_baseline otherwise");
  const SurrogateSpec spec{options.estimator, options.l, std::max(schedule.h(0), kMinSmoothing)};
  return run_descent(f, x0, schedule, spec, options.generator, options.budget,
                     options.record_iterates, std::move(rng));
}

RunTrace run_baseline(const Objective& f, const Vec& x0, const Schedule& schedule,
                      Eigen::Index l, BaselineKind kind, std::int64_t budget, RngStream rng,
                      bool record_iterates) {
  const SurrogateKind estimator = kind == BaselineKind::Gaussian ? SurrogateKind::CentralGaussian
                                                                 : SurrogateKind::CentralSpherical;
  const SurrogateSpec spec{estimator, l, std::max(schedule.h(0), kMinSmoothing)};
  return run_descent(f, x0, schedule, spec, DirectionGenerator{}, budget, record_iterates,
                     std::move(rng));
}

}  // namespace ozd
