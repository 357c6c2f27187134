#include "ozd/estimators.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ozd/errors.hpp"

namespace ozd {

namespace {

double probe(const Objective& f, const Vec& point, EvalCounter* counter) {
  const double value = f.eval(point);
  if (counter != nullptr) ++counter->evaluations;
  if (!std::isfinite(value))
    throw EstimationError(fmt::format("objective '{}' returned a non-finite value", f.name),
                          point);
  return value;
}

void check_args(const Vec& x, Eigen::Index dim, double h) {
  if (!(h > 0.0)) throw DomainError(fmt::format("h must be > 0, got {}", h));
  if (x.size() != dim)
    throw DomainError(fmt::format("point has dimension {}, directions have {}", x.size(), dim));
}

void check_count(Eigen::Index l) {
  if (l < 1) throw DomainError(fmt::format("direction count must be >= 1, got {}", l));
}

}  // namespace

std::string to_string(SurrogateKind kind) {
  switch (kind) {
    case SurrogateKind::CentralOrthogonal:
      return "central";
    case SurrogateKind::ForwardOrthogonal:
      return "forward";
    case SurrogateKind::SinglePointOrthogonal:
      return "single-point";
    case SurrogateKind::CentralGaussian:
      return "gaussian";
    case SurrogateKind::CentralSpherical:
      return "spherical";
  }
  return "?";
}

SurrogateKind parse_surrogate_kind(const std::string& text) {
  if (text == "central") return SurrogateKind::CentralOrthogonal;
  if (text == "forward") return SurrogateKind::ForwardOrthogonal;
  if (text == "single-point") return SurrogateKind::SinglePointOrthogonal;
  if (text == "gaussian") return SurrogateKind::CentralGaussian;
  if (text == "spherical") return SurrogateKind::CentralSpherical;
  throw ConfigError(fmt::format("unknown estimator kind '{}'", text));
}

bool is_orthogonal(SurrogateKind kind) {
  return kind == SurrogateKind::CentralOrthogonal || kind == SurrogateKind::ForwardOrthogonal ||
         kind == SurrogateKind::SinglePointOrthogonal;
}

std::int64_t evals_per_estimate(SurrogateKind kind, Eigen::Index l) {
  switch (kind) {
    case SurrogateKind::ForwardOrthogonal:
      return l + 1;
    case SurrogateKind::SinglePointOrthogonal:
      return l;
    default:
      return 2 * l;
  }
}

void SurrogateSpec::validate(Eigen::Index d) const {
  if (!(h > 0.0)) throw DomainError(fmt::format("h must be > 0, got {}", h));
  check_count(l);
  if (is_orthogonal(kind) && l > d)
    throw DomainError(fmt::format("orthogonal estimators need l <= d, got l={} d={}", l, d));
}

GradientEstimate central_surrogate(const Objective& f, const Vec& x, const OrthoDirections& dirs,
                                   double h, EvalCounter* counter) {
  check_args(x, dirs.dim(), h);
  const Eigen::Index l = dirs.count();
  Vec g = Vec::Zero(x.size());
  for (Eigen::Index i = 0; i < l; ++i) {
    const Vec step = h * dirs.column(i);
    const double plus = probe(f, x + step, counter);
    const double minus = probe(f, x - step, counter);
    g += ((plus - minus) / (2.0 * h)) * dirs.column(i);
  }
  g *= static_cast<double>(dirs.dim()) / static_cast<double>(l);
  return {std::move(g), 2 * l};
}

GradientEstimate forward_surrogate(const Objective& f, const Vec& x, const OrthoDirections& dirs,
                                   double h, EvalCounter* counter) {
  check_args(x, dirs.dim(), h);
  const Eigen::Index l = dirs.count();
  const double center = probe(f, x, counter);
  Vec g = Vec::Zero(x.size());
  for (Eigen::Index i = 0; i < l; ++i) {
    const double plus = probe(f, x + h * dirs.column(i), counter);
    g += ((plus - center) / h) * dirs.column(i);
  }
  g *= static_cast<double>(dirs.dim()) / static_cast<double>(l);
  return {std::move(g), l + 1};
}

GradientEstimate single_point_surrogate(const Objective& f, const Vec& x,
                                        const OrthoDirections& dirs, double h,
                                        EvalCounter* counter) {
  check_args(x, dirs.dim(), h);
  const Eigen::Index l = dirs.count();
  Vec g = Vec::Zero(x.size());
  for (Eigen::Index i = 0; i < l; ++i) {
    const double plus = probe(f, x + h * dirs.column(i), counter);
    g += (plus / h) * dirs.column(i);
  }
  g *= static_cast<double>(dirs.dim()) / static_cast<double>(l);
  return {std::move(g), l};
}

namespace {

template <typename Draw>
GradientEstimate unstructured(const Objective& f, const Vec& x, Eigen::Index l, double h,
                              double prefactor, Draw draw, EvalCounter* counter) {
  check_args(x, x.size(), h);
  check_count(l);
  Vec g = Vec::Zero(x.size());
  for (Eigen::Index i = 0; i < l; ++i) {
    const Vec u = draw();
    const double plus = probe(f, x + h * u, counter);
    const double minus = probe(f, x - h * u, counter);
    g += ((plus - minus) / (2.0 * h)) * u;
  }
  g *= prefactor;
  return {std::move(g), 2 * l};
}

}  // namespace

GradientEstimate gaussian_surrogate(const Objective& f, const Vec& x, Eigen::Index l, double h,
                                    RngStream& rng, EvalCounter* counter) {
  const double prefactor = 1.0 / static_cast<double>(std::max<Eigen::Index>(l, 1));
  return unstructured(f, x, l, h, prefactor, [&] { return rng.normal_vector(x.size()); },
                      counter);
}

GradientEstimate spherical_surrogate(const Objective& f, const Vec& x, Eigen::Index l, double h,
                                     RngStream& rng, EvalCounter* counter) {
  const double prefactor =
      static_cast<double>(x.size()) / static_cast<double>(std::max<Eigen::Index>(l, 1));
  return unstructured(f, x, l, h, prefactor, [&] { return rng.unit_sphere(x.size()); }, counter);
}

GradientEstimate estimate_gradient(const Objective& f, const Vec& x, const SurrogateSpec& spec,
                                   const DirectionGenerator& gen, RngStream& rng,
                                   EvalCounter* counter) {
  spec.validate(x.size());
  switch (spec.kind) {
    case SurrogateKind::CentralOrthogonal:
      return central_surrogate(f, x, sample_directions(gen, x.size(), spec.l, rng), spec.h,
                               counter);
    case SurrogateKind::ForwardOrthogonal:
      return forward_surrogate(f, x, sample_directions(gen, x.size(), spec.l, rng), spec.h,
                               counter);
    case SurrogateKind::SinglePointOrthogonal:
      return single_point_surrogate(f, x, sample_directions(gen, x.size(), spec.l, rng), spec.h,
                                    counter);
    case SurrogateKind::CentralGaussian:
      return gaussian_surrogate(f, x, spec.l, spec.h, rng, counter);
    case SurrogateKind::CentralSpherical:
      return spherical_surrogate(f, x, spec.l, spec.h, rng, counter);
  }
  throw DomainError("unknown surrogate kind");
}

}  // namespace ozd
