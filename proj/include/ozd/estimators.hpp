#pragma once

#include <cstdint>
#include <string>

#include "ozd/directions.hpp"
#include "ozd/objective.hpp"
#include "ozd/rng.hpp"

namespace ozd {

enum class SurrogateKind {
  CentralOrthogonal,
  ForwardOrthogonal,
  SinglePointOrthogonal,
  CentralGaussian,
  CentralSpherical,
};

std::string to_string(SurrogateKind kind);
SurrogateKind parse_surrogate_kind(const std::string& text);
bool is_orthogonal(SurrogateKind kind);

/// Objective evaluations charged per estimate: 2l central, l+1 forward, l single-point.
std::int64_t evals_per_estimate(SurrogateKind kind, Eigen::Index l);

struct SurrogateSpec {
  SurrogateKind kind = SurrogateKind::CentralOrthogonal;
  Eigen::Index l = 1;
  double h = 1.0;

  /// Throws DomainError unless h > 0, l >= 1 and (orthogonal kinds) l <= d.
  void validate(Eigen::Index d) const;
};

struct EvalCounter {
  std::int64_t evaluations = 0;
};

struct GradientEstimate {
  Vec vector;
  std::int64_t evals_used = 0;
};

/// (d/l) sum_i (f(x + h p_i) - f(x - h p_i)) / (2h) p_i
GradientEstimate central_surrogate(const Objective& f, const Vec& x, const OrthoDirections& dirs,
                                   double h, EvalCounter* counter = nullptr);

/// (d/l) sum_i (f(x + h p_i) - f(x)) / h p_i, with f(x) evaluated once.
GradientEstimate forward_surrogate(const Objective& f, const Vec& x, const OrthoDirections& dirs,
                                   double h, EvalCounter* counter = nullptr);

/// (d/l) sum_i f(x + h p_i) / h p_i
GradientEstimate single_point_surrogate(const Objective& f, const Vec& x,
                                        const OrthoDirections& dirs, double h,
                                        EvalCounter* counter = nullptr);

/// (1/l) sum_i (f(x + h u_i) - f(x - h u_i)) / (2h) u_i with u_i ~ N(0, I).
GradientEstimate gaussian_surrogate(const Objective& f, const Vec& x, Eigen::Index l, double h,
                                    RngStream& rng, EvalCounter* counter = nullptr);

/// (d/l) sum_i (f(x + h u_i) - f(x - h u_i)) / (2h) u_i with u_i i.i.d. on S^{d-1}.
GradientEstimate spherical_surrogate(const Objective& f, const Vec& x, Eigen::Index l, double h,
                                     RngStream& rng, EvalCounter* counter = nullptr);

/// Draws whatever randomness `spec.kind` needs (directions from `gen` for the
/// orthogonal kinds) and returns the estimate.
GradientEstimate estimate_gradient(const Objective& f, const Vec& x, const SurrogateSpec& spec,
                                   const DirectionGenerator& gen, RngStream& rng,
                                   EvalCounter* counter = nullptr);

}  // namespace ozd
