#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ozd/directions.hpp"
#include "ozd/estimators.hpp"
#include "ozd/objective.hpp"
#include "ozd/rng.hpp"

namespace ozd {

/// Serial runs the reference one-pass loop.  Parallel splits the samples into
/// fixed blocks, runs the blocks under OpenMP and merges them in block order,
/// so its result does not depend on the thread count.
enum class Execution { Serial, Parallel };

struct MonteCarloMoments {
  Vec mean;
  Vec standard_error;
  std::int64_t samples = 0;

  /// sqrt(sum_i se_i^2): standard error of the estimated vector as a whole.
  double norm_standard_error() const;
};

/// Fills `out` with the sample for index j; `rng` is the per-sample stream
/// base.split(j), so a sample never depends on which thread produced it.
using SampleFn = std::function<void(std::int64_t j, RngStream& rng, Eigen::Ref<Vec> out)>;

MonteCarloMoments monte_carlo_mean(std::int64_t samples, Eigen::Index width,
                                   const RngStream& rng, const SampleFn& sample,
                                   Execution exec = Execution::Parallel);

inline constexpr std::int64_t kMonteCarloBlock = 512;

struct OracleReport {
  std::string name;
  std::vector<double> estimate;
  std::vector<double> standard_error;
  std::int64_t samples = 0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

/// f_h(x) = E_{u ~ B^d} f(x + h u).
OracleReport mc_smoothed_value(const Objective& f, const Vec& x, double h, std::int64_t samples,
                               const RngStream& rng, Execution exec = Execution::Parallel);

/// Whether the smoothed-gradient sampler subtracts f(x) from each probe.  Both
/// are unbiased for grad f_h since E[v] = 0; Center has far lower variance.
enum class GradientBaseline { None, Center };

/// grad f_h(x) = (d/h) E_{v ~ S^{d-1}} [ (f(x + h v) - b) v ].
OracleReport mc_smoothed_grad(const Objective& f, const Vec& x, double h, std::int64_t samples,
                              const RngStream& rng,
                              GradientBaseline baseline = GradientBaseline::Center,
                              Execution exec = Execution::Parallel);

/// Mean and SE of N independent surrogates, fresh directions per sample.
MonteCarloMoments surrogate_moments(const Objective& f, const Vec& x, const SurrogateSpec& spec,
                                    const DirectionGenerator& gen, std::int64_t samples,
                                    const RngStream& rng, Execution exec = Execution::Parallel);

/// Mean and SE of ||g||^2 over N independent surrogates.
MonteCarloMoments surrogate_second_moment(const Objective& f, const Vec& x,
                                          const SurrogateSpec& spec,
                                          const DirectionGenerator& gen, std::int64_t samples,
                                          const RngStream& rng,
                                          Execution exec = Execution::Parallel);

/// Compares E_G[g] under Haar directions with the Monte-Carlo grad f_h; passes
/// iff every component differs by at most 4 combined standard errors.
OracleReport verify_smoothing_lemma(const Objective& f, const Vec& x, double h, Eigen::Index l,
                                    std::int64_t samples, const RngStream& rng,
                                    SurrogateKind kind = SurrogateKind::CentralOrthogonal,
                                    Execution exec = Execution::Parallel);

enum class VarianceKind { Lipschitz, Smooth };

/// Lipschitz: estimate = {E||g||^2, c_hat = E||g||^2 l / (2 d L0^2)}.
/// Smooth: estimate = {E||g||^2, bound}; passes iff E||g||^2 <= bound + 4 SE with
/// bound = (2d/l)||grad f(x)||^2 + (L1^2 d^2 / (2l)) h^2.
OracleReport verify_variance_bound(const Objective& f, const Vec& x, double h, Eigen::Index l,
                                   std::int64_t samples, const RngStream& rng, VarianceKind kind,
                                   Execution exec = Execution::Parallel);

/// c_hat at l = 1 for each dimension; passes iff max/min <= 3.
OracleReport verify_variance_scaling(const std::function<Objective(Eigen::Index)>& make,
                                     std::span<const Eigen::Index> dims, double h,
                                     std::int64_t samples, const RngStream& rng,
                                     Execution exec = Execution::Parallel);

/// E||g||^2 at l = 1 over E||g||^2 at l = d; passes iff the ratio is in [d/2, 2d].
OracleReport variance_ratio(const Objective& f, const Vec& x, double h, std::int64_t samples,
                            const RngStream& rng, Execution exec = Execution::Parallel);

enum class EtaKind { Smoothed, Exact };

struct EtaMetric {
  EtaKind kind = EtaKind::Smoothed;
  std::vector<double> values;
  std::vector<double> weight_totals;
};

/// eta_k = sum_{i<=k} alpha_i Q_i / A_k.  Q_i is ||grad f(x_i)||^2 (Exact) or
/// the Monte-Carlo ||grad f_h(x_i)||^2 minus its variance trace, floored at 0.
EtaMetric eta_metrics(std::span<const Vec> iterates, std::span<const double> alphas,
                      const Objective& f, double h, EtaKind kind, std::int64_t mc_samples,
                      const RngStream& rng, Execution exec = Execution::Parallel);

/// Draws I with P[I = i] = w_i / sum(w).
class GoldsteinSampler {
 public:
  explicit GoldsteinSampler(std::span<const double> weights);
  std::size_t operator()(RngStream& rng) const;
  std::size_t size() const { return cumulative_.size(); }
  double probability(std::size_t i) const;

 private:
  std::vector<double> cumulative_;
};

std::size_t goldstein_sample_index(std::span<const double> weights, RngStream& rng);

/// Mean over `draws` sampled indices I of the debiased Monte-Carlo
/// ||grad f_h(x_I)||^2, an upper bound on the squared (h)-Goldstein measure.
OracleReport goldstein_stationarity(std::span<const Vec> iterates, std::span<const double> alphas,
                                    const Objective& f, double h, int draws,
                                    std::int64_t mc_samples, const RngStream& rng,
                                    Execution exec = Execution::Parallel);

/// Checks the smoothing inequalities that apply to f at `points` random points
/// x = center + scale * N(0, I): f <= f_h (convex), f_h <= f + L0 h (Lipschitz),
/// f_h <= f + L1 h^2 / 2 and ||grad f_h - grad f|| <= h d L1 / 2 (smooth).
OracleReport verify_smoothing_properties(const Objective& f, double h, int points,
                                         std::int64_t samples, const RngStream& rng,
                                         double scale = 1.0,
                                         Execution exec = Execution::Parallel);

/// E||u||^2 for u uniform in the ball against d/(d+2), within 4 SE.
OracleReport verify_ball_sampling(Eigen::Index d, std::int64_t samples, const RngStream& rng);

/// E[v v^T] for v uniform on the sphere against I/d, within 5 SE entrywise.
OracleReport verify_sphere_sampling(Eigen::Index d, std::int64_t samples, const RngStream& rng);

}  // namespace ozd
