#include <omp.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "ozd/errors.hpp"
#include "ozd/oracles.hpp"
#include "ozd/stats.hpp"

using namespace ozd;

namespace {

bool within(const OracleReport& r, const Vec& expected, double sigmas, double floor = 0.0) {
  for (Eigen::Index i = 0; i < expected.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (std::abs(r.estimate[k] - expected[i]) > sigmas * r.standard_error[k] + floor) return false;
  }
  return true;
}

// Gradient of the ball-smoothed shifted l1 norm.  The first coordinate of a
// uniform point in the d-ball, mapped to (t + 1)/2, is Beta((d+1)/2, (d+1)/2).
Vec smoothed_l1_gradient(const Vec& x, const Vec& shift, double h) {
  const double a = (static_cast<double>(x.size()) + 1.0) / 2.0;
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double s = std::clamp(-(x[i] - shift[i]) / h, -1.0, 1.0);
    g[i] = 1.0 - 2.0 * boost::math::ibeta(a, a, (s + 1.0) / 2.0);
  }
  return g;
}

}  // namespace

TEST_CASE("smoothed value examples") {
  const RngStream rng(11);
  const Vec c = Eigen::Vector3d(1.0, -2.0, 0.5);
  const Vec x = Eigen::Vector3d(0.3, 0.1, -1.0);
  const auto lin = mc_smoothed_value(make_affine(c), x, 0.7, 20000, rng);
  CHECK(within(lin, Vec::Constant(1, c.dot(x)), 4.0));

  const auto quad = mc_smoothed_value(make_half_squared_norm(3), Vec::Zero(3), 0.5, 20000, rng);
  CHECK(within(quad, Vec::Constant(1, 0.075), 4.0));
  CHECK(quad.standard_error[0] > 0.0);
  CHECK(quad.samples == 20000);

  const auto f2 = make_shifted_l1(6);
  const auto at_min = mc_smoothed_value(f2, *f2.x_star, 0.2, 20000, rng);
  CHECK(at_min.estimate[0] >= 0.0);
  CHECK(at_min.estimate[0] <= *f2.L0 * 0.2 + 4 * at_min.standard_error[0]);

  CHECK_THROWS_AS(mc_smoothed_value(f2, *f2.x_star, 0.0, 100, rng), DomainError);
  CHECK_THROWS_AS(mc_smoothed_value(f2, *f2.x_star, 0.1, 1, rng), DomainError);
}

TEST_CASE("smoothed gradient examples") {
  const RngStream rng(12);
  const Vec c = Eigen::Vector4d(1.0, -2.0, 0.5, 3.0);
  const Vec x = Eigen::Vector4d(0.3, 0.1, -1.0, 2.0);
  for (const auto b : {GradientBaseline::None, GradientBaseline::Center}) {
    CHECK(within(mc_smoothed_grad(make_affine(c), x, 0.5, 20000, rng, b), c, 4.0, 1e-12));
    CHECK(within(mc_smoothed_grad(make_shifted_l1(4), Vec::LinSpaced(4, 0, 3), 0.5, 20000, rng, b),
                 Vec::Zero(4), 4.0));
    CHECK(within(mc_smoothed_grad(make_half_squared_norm(4), x, 0.5, 20000, rng, b), x, 4.0));
  }
}

TEST_CASE("smoothed l1 gradient against the incomplete beta closed form") {
  const RngStream rng(13);
  const Eigen::Index d = 5;
  const auto f = make_shifted_l1(d);
  const double h = 0.3;
  RngStream points(99);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec x = *f.x_star + 0.2 * points.normal_vector(d);
    const Vec expected = smoothed_l1_gradient(x, *f.x_star, h);
    CHECK(within(mc_smoothed_grad(f, x, h, 40000, rng.split(trial)), expected, 4.0));
  }
  // far from every kink f_h = f + const, so the gradient is the sign vector
  const Vec far = *f.x_star + Vec::Constant(d, 2.0);
  CHECK((smoothed_l1_gradient(far, *f.x_star, h) - Vec::Ones(d)).norm() == 0.0);
}

TEST_CASE("serial and parallel kernels agree; parallel ignores thread count") {
  const auto f = make_shifted_l1(6);
  const Vec x = Vec::LinSpaced(6, 0.1, 4.9);
  const RngStream rng(5);
  const auto serial = mc_smoothed_grad(f, x, 0.2, 5000, rng, GradientBaseline::Center,
                                       Execution::Serial);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto one = mc_smoothed_grad(f, x, 0.2, 5000, rng, GradientBaseline::Center,
                                    Execution::Parallel);
  omp_set_num_threads(4);
  const auto four = mc_smoothed_grad(f, x, 0.2, 5000, rng, GradientBaseline::Center,
                                     Execution::Parallel);
  omp_set_num_threads(saved);
  CHECK(one.estimate == four.estimate);
  CHECK(one.standard_error == four.standard_error);
  for (std::size_t i = 0; i < serial.estimate.size(); ++i) {
    CHECK(serial.estimate[i] == doctest::Approx(one.estimate[i]).epsilon(1e-12).scale(1.0));
    CHECK(serial.standard_error[i] == doctest::Approx(one.standard_error[i]).epsilon(1e-10));
  }
}

TEST_CASE("smoothing lemma") {
  const RngStream rng(21);
  const Vec c = Vec::LinSpaced(4, -1.0, 2.0);
  const auto exact = verify_smoothing_lemma(make_affine(c), Vec::Ones(4), 0.2, 4, 200, rng);
  CHECK(exact.passed);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(std::abs(exact.estimate[i] - c[static_cast<Eigen::Index>(i)]) <= 1e-10);

  const auto f2 = make_shifted_l1(5);
  const Vec x = *f2.x_star + 0.05 * Vec::LinSpaced(5, -1.0, 1.0);
  for (const auto kind : {SurrogateKind::CentralOrthogonal, SurrogateKind::ForwardOrthogonal,
                          SurrogateKind::SinglePointOrthogonal}) {
    const auto r = verify_smoothing_lemma(f2, x, 0.1, 3, 20000, rng, kind);
    INFO(r.detail);
    CHECK(r.passed);
  }
  CHECK_THROWS_AS(verify_smoothing_lemma(f2, x, 0.1, 3, 100, rng, SurrogateKind::CentralGaussian),
                  DomainError);
}

TEST_CASE("variance bounds") {
  const RngStream rng(31);
  const Vec c = Vec::LinSpaced(6, 1.0, 2.0);
  const auto affine = verify_variance_bound(make_affine(c), Vec::Zero(6), 0.1, 6, 100, rng,
                                            VarianceKind::Smooth);
  CHECK(affine.passed);
  CHECK(affine.estimate[0] == doctest::Approx(c.squaredNorm()).epsilon(1e-10));

  const auto f1 = make_quadratic(10, RngStream(1));
  const auto at_zero = verify_variance_bound(f1, Vec::Zero(10), 0.1, 1, 5000, rng,
                                             VarianceKind::Smooth);
  CHECK(at_zero.passed);
  CHECK(at_zero.estimate[1] ==
        doctest::Approx(*f1.L1 * *f1.L1 * 100.0 / 2.0 * 0.01));

  CHECK_THROWS_AS(verify_variance_bound(make_shifted_l1(4), Vec::Zero(4), 0.1, 1, 100, rng,
                                        VarianceKind::Smooth),
                  ConfigError);
  CHECK_THROWS_AS(verify_variance_bound(make_table3_objective("elastic-net", 4, {}), Vec::Zero(4),
                                        0.1, 1, 100, rng, VarianceKind::Lipschitz),
                  ConfigError);
}

TEST_CASE("l1 second moment grows linearly in d once L0^2 is divided out") {
  const RngStream rng(32);
  std::vector<double> normalized;
  for (const Eigen::Index d : {Eigen::Index(5), Eigen::Index(10)}) {
    const auto f = make_shifted_l1(d);
    const Vec x = *f.x_star + RngStream(7).normal_vector(d);
    const auto r = verify_variance_bound(f, x, 0.01, 1, 20000, rng, VarianceKind::Lipschitz);
    normalized.push_back(r.estimate[0] / (*f.L0 * *f.L0));
  }
  const double ratio = normalized[1] / normalized[0];
  CHECK(ratio >= 1.0);
  CHECK(ratio <= 4.0);

  const std::vector<Eigen::Index> dims{5, 10, 20};
  const auto scaling = verify_variance_scaling([](Eigen::Index d) { return make_shifted_l1(d); },
                                               dims, 0.01, 10000, rng);
  INFO(scaling.detail);
  CHECK(scaling.passed);
  CHECK(scaling.estimate.size() == 3);
}

TEST_CASE("variance ratio between one and d directions") {
  const auto f = make_shifted_l1(5);
  const Vec x = *f.x_star + RngStream(8).normal_vector(5);
  const auto r = variance_ratio(f, x, 0.01, 20000, RngStream(33));
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("eta metrics") {
  const auto f1 = make_quadratic(3, RngStream(2));
  const std::vector<Vec> zeros(5, Vec::Zero(3));
  const std::vector<double> alphas(5, 0.3);
  const auto exact = eta_metrics(zeros, alphas, f1, 0.1, EtaKind::Exact, 10, RngStream(1));
  for (const double v : exact.values) CHECK(v == 0.0);
  for (std::size_t i = 1; i < exact.weight_totals.size(); ++i)
    CHECK(exact.weight_totals[i] > exact.weight_totals[i - 1]);

  // affine objective: ||grad||^2 = 4 everywhere; the smoothed kind is a
  // debiased Monte-Carlo estimate of the same value
  const auto lin = make_affine(Eigen::Vector2d(0.0, 2.0));
  std::vector<Vec> pts;
  RngStream r(4);
  for (int i = 0; i < 6; ++i) pts.push_back(r.normal_vector(2));
  const std::vector<double> steps(6, 0.1);
  const auto eta_exact = eta_metrics(pts, steps, lin, 0.5, EtaKind::Exact, 0, RngStream(5));
  for (const double v : eta_exact.values) CHECK(v == doctest::Approx(4.0).epsilon(1e-12));
  const auto eta_mc = eta_metrics(pts, steps, lin, 0.5, EtaKind::Smoothed, 50000, RngStream(5));
  for (const double v : eta_mc.values) CHECK(v == doctest::Approx(4.0).epsilon(0.03));

  CHECK_THROWS_AS(eta_metrics(pts, steps, make_shifted_l1(2), 0.1, EtaKind::Exact, 10,
                              RngStream(1)),
                  ConfigError);
  const std::vector<double> bad{0.1, 0.0, 0.1, 0.1, 0.1, 0.1};
  CHECK_THROWS_AS(eta_metrics(pts, bad, lin, 0.1, EtaKind::Smoothed, 10, RngStream(1)),
                  DomainError);
}

TEST_CASE("index sampler frequencies") {
  const std::vector<double> uniform(4, 1.0);
  const GoldsteinSampler u(uniform);
  std::vector<long long> counts(4, 0);
  RngStream rng(41);
  for (int i = 0; i < 100000; ++i) ++counts[u(rng)];
  const std::vector<double> quarter(4, 0.25);
  CHECK(stats::chi_square_gof(counts, quarter).p_value > 0.001);

  const std::vector<double> w13{1.0, 3.0};
  const GoldsteinSampler s13(w13);
  CHECK(s13.probability(1) == doctest::Approx(0.75));
  long long ones = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ones += static_cast<long long>(s13(rng));
  const double p = static_cast<double>(ones) / n;
  CHECK(std::abs(p - 0.75) <= 4.0 * std::sqrt(0.75 * 0.25 / n));

  std::vector<double> power(100);
  for (std::size_t i = 0; i < power.size(); ++i) power[i] = std::pow(double(i + 1), -0.6);
  const GoldsteinSampler sp(power);
  std::vector<long long> pc(100, 0);
  for (int i = 0; i < 100000; ++i) ++pc[sp(rng)];
  std::vector<double> probs(100);
  for (std::size_t i = 0; i < 100; ++i) probs[i] = sp.probability(i);
  CHECK(stats::chi_square_gof(pc, probs).p_value > 0.001);

  CHECK(goldstein_sample_index(std::vector<double>{2.0}, rng) == 0);
  CHECK_THROWS_AS(GoldsteinSampler(std::vector<double>{}), DomainError);
  CHECK_THROWS_AS(GoldsteinSampler(std::vector<double>{1.0, -1.0}), DomainError);
}

TEST_CASE("goldstein stationarity estimate") {
  const auto lin = make_affine(Eigen::Vector2d(3.0, 4.0));
  const std::vector<Vec> pts(10, Vec::Zero(2));
  const std::vector<double> steps(10, 1.0);
  const auto r = goldstein_stationarity(pts, steps, lin, 0.1, 8, 50000, RngStream(1));
  CHECK(r.passed);
  CHECK(r.estimate[0] == doctest::Approx(25.0).epsilon(0.03));
  CHECK_THROWS_AS(goldstein_stationarity(pts, steps, lin, 0.1, 0, 100, RngStream(1)), DomainError);
}

TEST_CASE("smoothing properties") {
  const RngStream rng(51);
  const auto lin = make_affine(Eigen::Vector3d(1.0, 2.0, 3.0));
  CHECK(verify_smoothing_properties(lin, 0.3, 5, 2000, rng).passed);

  const auto f2 = make_shifted_l1(5);
  const auto r2 = verify_smoothing_properties(f2, 0.2, 20, 4000, rng);
  INFO(r2.detail);
  CHECK(r2.passed);

  const auto f1 = make_quadratic(5, RngStream(3));
  const auto r1 = verify_smoothing_properties(f1, 0.1, 10, 4000, rng);
  INFO(r1.detail);
  CHECK(r1.passed);
}

TEST_CASE("ball and sphere sampling") {
  for (const Eigen::Index d : {Eigen::Index(2), Eigen::Index(5), Eigen::Index(10)}) {
    const auto r = verify_ball_sampling(d, 100000, RngStream(61));
    INFO(r.detail);
    CHECK(r.passed);
  }
  const auto s = verify_sphere_sampling(5, 100000, RngStream(62));
  INFO(s.detail);
  CHECK(s.passed);
}
