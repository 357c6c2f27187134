#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>

#include <fmt/format.h>

#include "ozd/errors.hpp"
#include "ozd/experiment.hpp"
#include "ozd/stats.hpp"

namespace fs = std::filesystem;

namespace ozd {
namespace {

using Suite = std::function<std::vector<OracleReport>(const RngStream&)>;

std::vector<OracleReport> orthogonality(const RngStream&) {
  std::vector<OracleReport> out;
  const std::vector<Eigen::Index> dims{1, 2, 3, 4, 5, 6, 7, 8, 16, 64, 256};
  for (const auto kind : {GeneratorKind::Qr, GeneratorKind::Householder, GeneratorKind::Butterfly}) {
    DirectionGenerator gen{kind, 1};
    double worst = 0.0;
    int matrices = 0;
    for (const auto d : dims) {
      if (kind == GeneratorKind::Butterfly && !is_power_of_two(d)) continue;
      std::vector<Eigen::Index> ls{1, std::max<Eigen::Index>(1, d / 2), d};
      std::sort(ls.begin(), ls.end());
      ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
      for (const auto l : ls)
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
          RngStream rng(seed, static_cast<std::uint64_t>(d * 1000 + l));
          worst = std::max(worst, orthonormality_error(sample_directions(gen, d, l, rng).columns()));
          ++matrices;
        }
    }
    OracleReport r;
    r.name = fmt::format("orthogonality/{}", gen.name());
    r.estimate = {worst};
    r.standard_error = {0.0};
    r.samples = matrices;
    r.tolerance = 1e-12;
    r.passed = worst <= r.tolerance;
    r.detail = fmt::format("max |G^T G - I| = {:.3g} over {} matrices", worst, matrices);
    out.push_back(r);
  }
  return out;
}

std::vector<OracleReport> smoothing_lemma(const RngStream& rng) {
  std::vector<OracleReport> out;
  const Eigen::Index d = 5;
  const auto f1 = make_quadratic(d, RngStream(rng.seed(), 0));
  const auto f2 = make_shifted_l1(d);
  RngStream points = rng.split(99);
  int idx = 0;
  for (const auto* f : {&f1, &f2}) {
    const Vec x = (f == &f1 ? Vec::Ones(d) : *f2.x_star) + 0.05 * points.normal_vector(d);
    for (const auto kind : {SurrogateKind::CentralOrthogonal, SurrogateKind::ForwardOrthogonal,
                            SurrogateKind::SinglePointOrthogonal}) {
      auto r = verify_smoothing_lemma(*f, x, 0.1, 3, 100000, rng.split(idx++), kind);
      r.name = fmt::format("smoothing-lemma/{}/{}", f->name, to_string(kind));
      out.push_back(r);
    }
  }
  return out;
}

std::vector<OracleReport> smoothing_lemma_affine(const RngStream& rng) {
  const Vec c = Vec::LinSpaced(6, -2.0, 3.0);
  auto r = verify_smoothing_lemma(make_affine(c, 1.0), Vec::Ones(6), 0.1, 6, 1000, rng);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    worst = std::max(worst, std::abs(r.estimate[static_cast<std::size_t>(i)] - c[i]));
  r.name = "smoothing-lemma-affine";
  r.tolerance = 1e-10;
  r.passed = r.passed && worst <= 1e-10;
  r.detail = fmt::format("max |E[g] - c| = {:.3g}", worst);
  return {r};
}

std::vector<OracleReport> variance_scaling(const RngStream& rng) {
  std::vector<OracleReport> out;
  for (const Eigen::Index d : {Eigen::Index(5), Eigen::Index(10)}) {
    const auto f = make_shifted_l1(d);
    RngStream p = rng.split(static_cast<std::uint64_t>(d) + 1000);
    const Vec x = *f.x_star + p.normal_vector(d);
    auto r = variance_ratio(f, x, 0.01, 100000, rng.split(static_cast<std::uint64_t>(d)));
    r.name = fmt::format("variance-scaling/d={}", d);
    out.push_back(r);
  }
  return out;
}

std::vector<OracleReport> variance_constant(const RngStream& rng) {
  const std::vector<Eigen::Index> dims{5, 10, 20};
  auto r = verify_variance_scaling([](Eigen::Index d) { return make_shifted_l1(d); }, dims, 0.01,
                                   50000, rng);
  r.name = "variance-constant";
  return {r};
}

std::vector<OracleReport> smooth_variance_bound(const RngStream& rng) {
  std::vector<OracleReport> out;
  const Eigen::Index d = 10;
  const auto f1 = make_quadratic(d, RngStream(rng.seed(), 0));
  RngStream pts = rng.split(1000);
  std::vector<Vec> points;
  for (int i = 0; i < 20; ++i) points.push_back(pts.normal_vector(d));
  for (const Eigen::Index l : {Eigen::Index(1), Eigen::Index(5), Eigen::Index(10)}) {
    OracleReport agg;
    agg.name = fmt::format("smooth-variance-bound/l={}", l);
    agg.passed = true;
    double worst = -INFINITY;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto r = verify_variance_bound(f1, points[i], 0.01, l, 20000,
                                           rng.split(static_cast<std::uint64_t>(l * 100) + i),
                                           VarianceKind::Smooth);
      agg.samples = r.samples;
      agg.passed = agg.passed && r.passed;
      worst = std::max(worst, r.estimate[0] / r.estimate[1]);
      agg.estimate.push_back(r.estimate[0]);
      agg.standard_error.push_back(r.standard_error[0]);
    }
    agg.tolerance = 4.0;
    agg.detail = fmt::format("20 points, max E||g||^2 / bound = {:.4f}", worst);
    out.push_back(agg);
  }
  return out;
}

std::vector<OracleReport> smoothing_properties(const RngStream& rng) {
  std::vector<OracleReport> out;
  const Eigen::Index d = 5;
  const auto f1 = make_quadratic(d, RngStream(rng.seed(), 0));
  const auto f2 = make_shifted_l1(d);
  int idx = 0;
  for (const auto* f : {&f1, &f2})
    for (const double h : {0.05, 0.2}) {
      auto r = verify_smoothing_properties(*f, h, 20, 20000, rng.split(idx++));
      r.name = fmt::format("smoothing-properties/{}/h={}", f->name, h);
      out.push_back(r);
    }
  return out;
}

OracleReport chi_square_report(const std::string& name, std::span<const double> weights,
                               RngStream rng) {
  const GoldsteinSampler sampler(weights);
  std::vector<long long> counts(sampler.size(), 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[sampler(rng)];
  std::vector<double> probs(sampler.size());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = sampler.probability(i);
  const auto chi = stats::chi_square_gof(counts, probs);
  OracleReport r;
  r.name = name;
  r.estimate = {chi.p_value};
  r.standard_error = {0.0};
  r.samples = draws;
  r.tolerance = 0.001;
  r.passed = chi.p_value > 0.001;
  r.detail = fmt::format("chi2 = {:.2f}, dof = {}, p = {:.4f}", chi.statistic, chi.dof, chi.p_value);
  return r;
}

std::vector<OracleReport> goldstein_sampler(const RngStream& rng) {
  const std::vector<double> uniform(100, 1.0);
  std::vector<double> power(100);
  for (std::size_t i = 0; i < power.size(); ++i) power[i] = std::pow(double(i + 1), -0.6);
  return {chi_square_report("goldstein-sampler/uniform", uniform, rng.split(0)),
          chi_square_report("goldstein-sampler/power-0.6", power, rng.split(1))};
}

std::vector<OracleReport> ball_sampling(const RngStream& rng) {
  std::vector<OracleReport> out;
  for (const Eigen::Index d : {Eigen::Index(2), Eigen::Index(5), Eigen::Index(10)}) {
    auto r = verify_ball_sampling(d, 100000, rng.split(static_cast<std::uint64_t>(d)));
    r.name = fmt::format("ball-sampling/d={}", d);
    out.push_back(r);
  }
  return out;
}

std::vector<OracleReport> sphere_sampling(const RngStream& rng) {
  auto r = verify_sphere_sampling(5, 100000, rng);
  r.name = "sphere-sampling/d=5";
  return {r};
}

// Constant step and smoothing on the shifted l1 norm: the smoothed eta curve
// levels off at a positive value instead of going to zero.
std::vector<OracleReport> eta_floor(const RngStream& rng) {
  const Eigen::Index d = 10;
  const auto f = make_shifted_l1(d);
  ScheduleParams p;
  p.alpha = 0.05;
  p.h = 0.1;
  const auto schedule = Schedule::make(ScheduleKind::Constant, p);
  RunOptions o;
  o.l = d;
  o.budget = 2 * d * 1600;
  o.record_iterates = true;
  const auto trace = run_ozd(f, Vec::Zero(d), schedule, o, rng.split(0));
  const auto alphas = trace.alphas();
  const auto eta = eta_metrics(trace.iterates, alphas, f, 0.1, EtaKind::Smoothed, 200, rng.split(1));
  const auto at = [&](std::size_t k) { return eta.values[k - 1]; };
  const double e200 = at(200), e400 = at(400), e800 = at(800), e1600 = at(1600);
  const double early = std::abs(e400 - e200), mid = std::abs(e800 - e400),
               late = std::abs(e1600 - e800);
  OracleReport r;
  r.name = "eta-floor";
  r.estimate = {e200, e400, e800, e1600};
  r.standard_error = {0.0, 0.0, 0.0, 0.0};
  r.samples = 200;
  r.passed = e1600 > 0.0 && late < mid && mid < early;
  r.detail = fmt::format(
      "eta at k = 200, 400, 800, 1600: {:.4g} {:.4g} {:.4g} {:.4g}; changes {:.3g} > {:.3g} > {:.3g}",
      e200, e400, e800, e1600, early, mid, late);
  return {r};
}

const std::vector<std::pair<std::string, Suite>>& registry() {
  static const std::vector<std::pair<std::string, Suite>> suites = {
      {"orthogonality", orthogonality},
      {"smoothing-lemma", smoothing_lemma},
      {"smoothing-lemma-affine", smoothing_lemma_affine},
      {"variance-scaling", variance_scaling},
      {"variance-constant", variance_constant},
      {"smooth-variance-bound", smooth_variance_bound},
      {"smoothing-properties", smoothing_properties},
      {"goldstein-sampler", goldstein_sampler},
      {"ball-sampling", ball_sampling},
      {"sphere-sampling", sphere_sampling},
      {"eta-floor", eta_floor},
  };
  return suites;
}

}  // namespace

bool VerificationResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const OracleReport& r) { return r.passed; });
}

std::vector<std::string> verification_suites() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  names.push_back("full");
  return names;
}

std::string format_report(const std::vector<OracleReport>& checks) {
  std::string out;
  int failed = 0;
  for (const auto& r : checks) {
    if (!r.passed) ++failed;
    out += fmt::format("[{}] {}\n", r.passed ? "PASS" : "FAIL", r.name);
    out += fmt::format("  {}\n", r.detail);
    const std::size_t shown = std::min<std::size_t>(r.estimate.size(), 8);
    std::vector<std::string> est, se;
    for (std::size_t i = 0; i < shown; ++i) {
      est.push_back(fmt::format("{:.6g}", r.estimate[i]));
      if (i < r.standard_error.size()) se.push_back(fmt::format("{:.3g}", r.standard_error[i]));
    }
    out += fmt::format("  estimate: [{}]{}\n", fmt::join(est, ", "),
                       r.estimate.size() > shown ? " ..." : "");
    out += fmt::format("  se: [{}]  samples: {}  tolerance: {}\n", fmt::join(se, ", "), r.samples,
                       r.tolerance);
  }
  out += fmt::format("{} checks, {} failed\n", checks.size(), failed);
  return out;
}

VerificationResult run_verification(const std::string& suite, std::uint64_t seed,
                                    const fs::path& out) {
  VerificationResult result;
  bool found = false;
  for (const auto& [name, fn] : registry()) {
    if (suite != "full" && suite != name) continue;
    found = true;
    const auto reports = fn(RngStream(seed, stream_id_for(name)));
    result.checks.insert(result.checks.end(), reports.begin(), reports.end());
  }
  if (!found)
    throw ConfigError(fmt::format("unknown suite '{}' (known: {})", suite,
                                  fmt::join(verification_suites(), ", ")));
  fs::create_directories(out);
  result.report = out / fmt::format("verification_{}.txt", suite);
  std::ofstream file(result.report, std::ios::binary);
  if (!file) throw ConfigError(fmt::format("cannot write '{}'", result.report.string()));
  file << fmt::format("suite: {}  seed: {}\n", suite, seed) << format_report(result.checks);
  return result;
}

}  // namespace ozd
