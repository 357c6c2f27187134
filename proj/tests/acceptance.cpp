// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "ozd/errors.hpp"
#include "ozd/experiment.hpp"
#include "ozd/stats.hpp"

namespace fs = std::filesystem;
using namespace ozd;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Eigen::Index> half_and_full(Eigen::Index d) {
  std::vector<Eigen::Index> ls{1, std::max<Eigen::Index>(1, d / 2), d};
  std::sort(ls.begin(), ls.end());
  ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
  return ls;
}

Outcome orthogonality() {
  const std::vector<Eigen::Index> dims{1, 2, 3, 4, 5, 6, 7, 8, 16, 64, 256};
  double worst = 0.0;
  int matrices = 0;
  for (const auto kind : {GeneratorKind::Qr, GeneratorKind::Householder, GeneratorKind::Butterfly})
    for (const auto d : dims) {
      if (kind == GeneratorKind::Butterfly && !is_power_of_two(d)) continue;
      for (const auto l : half_and_full(d))
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
          RngStream rng(seed, static_cast<std::uint64_t>(d));
          const auto dirs = sample_directions(DirectionGenerator{kind, 1}, d, l, rng);
          worst = std::max(worst, orthonormality_error(dirs.columns()));
          ++matrices;
        }
    }
  return {worst <= 1e-12,
          fmt::format("max |G^T G - I| = {:.2e} over {} matrices (butterfly on d = 2^n only)",
                      worst, matrices)};
}

Outcome smoothing_lemma() {
  const Eigen::Index d = 5;
  const auto f1 = make_quadratic(d, RngStream(0, 0));
  const auto f2 = make_shifted_l1(d);
  RngStream points(1, 1);
  const Vec x1 = points.normal_vector(d);
  const Vec x2 = *f2.x_star + 0.05 * points.normal_vector(d);
  int cases = 0, passed = 0;
  double slowest = 0.0, worst_z = 0.0;
  std::string failures;
  std::uint64_t stream = 0;
  for (const auto* f : {&f1, &f2})
    for (const Eigen::Index l : {Eigen::Index(1), Eigen::Index(3), Eigen::Index(5)})
      for (const auto kind : {SurrogateKind::CentralOrthogonal, SurrogateKind::ForwardOrthogonal,
                              SurrogateKind::SinglePointOrthogonal}) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = verify_smoothing_lemma(*f, f == &f1 ? x1 : x2, 0.1, l, 100000,
                                              RngStream(2, ++stream), kind);
        const double t = seconds_since(t0);
        slowest = std::max(slowest, t);
        ++cases;
        // detail reads "max |E[g] - grad f_h| / SE = z"
        worst_z = std::max(worst_z, std::stod(r.detail.substr(r.detail.rfind('=') + 1)));
        if (r.passed && t < 60.0) {
          ++passed;
        } else {
          failures += fmt::format(" [{} l={} {}: {}]", f->name, l, to_string(kind), r.detail);
        }
      }
  return {passed == cases,
          fmt::format("{}/{} cases within 4 SE, worst {:.2f} SE, slowest case {:.2f} s{}", passed,
                      cases, worst_z, slowest, failures)};
}

Outcome variance_scaling() {
  std::string detail;
  bool ok = true;
  for (const Eigen::Index d : {Eigen::Index(5), Eigen::Index(10)}) {
    const auto f = make_shifted_l1(d);
    RngStream p(3, static_cast<std::uint64_t>(d));
    const Vec x = *f.x_star + p.normal_vector(d);
    const auto r = variance_ratio(f, x, 0.01, 100000, RngStream(4, static_cast<std::uint64_t>(d)));
    ok = ok && r.passed;
    detail += fmt::format("d={}: ratio {:.3f} in [{}, {}]; ", d, r.estimate[0], d / 2.0, 2 * d);
  }
  return {ok, detail};
}

Outcome smooth_variance_bound() {
  const Eigen::Index d = 10;
  const auto f1 = make_quadratic(d, RngStream(0, 0));
  RngStream points(5, 0);
  int cases = 0, passed = 0;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Vec x = points.normal_vector(d);
    for (const Eigen::Index l : {Eigen::Index(1), Eigen::Index(5), Eigen::Index(10)}) {
      const auto r = verify_variance_bound(f1, x, 0.01, l, 20000,
                                           RngStream(6, static_cast<std::uint64_t>(i * 16 + l)),
                                           VarianceKind::Smooth);
      ++cases;
      if (r.passed) ++passed;
      worst = std::max(worst, r.estimate[0] / r.estimate[1]);
    }
  }
  return {passed == cases,
          fmt::format("{}/{} (point, l) pairs within bound + 4 SE, max E||g||^2 / bound = {:.3f}",
                      passed, cases, worst)};
}

Outcome smoothing_properties() {
  const Eigen::Index d = 5;
  const auto f1 = make_quadratic(d, RngStream(0, 0));
  const auto f2 = make_shifted_l1(d);
  bool ok = true;
  std::string detail;
  std::uint64_t stream = 0;
  for (const auto* f : {&f1, &f2})
    for (const double h : {0.05, 0.2}) {
      const auto r = verify_smoothing_properties(*f, h, 20, 20000, RngStream(7, ++stream));
      ok = ok && r.passed;
      detail += fmt::format("[{} h={}: {}] ", f->name, h, r.detail);
    }
  return {ok, detail};
}

// slope of log(mean gap) against log k on log-spaced k in [lo, hi]
double loglog_slope(const std::vector<double>& mean_gap, std::int64_t lo, std::int64_t hi) {
  std::vector<double> lx, ly;
  const int points = 40;
  std::int64_t last = -1;
  for (int i = 0; i < points; ++i) {
    const auto k = static_cast<std::int64_t>(
        std::llround(std::exp(std::log(double(lo)) + (std::log(double(hi)) - std::log(double(lo))) * i / (points - 1))));
    if (k == last) continue;
    last = k;
    lx.push_back(static_cast<double>(k));
    ly.push_back(mean_gap[static_cast<std::size_t>(k) - 1]);
  }
  return stats::log_log_slope(lx, ly);
}

Outcome nonsmooth_convex_rate() {
  const Eigen::Index d = 10;
  const auto f2 = make_shifted_l1(d);
  const std::int64_t iterations = 10000;
  ScheduleParams p;
  p.alpha = 1.0;  // sqrt(l/d)
  p.theta = 0.6;
  p.h = 0.1;
  p.rho = 0.6;
  const auto schedule = Schedule::make(ScheduleKind::Power, p);
  RunOptions o;
  o.l = d;
  o.budget = 2 * d * iterations;
  std::vector<double> mean(static_cast<std::size_t>(iterations), 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto trace = run_ozd(f2, Vec::Zero(d), schedule, o, RngStream(seed, 8));
    // record k holds the average of x_0..x_k, i.e. x-bar after k+1 iterates
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += *trace.iterations[k].average_gap / 10.0;
  }
  const double slope = loglog_slope(mean, 100, iterations);
  return {slope >= -1.0 && slope <= -0.2,
          fmt::format("slope of mean f(x-bar_k) - min f over k in [1e2, 1e4] = {:.3f} "
                      "(gap {:.4g} at k=1e2, {:.4g} at k=1e4)",
                      slope, mean[99], mean.back())};
}

Outcome smooth_convex_rate() {
  const Eigen::Index d = 10, l = 10;
  const std::int64_t iterations = 401;  // records 0..400, so k = 200 has a 2k partner
  std::vector<std::vector<double>> gaps;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f1 = make_quadratic(d, RngStream(seed, 0));
    ScheduleParams p;
    p.dim = d;
    p.l = l;
    p.L1 = f1.L1;
    p.alpha = 0.99 * double(l) / (double(d) * *f1.L1);
    p.h = 1e-5;
    p.theta = 1.1;
    const auto schedule = Schedule::make(ScheduleKind::SmoothCapped, p);
    RunOptions o;
    o.l = l;
    o.budget = 2 * l * iterations;
    const auto trace = run_ozd(f1, Vec::Ones(d), schedule, o, RngStream(seed, 9));
    std::vector<double> g;
    for (const auto& it : trace.iterations) g.push_back(*it.average_gap);
    gaps.push_back(g);
  }
  bool ok = true;
  std::string detail = "median f(x-bar_k)/f(x-bar_2k):";
  for (const std::size_t k : {50, 100, 200}) {
    std::vector<double> ratios;
    for (const auto& g : gaps) ratios.push_back(g[k] / g[2 * k]);
    const double med = stats::median(ratios);
    ok = ok && med >= 1.5 && med <= 3.0;
    detail += fmt::format(" k={}: {:.3f}", k, med);
  }
  return {ok, detail + " (required in [1.5, 3])"};
}

Outcome figure1_ordering(const fs::path& configs, const fs::path& out) {
  ConfigOverrides o;
  o.out = out;
  bool ok = true;
  std::string detail;
  for (const auto& config : load_experiments(configs / "figure1.cfg", o)) {
    const auto summary = run_experiment(config);
    const auto& one = summary.at("ozd@1");
    const auto& full = summary.at("ozd@50");
    int wins = 0;
    for (std::size_t r = 0; r < one.final_gaps.size(); ++r)
      if (full.final_gaps[r] < one.final_gaps[r]) ++wins;
    const bool here = wins >= 8;
    ok = ok && here;
    detail += fmt::format("{}: l=50 below l=1 in {}/{} (means {:.4g} vs {:.4g}); ", config.name,
                          wins, one.final_gaps.size(), full.mean_gap.back(), one.mean_gap.back());
  }
  return {ok, detail};
}

Outcome figure2_ordering(const fs::path& configs, const fs::path& out) {
  ConfigOverrides o;
  o.out = out;
  bool ok = true;
  std::string detail;
  for (const auto* name : {"figure2_smooth.cfg", "figure2_nonsmooth.cfg"}) {
    const auto config = load_experiments(configs / name, o).front();
    const auto summary = run_experiment(config);
    const double ozd = stats::median(summary.at("ozd@10").final_gaps);
    detail += fmt::format("{}: ozd@10 {:.4g}", config.name, ozd);
    for (const auto& s : summary.series) {
      if (s.label.rfind("gaussian@", 0) != 0) continue;
      const double med = stats::median(s.final_gaps);
      ok = ok && ozd <= med;
      detail += fmt::format(", {} {:.4g}", s.label, med);
    }
    detail += "; ";
  }
  return {ok, detail + "(median final gaps; O-ZD must not exceed any Gaussian baseline)"};
}

double chi_square_p(const std::vector<double>& weights, RngStream rng) {
  const GoldsteinSampler sampler(weights);
  std::vector<long long> counts(weights.size(), 0);
  for (int i = 0; i < 100000; ++i) ++counts[sampler(rng)];
  std::vector<double> probs(weights.size());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = sampler.probability(i);
  return stats::chi_square_gof(counts, probs).p_value;
}

Outcome goldstein() {
  const std::vector<double> uniform(100, 1.0);
  std::vector<double> power(100);
  for (std::size_t i = 0; i < power.size(); ++i) power[i] = std::pow(double(i + 1), -0.6);
  const double pu = chi_square_p(uniform, RngStream(10, 0));
  const double pp = chi_square_p(power, RngStream(10, 1));

  // constant step tuned to the horizon K for Lipschitz non-convex problems
  const Eigen::Index d = 10;
  const auto f2 = make_shifted_l1(d);
  const double h = 0.1;
  std::vector<double> medians;
  bool finite = true;
  for (const std::int64_t K : {std::int64_t(100), std::int64_t(1000)}) {
    ScheduleParams p;
    p.dim = d;
    p.l = d;
    p.L0 = f2.L0;
    p.h = h;
    p.horizon = K;
    p.initial_gap = f2(Vec::Zero(d)) - *f2.f_star;
    const auto schedule = Schedule::make(ScheduleKind::NonsmoothNonconvexOptimal, p);
    std::vector<double> values;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      RunOptions o;
      o.l = d;
      o.budget = 2 * d * K;
      o.record_iterates = true;
      const auto trace = run_ozd(f2, Vec::Zero(d), schedule, o, RngStream(seed, 11));
      const auto r = goldstein_stationarity(trace.iterates, trace.alphas(), f2, h, 32, 2000,
                                            RngStream(seed, 12));
      finite = finite && std::isfinite(r.estimate[0]);
      values.push_back(r.estimate[0]);
    }
    medians.push_back(stats::median(values));
  }
  const bool ok = pu > 0.001 && pp > 0.001 && finite && medians[1] < medians[0];
  return {ok, fmt::format("chi-square p: uniform {:.4f}, power-0.6 {:.4f}; median MC "
                          "||grad f_h(x_I)||^2: K=1e2 {:.4g}, K=1e3 {:.4g}",
                          pu, pp, medians[0], medians[1])};
}

Outcome exactness() {
  double worst = 0.0;
  for (const auto kind : {GeneratorKind::Qr, GeneratorKind::Householder, GeneratorKind::Butterfly})
    for (const Eigen::Index d : {Eigen::Index(6), Eigen::Index(8)}) {
      if (kind == GeneratorKind::Butterfly && !is_power_of_two(d)) continue;
      const Vec c = Vec::LinSpaced(d, -1.5, 2.5);
      const auto f = make_affine(c, 0.25);
      for (const auto sk : {SurrogateKind::CentralOrthogonal, SurrogateKind::ForwardOrthogonal})
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
          RngStream rng(seed, 13);
          const SurrogateSpec spec{sk, d, 0.3};
          const Vec x = rng.normal_vector(d);
          const auto g = estimate_gradient(f, x, spec, DirectionGenerator{kind, 1}, rng);
          worst = std::max(worst, (g.vector - c).cwiseAbs().maxCoeff());
        }
    }
  ScheduleParams p;
  p.alpha = 0.5;
  p.h = 0.3;
  RunOptions o;
  o.l = 1;
  o.budget = 6;
  const auto trace = run_ozd(make_half_squared_norm(1), Vec::Ones(1),
                             Schedule::make(ScheduleKind::Constant, p), o, RngStream(0, 14));
  const double x3 = trace.state.x[0];
  return {worst <= 1e-10 && x3 == 0.125 && trace.iterations.size() == 3,
          fmt::format("max |g - c| = {:.2e} (central and forward, all generators, 100 seeds); "
                      "d=1 run x_3 = {}",
                      worst, x3)};
}

Outcome reproducibility(const fs::path& configs, const fs::path& out) {
  std::vector<fs::path> dirs;
  for (const auto* run : {"a", "b"}) {
    ConfigOverrides o;
    o.out = out / run;
    dirs.push_back(run_experiment(load_experiments(configs / "figure2_nonsmooth.cfg", o).front())
                       .directory);
  }
  int files = 0, identical = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    if (slurp(entry.path()) == slurp(dirs[1] / entry.path().filename())) ++identical;
  }
  return {files > 0 && identical == files,
          fmt::format("{}/{} CSV files byte-identical across two runs", identical, files)};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path configs = argc > 1 ? fs::path(argv[1]) : fs::path("configs");
  const fs::path out = fs::temp_directory_path() / "ozd_acceptance";
  fs::remove_all(out);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"orthogonality of QR, Householder and butterfly directions", orthogonality},
      {"smoothing lemma for central, forward and single-point surrogates", smoothing_lemma},
      {"l1 second-moment ratio between l=1 and l=d", variance_scaling},
      {"smooth second-moment bound", smooth_variance_bound},
      {"smoothing properties", smoothing_properties},
      {"non-smooth convex rate of the averaged iterate", nonsmooth_convex_rate},
      {"smooth convex contraction of the averaged iterate", smooth_convex_rate},
      {"figure1.cfg ordering, l=50 vs l=1", [&] { return figure1_ordering(configs, out / "fig1"); }},
      {"figure2 configs ordering, O-ZD vs Gaussian directions",
       [&] { return figure2_ordering(configs, out / "fig2"); }},
      {"index sampler and Goldstein stationarity estimate", goldstein},
      {"exactness on affine objectives and the d=1 quadratic", exactness},
      {"byte-identical CSVs for a repeated run",
       [&] { return reproducibility(configs, out / "repro"); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, fmt::format("threw: {}", e.what())};
    }
    if (!r.passed) ++failed;
    fmt::print("criterion {:>2}: {} | {} | {} ({:.1f} s)\n", i + 1, r.passed ? "PASS" : "FAIL",
               criteria[i].first, r.detail, seconds_since(t0));
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
