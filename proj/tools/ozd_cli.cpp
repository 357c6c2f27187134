#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ozd/errors.hpp"
#include "ozd/experiment.hpp"

namespace {

enum Exit { kOk = 0, kConfigError = 1, kVerificationFailed = 2, kObjectiveFailed = 3 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"O-ZD zeroth-order optimization benchmark harness"};
  app.require_subcommand(1);

  std::string out;
  int reps = 0;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "run an experiment config (or a bundle of configs)");
  std::string config_path;
  run->add_option("config", config_path, "experiment .cfg file")->required();
  run->add_option("--out", out, "output directory (overrides config)");
  run->add_option("--reps", reps, "repetitions (overrides config)")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "base seed (overrides config)");

  auto* verify = app.add_subcommand("verify", "run Monte-Carlo verification checks");
  std::string suite = "full";
  verify->add_option("--suite", suite, "suite name, or full");
  verify->add_option("--seed", seed, "seed");
  std::string report_dir = "results";
  verify->add_option("--out", report_dir, "report directory");

  auto* plot = app.add_subcommand("plot", "write plot.csv/plot.svg for a run directory");
  std::string summary_path;
  bool log_y = false;
  plot->add_option("summary", summary_path, "run directory or its metadata.json")->required();
  plot->add_flag("--log-y", log_y, "clamp to 1e-16 for log-scale plotting");
  plot->add_option("--out", out, "output directory (default: the run directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      ozd::ConfigOverrides o;
      if (!out.empty()) o.out = out;
      if (run->count("--reps")) o.repetitions = reps;
      if (run->count("--seed")) o.seed = seed;
      bool failed = false;
      for (const auto& config : ozd::load_experiments(config_path, o)) {
        const auto summary = ozd::run_experiment(config);
        fmt::print("{} -> {}\n", config.name, summary.directory.string());
        for (const auto& s : summary.series) {
          if (s.mean_gap.empty()) {
            fmt::print("  {:<14} all {} repetitions failed\n", s.label, s.failures);
            continue;
          }
          fmt::print("  {:<14} final mean gap {:.6g} (std {:.3g}){}\n", s.label, s.mean_gap.back(),
                     s.std_gap.back(),
                     s.failures ? fmt::format(", {} failed repetitions", s.failures) : "");
        }
        for (const auto& f : summary.failures)
          fmt::print(stderr, "objective failure: {} repetition {}: {}\n", f.label, f.repetition,
                     f.message);
        failed = failed || !summary.failures.empty();
      }
      return failed ? kObjectiveFailed : kOk;
    }
    if (*verify) {
      const auto result = ozd::run_verification(suite, seed, report_dir);
      std::cout << ozd::format_report(result.checks);
      fmt::print("report: {}\n", result.report.string());
      return result.passed() ? kOk : kVerificationFailed;
    }
    if (*plot) {
      const auto summary = ozd::load_summary(summary_path);
      std::optional<std::filesystem::path> dir;
      if (!out.empty()) dir = out;
      const auto csv =
          ozd::emit_plot_data(summary, log_y ? ozd::PlotStyle::LogY : ozd::PlotStyle::Linear, dir);
      fmt::print("wrote {}\n", csv.string());
      return kOk;
    }
  } catch (const ozd::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const ozd::DomainError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const ozd::EstimationError& e) {
    fmt::print(stderr, "objective failure: {}\n", e.what());
    return kObjectiveFailed;
  }
  return kOk;
}
