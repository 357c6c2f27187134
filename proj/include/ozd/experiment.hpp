#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ozd/directions.hpp"
#include "ozd/estimators.hpp"
#include "ozd/objective.hpp"
#include "ozd/optimizer.hpp"
#include "ozd/oracles.hpp"
#include "ozd/schedule.hpp"

namespace ozd {

/// One curve of an experiment: "ozd@10", "gaussian@1", "spherical@10".
struct MethodSpec {
  std::string family;  // ozd | gaussian | spherical
  Eigen::Index l = 1;
  double c = 1.0;

  std::string label() const;
  std::string file_stem() const;  // ozd_l10
  static MethodSpec parse(const std::string& token);
};

/// Flat key/value experiment description.  Step and smoothing sequences are
///   alpha_k = c * step_factor * (k+1)^-step.exponent
///   h_k     = smoothing.scale * smoothing_factor * (k+1)^-smoothing.exponent
/// where the factors are chosen by step.scale_by / smoothing.scale_by.
struct ExperimentConfig {
  std::string name;
  std::string objective;
  Eigen::Index dim = 0;
  ZooParams zoo;
  std::vector<MethodSpec> methods;
  SurrogateKind estimator = SurrogateKind::CentralOrthogonal;
  DirectionGenerator generator;
  ScheduleKind schedule = ScheduleKind::Constant;
  std::string step_scale_by = "1";  // 1 | l/d | sqrt(l/d) | l/(d*L1)
  double step_exponent = 0.0;
  double smoothing_scale = 1.0;
  std::string smoothing_scale_by = "1";  // 1 | 1/d^2
  double smoothing_exponent = 0.0;
  std::int64_t budget = 0;
  int repetitions = 1;
  std::uint64_t seed = 0;
  std::filesystem::path out = "results";
  double x0 = 0.0;
  std::filesystem::path source;
  std::map<std::string, std::string> raw;  // every key as written, for metadata

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct ConfigOverrides {
  std::optional<std::filesystem::path> out;
  std::optional<int> repetitions;
  std::optional<std::uint64_t> seed;
};

/// Reads one config file.  A file with an `include` key is a bundle: the
/// listed files (relative to it) are returned in order, each with the
/// bundle's output directory as parent.
std::vector<ExperimentConfig> load_experiments(const std::filesystem::path& path,
                                               const ConfigOverrides& overrides = {});

ExperimentConfig parse_experiment(const std::string& text, const std::filesystem::path& source = {});

/// The objective seen by repetition r.  Random objectives draw their data from
/// RngStream(seed + r, 0), so every method in a repetition shares it.
Objective make_experiment_objective(const ExperimentConfig& config, int repetition);

Schedule make_method_schedule(const ExperimentConfig& config, const MethodSpec& method,
                              const Objective& f);

struct Series {
  std::string label;
  std::vector<double> mean_gap;  // one per evaluation, length = budget
  std::vector<double> std_gap;
  std::vector<double> final_gaps;  // per repetition, NaN when that run failed
  int failures = 0;
};

struct RunFailure {
  std::string label;
  int repetition = 0;
  std::string message;
};

struct SummaryStats {
  std::string name;
  std::int64_t budget = 0;
  std::vector<Series> series;
  std::vector<RunFailure> failures;
  std::filesystem::path directory;

  const Series& at(const std::string& label) const;
};

/// Runs every method for every repetition (repetitions in parallel) and writes
/// <out>/<name>/<method>_l<l>.csv, final.csv and metadata.json.
SummaryStats run_experiment(const ExperimentConfig& config);

std::string format_series_csv(const Series& s);
std::string format_final_csv(const SummaryStats& summary);

struct VerificationResult {
  std::vector<OracleReport> checks;
  std::filesystem::path report;
  bool passed() const;
};

std::vector<std::string> verification_suites();

/// Runs a named suite ("full" runs all of them) and writes a text report.
VerificationResult run_verification(const std::string& suite, std::uint64_t seed,
                                    const std::filesystem::path& out);

std::string format_report(const std::vector<OracleReport>& checks);

enum class PlotStyle { Linear, LogY };

/// Reads a run directory (or its metadata.json) back into a summary.
SummaryStats load_summary(const std::filesystem::path& path);

/// eval_index then <label>_mean,<label>_std per series.  Log-y clamps values
/// below 1e-16 and says so in a leading comment line.
std::string format_plot_data(const SummaryStats& summary, PlotStyle style);
std::string render_svg(const SummaryStats& summary, PlotStyle style);

/// Writes plot.csv and plot.svg next to the summary; returns the csv path.
std::filesystem::path emit_plot_data(const SummaryStats& summary, PlotStyle style,
                                     const std::optional<std::filesystem::path>& out = {});

}  // namespace ozd
