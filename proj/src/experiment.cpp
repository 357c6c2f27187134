#include "ozd/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "ozd/errors.hpp"
#include "ozd/stats.hpp"

#ifndef OZD_VERSION
#define OZD_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace ozd {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, value));
  return v;
}

std::int64_t to_int(const std::string& key, const std::string& value) {
  std::int64_t v = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, value));
  return v;
}

std::string g17(double v) { return fmt::format("{:.17g}", v); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::set<std::string> kKnownKeys = {
    "name", "objective", "dim", "methods", "estimator", "generator", "schedule",
    "step.scale", "step.scale_by", "step.exponent", "smoothing.scale", "smoothing.scale_by",
    "smoothing.exponent", "budget", "repetitions", "seed", "out", "x0", "include",
    "huber.delta", "elastic.alpha", "elastic.beta", "groups.count", "groups.size"};

std::map<std::string, std::string> parse_pairs(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", lineno));
    if (!kKnownKeys.count(key) && key.rfind("c.", 0) != 0)
      throw ConfigError(fmt::format("{}: unknown key", key));
    if (kv.count(key)) throw ConfigError(fmt::format("{}: given twice", key));
    kv[key] = value;
  }
  return kv;
}

double step_factor(const std::string& by, const MethodSpec& m, Eigen::Index d,
                   const Objective& f) {
  const double l = static_cast<double>(m.l);
  const double dd = static_cast<double>(d);
  if (by == "1") return 1.0;
  if (by == "l/d") return l / dd;
  if (by == "sqrt(l/d)") return std::sqrt(l / dd);
  if (by == "l/(d*L1)") {
    if (!f.L1 || !(*f.L1 > 0.0))
      throw ConfigError(fmt::format("step.scale_by: objective '{}' has no L1", f.name));
    return l / (dd * *f.L1);
  }
  throw ConfigError(fmt::format("step.scale_by: unknown '{}' (1, l/d, sqrt(l/d), l/(d*L1))", by));
}

double smoothing_factor(const std::string& by, Eigen::Index d) {
  if (by == "1") return 1.0;
  if (by == "1/d^2") return 1.0 / (static_cast<double>(d) * static_cast<double>(d));
  throw ConfigError(fmt::format("smoothing.scale_by: unknown '{}' (1, 1/d^2)", by));
}

bool is_random_objective(const std::string& name) { return name == "f1" || name == "quadratic"; }

}  // namespace

std::string MethodSpec::label() const { return fmt::format("{}@{}", family, l); }

std::string MethodSpec::file_stem() const { return fmt::format("{}_l{}", family, l); }

MethodSpec MethodSpec::parse(const std::string& token) {
  const auto at = token.find('@');
  if (at == std::string::npos)
    throw ConfigError(fmt::format("methods: '{}' must look like family@l", token));
  MethodSpec m;
  m.family = token.substr(0, at);
  if (m.family != "ozd" && m.family != "gaussian" && m.family != "spherical")
    throw ConfigError(fmt::format("methods: unknown family '{}'", m.family));
  m.l = to_int("methods", token.substr(at + 1));
  return m;
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("name: required");
  if (dim < 1) throw ConfigError("dim: must be >= 1");
  if (methods.empty()) throw ConfigError("methods: at least one method required");
  if (repetitions < 1) throw ConfigError("repetitions: must be >= 1");
  if (!(smoothing_scale > 0.0)) throw ConfigError("smoothing.scale: must be > 0");
  std::set<std::string> seen;
  for (const auto& m : methods) {
    if (m.l < 1 || m.l > dim)
      throw ConfigError(fmt::format("methods: {} needs 1 <= l <= d = {}", m.label(), dim));
    if (!seen.insert(m.label()).second)
      throw ConfigError(fmt::format("methods: {} listed twice", m.label()));
    if (!(m.c > 0.0)) throw ConfigError(fmt::format("c.{}: must be > 0", m.label()));
    const auto kind = m.family == "ozd" ? estimator
                      : m.family == "gaussian" ? SurrogateKind::CentralGaussian
                                               : SurrogateKind::CentralSpherical;
    if (budget < evals_per_estimate(kind, m.l))
      throw ConfigError(fmt::format("budget: {} evaluations cannot pay one iteration of {} ({})",
                                    budget, m.label(), evals_per_estimate(kind, m.l)));
  }
  if (!is_orthogonal(estimator))
    throw ConfigError("estimator: must be central, forward or single-point");
  const auto f = make_experiment_objective(*this, 0);
  for (const auto& m : methods) {
    if (m.family == "ozd" && generator.kind == GeneratorKind::Butterfly && !is_power_of_two(dim))
      throw ConfigError(fmt::format("generator: butterfly needs d = 2^n, got {}", dim));
    (void)make_method_schedule(*this, m, f);
  }
}

ExperimentConfig parse_experiment(const std::string& text, const fs::path& source) {
  const auto kv = parse_pairs(text);
  if (kv.count("include")) throw ConfigError("include: only allowed in bundle files");
  ExperimentConfig c;
  c.source = source;
  c.raw = kv;
  auto required = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError(fmt::format("{}: required", key));
    return it->second;
  };
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };

  c.name = required("name");
  c.objective = required("objective");
  c.dim = to_int("dim", required("dim"));
  c.budget = to_int("budget", required("budget"));
  if (c.budget < 1) throw ConfigError("budget: must be >= 1");
  const double default_c = get("step.scale") ? to_double("step.scale", *get("step.scale")) : 1.0;
  for (const auto& token : split_list(required("methods"))) {
    auto m = MethodSpec::parse(token);
    m.c = default_c;
    c.methods.push_back(m);
  }
  for (const auto& [key, value] : kv) {
    if (key.rfind("c.", 0) != 0) continue;
    const auto label = key.substr(2);
    auto it = std::find_if(c.methods.begin(), c.methods.end(),
                           [&](const MethodSpec& m) { return m.label() == label; });
    if (it == c.methods.end())
      throw ConfigError(fmt::format("{}: no method {} in methods", key, label));
    it->c = to_double(key, value);
  }

  try {
    if (auto v = get("estimator")) c.estimator = parse_surrogate_kind(*v);
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("estimator: {}", e.what()));
  }
  try {
    if (auto v = get("generator")) c.generator = DirectionGenerator::parse(*v);
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("generator: {}", e.what()));
  }
  try {
    c.schedule = parse_schedule_kind(required("schedule"));
  } catch (const ConfigError& e) {
    if (!kv.count("schedule")) throw;
    throw ConfigError(fmt::format("schedule: {}", e.what()));
  }
  if (auto v = get("step.scale_by")) c.step_scale_by = *v;
  if (auto v = get("step.exponent")) c.step_exponent = to_double("step.exponent", *v);
  if (auto v = get("smoothing.scale")) c.smoothing_scale = to_double("smoothing.scale", *v);
  if (auto v = get("smoothing.scale_by")) c.smoothing_scale_by = *v;
  if (auto v = get("smoothing.exponent"))
    c.smoothing_exponent = to_double("smoothing.exponent", *v);
  if (auto v = get("repetitions")) c.repetitions = static_cast<int>(to_int("repetitions", *v));
  if (auto v = get("seed")) {
    const auto s = to_int("seed", *v);
    if (s < 0) throw ConfigError("seed: must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = get("out")) c.out = *v;
  if (auto v = get("x0")) c.x0 = to_double("x0", *v);
  if (auto v = get("huber.delta")) c.zoo.huber_delta = to_double("huber.delta", *v);
  if (auto v = get("elastic.alpha")) c.zoo.elastic_alpha = to_double("elastic.alpha", *v);
  if (auto v = get("elastic.beta")) c.zoo.elastic_beta = to_double("elastic.beta", *v);
  if (auto v = get("groups.count")) c.zoo.group_count = static_cast<int>(to_int("groups.count", *v));
  if (auto v = get("groups.size")) c.zoo.group_size = static_cast<int>(to_int("groups.size", *v));
  return c;
}

std::vector<ExperimentConfig> load_experiments(const fs::path& path,
                                               const ConfigOverrides& overrides) {
  const std::string text = read_file(path);
  const auto kv = parse_pairs(text);
  std::vector<ExperimentConfig> configs;
  if (kv.count("include")) {
    for (const auto& [key, value] : kv)
      if (key != "include" && key != "name" && key != "out")
        throw ConfigError(fmt::format("{}: bundle files only take name, out and include", key));
    const fs::path base = kv.count("out") ? fs::path(kv.at("out")) : fs::path("results");
    const std::string bundle = kv.count("name") ? kv.at("name") : path.stem().string();
    for (const auto& item : split_list(kv.at("include"))) {
      const fs::path child = path.parent_path() / item;
      if (!fs::exists(child)) throw ConfigError(fmt::format("include: '{}' not found", item));
      auto c = parse_experiment(read_file(child), child);
      c.out = base / bundle;
      configs.push_back(std::move(c));
    }
    if (configs.empty()) throw ConfigError("include: empty");
  } else {
    configs.push_back(parse_experiment(text, path));
  }
  for (auto& c : configs) {
    if (overrides.out) c.out = configs.size() > 1 ? *overrides.out / c.out.filename() : *overrides.out;
    if (overrides.repetitions) c.repetitions = *overrides.repetitions;
    if (overrides.seed) c.seed = *overrides.seed;
    c.validate();
  }
  return configs;
}

Objective make_experiment_objective(const ExperimentConfig& config, int repetition) {
  const auto& name = config.objective;
  if (is_random_objective(name))
    return make_quadratic(config.dim, RngStream(config.seed + static_cast<std::uint64_t>(repetition), 0));
  if (name == "f2" || name == "shifted-l1") return make_shifted_l1(config.dim);
  if (name == "half-squared-norm") return make_half_squared_norm(config.dim);
  try {
    return make_table3_objective(name, config.dim, config.zoo);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("objective: {}", e.what()));
  }
}

Schedule make_method_schedule(const ExperimentConfig& config, const MethodSpec& method,
                              const Objective& f) {
  ScheduleParams p;
  p.alpha = method.c * step_factor(config.step_scale_by, method, config.dim, f);
  p.h = config.smoothing_scale * smoothing_factor(config.smoothing_scale_by, config.dim);
  p.dim = config.dim;
  p.l = method.l;
  p.L0 = f.L0;
  p.L1 = f.L1;
  switch (config.schedule) {
    case ScheduleKind::Power:
      p.theta = config.step_exponent;
      p.rho = config.smoothing_exponent;
      break;
    case ScheduleKind::Constant:
      if (config.step_exponent != 0.0)
        throw ConfigError("step.exponent: must be 0 for a constant schedule");
      p.rho = config.smoothing_exponent;
      break;
    case ScheduleKind::SmoothCapped:
      if (config.step_exponent != 0.0)
        throw ConfigError("step.exponent: must be 0 for smooth-capped");
      p.theta = config.smoothing_exponent;
      break;
    default:
      throw ConfigError(fmt::format("schedule: '{}' needs a horizon and is library-only",
                                    to_string(config.schedule)));
  }
  try {
    return Schedule::make(config.schedule, p);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("schedule ({}): {}", method.label(), e.what()));
  }
}

const Series& SummaryStats::at(const std::string& label) const {
  for (const auto& s : series)
    if (s.label == label) return s;
  throw ConfigError(fmt::format("no series '{}' in '{}'", label, name));
}

std::string format_series_csv(const Series& s) {
  std::string out = "eval_index,mean_gap,std_gap\n";
  for (std::size_t i = 0; i < s.mean_gap.size(); ++i)
    out += fmt::format("{},{},{}\n", i + 1, g17(s.mean_gap[i]), g17(s.std_gap[i]));
  return out;
}

std::string format_final_csv(const SummaryStats& summary) {
  std::string out = "series,repetition,final_gap\n";
  for (const auto& s : summary.series)
    for (std::size_t r = 0; r < s.final_gaps.size(); ++r)
      out += fmt::format("{},{},{}\n", s.label, r, g17(s.final_gaps[r]));
  return out;
}

SummaryStats run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto reps = static_cast<std::size_t>(config.repetitions);
  const auto nm = config.methods.size();
  const auto budget = static_cast<std::size_t>(config.budget);

  // gaps[m][r] holds the padded per-evaluation trace, empty when the run failed
  std::vector<std::vector<std::vector<double>>> gaps(nm, std::vector<std::vector<double>>(reps));
  std::vector<std::vector<std::string>> errors(nm, std::vector<std::string>(reps));
  std::vector<std::vector<double>> finals(
      nm, std::vector<double>(reps, std::numeric_limits<double>::quiet_NaN()));
  std::vector<std::string> setup_errors(reps);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t ri = 0; ri < static_cast<std::int64_t>(reps); ++ri) {
    const auto r = static_cast<std::size_t>(ri);
    const std::uint64_t seed = config.seed + r;
    Objective f;
    try {
      f = make_experiment_objective(config, static_cast<int>(r));
    } catch (const std::exception& e) {
      setup_errors[r] = e.what();
      continue;
    }
    const Vec x0 = Vec::Constant(config.dim, config.x0);
    for (std::size_t m = 0; m < nm; ++m) {
      const auto& method = config.methods[m];
      try {
        const auto schedule = make_method_schedule(config, method, f);
        const RngStream rng(seed, stream_id_for(method.label()));
        RunTrace trace;
        if (method.family == "ozd") {
          RunOptions o;
          o.estimator = config.estimator;
          o.l = method.l;
          o.generator = config.generator;
          o.budget = config.budget;
          trace = run_ozd(f, x0, schedule, o, rng);
        } else {
          const auto kind =
              method.family == "gaussian" ? BaselineKind::Gaussian : BaselineKind::Spherical;
          trace = run_baseline(f, x0, schedule, method.l, kind, config.budget, rng);
        }
        if (!std::isfinite(trace.final_gap))
          throw EstimationError("final iterate has a non-finite objective value", trace.state.x);
        auto g = std::move(trace.gap);
        g.resize(budget, trace.final_gap);
        gaps[m][r] = std::move(g);
        finals[m][r] = trace.final_gap;
      } catch (const EstimationError& e) {
        errors[m][r] = e.what();
      }
    }
  }
  for (const auto& e : setup_errors)
    if (!e.empty()) throw ConfigError(e);

  SummaryStats summary;
  summary.name = config.name;
  summary.budget = config.budget;
  summary.directory = config.out / config.name;
  for (std::size_t m = 0; m < nm; ++m) {
    Series s;
    s.label = config.methods[m].label();
    s.final_gaps = finals[m];
    std::vector<const std::vector<double>*> ok;
    for (std::size_t r = 0; r < reps; ++r) {
      if (gaps[m][r].empty()) {
        ++s.failures;
        summary.failures.push_back({s.label, static_cast<int>(r), errors[m][r]});
      } else {
        ok.push_back(&gaps[m][r]);
      }
    }
    if (!ok.empty()) {
      s.mean_gap.resize(budget);
      s.std_gap.resize(budget);
      std::vector<double> column(ok.size());
      for (std::size_t i = 0; i < budget; ++i) {
        for (std::size_t j = 0; j < ok.size(); ++j) column[j] = (*ok[j])[i];
        s.mean_gap[i] = stats::mean(column);
        s.std_gap[i] = column.size() > 1 ? stats::stddev(column) : 0.0;
      }
    }
    summary.series.push_back(std::move(s));
  }

  fs::create_directories(summary.directory);
  json series = json::array();
  for (std::size_t m = 0; m < nm; ++m) {
    const auto& s = summary.series[m];
    const auto& method = config.methods[m];
    const std::string file = method.file_stem() + ".csv";
    if (!s.mean_gap.empty()) write_file(summary.directory / file, format_series_csv(s));
    const auto schedule = make_method_schedule(config, method, make_experiment_objective(config, 0));
    series.push_back({{"label", s.label},
                      {"file", s.mean_gap.empty() ? json(nullptr) : json(file)},
                      {"c", method.c},
                      {"schedule", schedule.describe()},
                      {"failed_repetitions", s.failures}});
  }
  write_file(summary.directory / "final.csv", format_final_csv(summary));

  json failures = json::array();
  for (const auto& f : summary.failures)
    failures.push_back({{"series", f.label}, {"repetition", f.repetition}, {"error", f.message}});
  json raw = json::object();
  for (const auto& [k, v] : config.raw) raw[k] = v;
  const json meta = {
      {"name", config.name},
      {"library_version", OZD_VERSION},
      {"created_utc", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}",
                                  fmt::gmtime(std::chrono::system_clock::to_time_t(
                                      std::chrono::system_clock::now())))},
      {"source", config.source.string()},
      {"config", raw},
      {"resolved",
       {{"objective", config.objective},
        {"dim", config.dim},
        {"estimator", to_string(config.estimator)},
        {"generator", config.generator.name()},
        {"schedule", to_string(config.schedule)},
        {"budget", config.budget},
        {"repetitions", config.repetitions},
        {"seed", config.seed},
        {"x0", config.x0},
        {"repetition_seeds", "seed + r"},
        {"std", "sample standard deviation of the gap across repetitions, linear scale"}}},
      {"series", series},
      {"failures", failures},
      {"status", summary.failures.empty() ? "ok" : "objective-failure"}};
  write_file(summary.directory / "metadata.json", meta.dump(2) + "\n");
  return summary;
}

SummaryStats load_summary(const fs::path& path) {
  const fs::path meta_path = fs::is_directory(path) ? path / "metadata.json" : path;
  const fs::path dir = meta_path.parent_path();
  json meta;
  try {
    meta = json::parse(read_file(meta_path));
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", meta_path.string(), e.what()));
  }
  SummaryStats summary;
  summary.directory = dir;
  summary.name = meta.value("name", "");
  summary.budget = meta.at("resolved").value("budget", std::int64_t{0});
  for (const auto& item : meta.at("series")) {
    Series s;
    s.label = item.at("label").get<std::string>();
    s.failures = item.value("failed_repetitions", 0);
    if (!item.at("file").is_null()) {
      std::istringstream in(read_file(dir / item.at("file").get<std::string>()));
      std::string line;
      std::getline(in, line);
      if (trim(line) != "eval_index,mean_gap,std_gap")
        throw ConfigError(fmt::format("{}: unexpected header '{}'", s.label, line));
      while (std::getline(in, line)) {
        const auto cols = split_list(line);
        if (cols.size() != 3) throw ConfigError(fmt::format("{}: malformed row '{}'", s.label, line));
        s.mean_gap.push_back(to_double("mean_gap", cols[1]));
        s.std_gap.push_back(to_double("std_gap", cols[2]));
      }
    }
    summary.series.push_back(std::move(s));
  }
  if (summary.series.empty()) throw ConfigError("summary has no series");
  return summary;
}

namespace {
constexpr double kLogFloor = 1e-16;
}

std::string format_plot_data(const SummaryStats& summary, PlotStyle style) {
  std::vector<const Series*> present;
  for (const auto& s : summary.series)
    if (!s.mean_gap.empty()) present.push_back(&s);
  if (present.empty()) throw ConfigError("summary has no data to plot");
  std::size_t rows = 0;
  for (const auto* s : present) rows = std::max(rows, s->mean_gap.size());

  bool clamped = false;
  std::string body;
  for (std::size_t i = 0; i < rows; ++i) {
    body += fmt::format("{}", i + 1);
    for (const auto* s : present) {
      if (i >= s->mean_gap.size()) {
        body += ",,";
        continue;
      }
      double mean = s->mean_gap[i];
      if (style == PlotStyle::LogY && mean < kLogFloor) {
        mean = kLogFloor;
        clamped = true;
      }
      body += fmt::format(",{},{}", g17(mean), g17(s->std_gap[i]));
    }
    body += "\n";
  }
  std::string out;
  if (style == PlotStyle::LogY)
    out += clamped ? fmt::format("# log-y: mean values below {} clamped to {}\n", kLogFloor, kLogFloor)
                   : std::string("# log-y\n");
  out += "eval_index";
  for (const auto* s : present) out += fmt::format(",{}_mean,{}_std", s->label, s->label);
  out += "\n";
  return out + body;
}

std::string render_svg(const SummaryStats& summary, PlotStyle style) {
  constexpr double W = 640, H = 400, L = 60, R = 150, T = 20, B = 40;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  double lo = INFINITY, hi = -INFINITY;
  std::size_t n = 1;
  auto tr = [&](double v) {
    return style == PlotStyle::LogY ? std::log10(std::max(v, kLogFloor)) : v;
  };
  for (const auto& s : summary.series) {
    n = std::max(n, s.mean_gap.size());
    for (std::size_t i = 0; i < s.mean_gap.size(); ++i) {
      lo = std::min(lo, tr(s.mean_gap[i] - (style == PlotStyle::LogY ? 0.0 : s.std_gap[i])));
      hi = std::max(hi, tr(s.mean_gap[i] + s.std_gap[i]));
    }
  }
  if (!(hi > lo)) hi = lo + 1.0;
  auto px = [&](std::size_t i) { return L + (W - L - R) * double(i) / double(std::max<std::size_t>(n - 1, 1)); };
  auto py = [&](double v) { return T + (H - T - B) * (hi - tr(v)) / (hi - lo); };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n"
      "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n"
      "<text x=\"{}\" y=\"{}\" font-size=\"12\">function evaluations</text>\n"
      "<text x=\"5\" y=\"{}\" font-size=\"12\">{}</text>\n",
      W, H, L, H - B, W - R, H - B, L, T, L, H - B, (W - R) / 2, H - 8, T + 10,
      style == PlotStyle::LogY ? fmt::format("1e{:.1f}", hi) : fmt::format("{:.3g}", hi));
  svg += fmt::format("<text x=\"5\" y=\"{}\" font-size=\"12\">{}</text>\n", H - B,
                     style == PlotStyle::LogY ? fmt::format("1e{:.1f}", lo) : fmt::format("{:.3g}", lo));
  const std::size_t stride = std::max<std::size_t>(1, n / 400);
  for (std::size_t k = 0; k < summary.series.size(); ++k) {
    const auto& s = summary.series[k];
    if (s.mean_gap.empty()) continue;
    const char* color = colors[k % 6];
    std::string upper, lower, line;
    for (std::size_t i = 0; i < s.mean_gap.size(); i += stride) {
      upper += fmt::format("{:.1f},{:.1f} ", px(i), py(s.mean_gap[i] + s.std_gap[i]));
      line += fmt::format("{:.1f},{:.1f} ", px(i), py(s.mean_gap[i]));
    }
    for (std::size_t i = (s.mean_gap.size() - 1) / stride * stride + 1; i-- > 0;)
      if (i % stride == 0)
        lower += fmt::format("{:.1f},{:.1f} ", px(i), py(std::max(s.mean_gap[i] - s.std_gap[i],
                                                                style == PlotStyle::LogY ? kLogFloor : -INFINITY)));
    svg += fmt::format("<polygon points=\"{}{}\" fill=\"{}\" fill-opacity=\"0.2\" stroke=\"none\"/>\n",
                       upper, lower, color);
    svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\"/>\n", line, color);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{}\">{}</text>\n", W - R + 10,
                       T + 16 * (k + 1), color, s.label);
  }
  return svg + "</svg>\n";
}

fs::path emit_plot_data(const SummaryStats& summary, PlotStyle style,
                        const std::optional<fs::path>& out) {
  const fs::path dir = out.value_or(summary.directory);
  fs::create_directories(dir);
  const fs::path csv = dir / "plot.csv";
  write_file(csv, format_plot_data(summary, style));
  write_file(dir / "plot.svg", render_svg(summary, style));
  return csv;
}

}  // namespace ozd
