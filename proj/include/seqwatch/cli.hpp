// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: design | calibrate | simulate | table.
//
// Settings come from an optional key=value file (--config) and from flags;
// both land in one map of canonical keys, flags last, and are then validated
// as a whole before anything is computed.
//
//   exit 0  success
//   exit 1  computation failure (e.g. calibration did not converge)
//   exit 2  usage error

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "seqwatch/calibrate.hpp"
#include "seqwatch/charts.hpp"
#include "seqwatch/covariance.hpp"
#include "seqwatch/design.hpp"
#include "seqwatch/simulate.hpp"
#include "seqwatch/tables.hpp"

namespace seqwatch::cli {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Command { Design, Calibrate, Simulate, Table };

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what, int code = 2) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

struct RunConfig {
  Command command = Command::Simulate;
  std::uint64_t seed = 1;
  std::int64_t reps = 10000;
  std::size_t threads = 1;
  std::optional<std::string> out;

  ChartConfig chart{};
  bool threshold_given = false;
  bool beta_given = false;
  std::size_t n = 20;
  CovKind cov = CovKind::Identity;
  double sigma_e2 = 1.0;
  double theta = 0.0;
  std::optional<std::vector<double>> gamma;

  std::optional<MeanPattern> pattern;
  std::int64_t nu = 100;
  std::int64_t horizon = kDefaultHorizon;
  int row_table_id = 0;

  double arl0 = 1000.0;
  std::optional<double> signal;
  bool corrected = true;
  design::ArlForm form = design::ArlForm::Integral;
  int table_id = 0;

  CovModel model() const {
    if (cov == CovKind::Loading) return CovModel::loading(sigma_e2, theta, gamma.value_or(std::vector<double>{}));
    return CovModel::build(cov, n, sigma_e2, theta);
  }

  Condition condition() const {
    Condition c;
    c.table_id = row_table_id;
    c.cfg = chart;
    c.n = n;
    c.cov = cov;
    c.sigma_e2 = sigma_e2;
    c.theta = theta;
    c.pattern = pattern;
    c.nu = nu;
    c.horizon = horizon;
    return c;
  }
};

namespace detail {

struct KeySpec {
  const char* key;
  const char* flag;
  const char* help;
};

inline const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      {"seed", "--seed", "master random seed (default 1)"},
      {"reps", "--reps", "Monte-Carlo replications (default 10000)"},
      {"threads", "--threads", "worker threads (default $SEQWATCH_THREADS or all cores)"},
      {"out", "--out", "output file (default stdout)"},
      {"design.arl0", "--arl0", "target in-control ARL (default 1000)"},
      {"design.signal", "--signal", "reference signal strength delta' Sigma^-1 delta"},
      {"design.corrected", "--corrected", "apply the boundary correction: true|false (default true)"},
      {"design.form", "--form", "MEWMA ARL approximation: integral|closed (default integral)"},
      {"table.id", "--id", "table to reproduce, 1..5"},
      {"chart.type", "--chart", "mewma|mewma0|mma|mcusum|rcusum|glrt|sr|sum-sr|acusum|asr|asum-sr"},
      {"chart.beta", "--beta", "EWMA weight (default 0.05)"},
      {"chart.threshold", "--threshold", "alarm limit in statistic units"},
      {"chart.window", "--window", "window length w or W"},
      {"chart.k", "--k", "reference value k or per-channel delta (default 0.5)"},
      {"chart.mode", "--mode", "none|hard|soft"},
      {"chart.s", "--s", "hard-threshold level s (default 0.5)"},
      {"chart.q", "--q", "soft-threshold odds q (default 9)"},
      {"cov.kind", "--cov", "identity|intraclass|loading"},
      {"cov.n", "--n", "number of channels N (default 20)"},
      {"cov.sigma_e2", "--sigma-e2", "idiosyncratic variance (default 1)"},
      {"cov.theta", "--theta", "factor-to-noise variance ratio (default 0)"},
      {"cov.gamma", "--gamma", "loading vector, comma separated"},
      {"scenario.pattern", "--pattern", "single|uniform|ksparse|harmonic (omit for a null run)"},
      {"scenario.mu", "--mu", "signal strength"},
      {"scenario.K", "--K", "changed channels for ksparse"},
      {"scenario.nu", "--nu", "change point (default 100)"},
      {"scenario.horizon", "--horizon", "censoring horizon (default 100000)"},
      {"scenario.table_id", "--table-id", "table_id written in simulate rows (default 0)"},
  };
  return specs;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline bool known_key(const std::string& key) {
  if (key == "command") return true;
  for (const auto& s : key_specs())
    if (key == s.key) return true;
  return false;
}

/// Reads a key=value file; '#' starts a comment line.
inline void read_config_file(const std::string& path, std::map<std::string, std::string>& kv) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (!known_key(key)) throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    kv[key] = trim(std::string_view(t).substr(eq + 1));
  }
}

template <class F>
auto convert(const std::string& key, const std::string& value, F f) {
  try {
    return f(value);
  } catch (const std::exception& e) {
    throw UsageError("invalid value for " + key + ": " + e.what());
  }
}

inline double to_double(const std::string& key, const std::string& v) {
  return convert(key, v, [&](const std::string& s) { return parse_double(s, key.c_str()); });
}

inline std::int64_t to_int(const std::string& key, const std::string& v) {
  return convert(key, v, [&](const std::string& s) { return parse_int(s, key.c_str()); });
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("invalid value for " + key + ": expected true or false");
}

inline RunConfig resolve(std::map<std::string, std::string> kv) {
  RunConfig c;
  auto take = [&](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  const auto cmd = take("command");
  if (!cmd) throw UsageError("missing command (design, calibrate, simulate or table)");
  if (*cmd == "design") c.command = Command::Design;
  else if (*cmd == "calibrate") c.command = Command::Calibrate;
  else if (*cmd == "simulate") c.command = Command::Simulate;
  else if (*cmd == "table") c.command = Command::Table;
  else throw UsageError("unknown command '" + *cmd + "'");

  if (auto v = take("seed")) {
    const std::int64_t s = to_int("seed", *v);
    if (s < 0) throw UsageError("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = take("reps")) c.reps = to_int("reps", *v);
  if (c.reps < 1) throw UsageError("reps must be positive");
  c.threads = default_threads();
  if (auto v = take("threads")) {
    const std::int64_t t = to_int("threads", *v);
    if (t < 1) throw UsageError("threads must be positive");
    c.threads = static_cast<std::size_t>(t);
  }
  c.out = take("out");

  if (auto v = take("design.arl0")) c.arl0 = to_double("design.arl0", *v);
  if (!(c.arl0 > 1.0) || !std::isfinite(c.arl0)) throw UsageError("arl0 must be a finite number above 1");
  if (auto v = take("design.signal")) {
    c.signal = to_double("design.signal", *v);
    if (!(*c.signal > 0.0)) throw UsageError("signal must be positive");
  }
  if (auto v = take("design.corrected")) c.corrected = to_bool("design.corrected", *v);
  if (auto v = take("design.form")) {
    if (*v == "integral") c.form = design::ArlForm::Integral;
    else if (*v == "closed") c.form = design::ArlForm::Closed;
    else throw UsageError("form must be integral or closed");
  }
  if (auto v = take("table.id")) c.table_id = static_cast<int>(to_int("table.id", *v));
  if (c.command == Command::Table && (c.table_id < 1 || c.table_id > 5))
    throw UsageError("table needs --id between 1 and 5");

  if (auto v = take("chart.type"))
    c.chart.variant = convert("chart.type", *v, [](const std::string& s) { return parse_variant(s); });
  c.beta_given = kv.count("chart.beta") > 0;
  if (auto v = take("chart.beta")) c.chart.beta = to_double("chart.beta", *v);
  if (auto v = take("chart.threshold")) {
    c.chart.threshold = to_double("chart.threshold", *v);
    c.threshold_given = true;
  }
  if (auto v = take("chart.window")) {
    const std::int64_t w = to_int("chart.window", *v);
    if (w < 1) throw UsageError("window must be at least 1");
    c.chart.window = static_cast<std::size_t>(w);
  } else if (uses_window(c.chart.variant)) {
    c.chart.window = 20;
  }
  if (auto v = take("chart.k")) c.chart.k_ref = to_double("chart.k", *v);
  if (auto v = take("chart.mode"))
    c.chart.mode = convert("chart.mode", *v, [](const std::string& s) { return parse_threshold_mode(s); });
  if (auto v = take("chart.s")) c.chart.trim = to_double("chart.s", *v);
  if (auto v = take("chart.q")) c.chart.odds = to_double("chart.q", *v);

  if (auto v = take("cov.kind"))
    c.cov = convert("cov.kind", *v, [](const std::string& s) { return parse_cov_kind(s); });
  if (auto v = take("cov.n")) {
    const std::int64_t n = to_int("cov.n", *v);
    if (n < 1) throw UsageError("n must be positive");
    c.n = static_cast<std::size_t>(n);
  }
  if (auto v = take("cov.sigma_e2")) c.sigma_e2 = to_double("cov.sigma_e2", *v);
  if (auto v = take("cov.theta")) c.theta = to_double("cov.theta", *v);
  if (auto v = take("cov.gamma")) {
    std::vector<double> g;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) g.push_back(to_double("cov.gamma", trim(item)));
    c.gamma = g;
    if (c.cov == CovKind::Loading) c.n = g.size();
  }

  const auto pattern = take("scenario.pattern");
  const auto mu = take("scenario.mu");
  const auto k = take("scenario.K");
  if (pattern) {
    MeanPattern p;
    p.kind = convert("scenario.pattern", *pattern, [](const std::string& s) { return parse_pattern(s); });
    if (!mu) throw UsageError("scenario.pattern needs scenario.mu");
    p.strength = to_double("scenario.mu", *mu);
    if (k) p.k = static_cast<std::size_t>(to_int("scenario.K", *k));
    else if (p.kind == PatternKind::KSparse) throw UsageError("ksparse pattern needs scenario.K");
    if (p.kind != PatternKind::KSparse) p.k = 1;
    c.pattern = p;
  } else if (mu || k) {
    throw UsageError("scenario.mu and scenario.K need scenario.pattern");
  }
  if (auto v = take("scenario.nu")) c.nu = to_int("scenario.nu", *v);
  if (c.nu < 0) throw UsageError("nu must be non-negative");
  if (auto v = take("scenario.horizon")) c.horizon = to_int("scenario.horizon", *v);
  if (c.horizon < 1) throw UsageError("horizon must be positive");
  if (auto v = take("scenario.table_id")) c.row_table_id = static_cast<int>(to_int("scenario.table_id", *v));

  if (!kv.empty()) throw UsageError("unknown key '" + kv.begin()->first + "'");

  // Fail on inconsistent combinations before any computation.
  if (c.command != Command::Table) {
    try {
      const CovModel model = c.model();
      validate(c.chart, model);
      if (c.pattern) mean_vector(*c.pattern, model.n());
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (c.command == Command::Design && uses_beta(c.chart.variant) && !(c.chart.beta < 1.0) && c.beta_given)
      throw UsageError("design needs beta < 1");
  }
  if (c.command == Command::Simulate && !c.threshold_given) throw UsageError("simulate needs --threshold");
  return c;
}

}  // namespace detail

inline std::string usage() {
  std::ostringstream os;
  os << "usage: seqwatch <design|calibrate|simulate|table> [options]\n\n"
     << "  design     threshold and delay predictions from the ARL approximations\n"
     << "  calibrate  threshold whose simulated ARL0 matches --arl0\n"
     << "  simulate   ARL0 (no --pattern) or FAR/SADDT for one scenario, as a CSV row\n"
     << "  table      reproduce comparison table --id 1..5 as CSV\n\n"
     << "options:\n"
     << "  --config FILE  key=value settings (keys as listed in brackets); flags override\n";
  for (const auto& s : detail::key_specs()) {
    std::string flag = s.flag;
    flag.resize(std::max<std::size_t>(flag.size(), 13), ' ');
    os << "  " << flag << "  " << s.help << " [" << s.key << "]\n";
  }
  os << "\nexit status: 0 success, 1 computation failure, 2 usage error\n";
  return os.str();
}

/// Parses argv (argv[0] is the program name). Throws UsageError; --help gives code 0.
inline RunConfig parse_args(const std::vector<std::string>& args) {
  if (args.size() <= 1) throw UsageError(usage());

  CLI::App app{"seqwatch", "seqwatch"};
  app.set_help_flag();
  bool help = false;
  app.add_flag("-h,--help", help);
  std::string command;
  app.add_option("command", command);
  std::string config_path;
  app.add_option("--config", config_path);
  std::map<std::string, std::string> flag_values;
  std::vector<std::pair<const char*, std::string>> slots;
  slots.reserve(detail::key_specs().size());
  for (const auto& s : detail::key_specs()) slots.emplace_back(s.key, std::string());
  for (std::size_t i = 0; i < slots.size(); ++i)
    app.add_option(detail::key_specs()[i].flag, slots[i].second);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    throw UsageError(std::string(e.what()) + "\n\n" + usage());
  }
  if (help) throw UsageError(usage(), 0);

  std::map<std::string, std::string> kv;
  if (!config_path.empty()) detail::read_config_file(config_path, kv);
  if (!command.empty()) kv["command"] = command;
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (app.get_option(detail::key_specs()[i].flag)->count() > 0) kv[slots[i].first] = slots[i].second;
  return detail::resolve(std::move(kv));
}

inline RunConfig parse_args(int argc, const char* const* argv) {
  return parse_args(std::vector<std::string>(argv, argv + argc));
}

namespace detail {

inline std::string metadata(const RunConfig& c) {
  static const char* names[] = {"design", "calibrate", "simulate", "table"};
  std::string m = "# seqwatch " + std::string(kVersion) + " command=" + names[static_cast<int>(c.command)] +
                  " seed=" + std::to_string(c.seed) + " reps=" + std::to_string(c.reps);
  if (c.command == Command::Table) m += " table=" + std::to_string(c.table_id);
  return m + "\n";
}

inline constexpr std::string_view kDesignHeader =
    "chart,method,n,arl0_target,beta,window,limit,limit_star,threshold,predicted_arl0,predicted_saddt,note";

inline std::string design_line(const design::DesignResult& r, const RunConfig& c, double limit_star) {
  auto opt = [](const std::optional<double>& v) { return v ? format_sig6(*v) : std::string(); };
  std::string saddt = r.inefficient ? "inefficient" : opt(r.predicted_saddt);
  std::string note;
  for (const auto& n : r.notes) {
    if (!note.empty()) note += "; ";
    note += n;
  }
  for (char& ch : note)
    if (ch == ',') ch = ';';
  std::ostringstream os;
  os << to_string(r.chart) << ',' << design::to_string(r.method) << ',' << c.n << ',' << format_sig6(c.arl0) << ','
     << opt(r.beta) << ',' << opt(r.window) << ',' << format_sig6(r.limit) << ',' << format_sig6(limit_star) << ','
     << format_sig6(r.threshold) << ',' << format_sig6(r.predicted_arl0) << ',' << saddt << ',' << note;
  return os.str();
}

inline void set_saddt(design::DesignResult& r, std::optional<double> v) {
  r.predicted_saddt = v;
  r.inefficient = !v.has_value();
}

/// Analytic design for c.chart; returns the result and b* (the corrected MEWMA boundary).
inline std::pair<design::DesignResult, double> run_design(const RunConfig& c) {
  using namespace design;
  DesignResult r;
  r.chart = c.chart.variant;
  const double log_arl = std::log(c.arl0);
  switch (c.chart.variant) {
    case Variant::Mewma:
    case Variant::Mewma0: {
      if (c.chart.mode != ThresholdMode::None)
        throw UsageError("no analytic design for thresholded EWMA; use calibrate");
      if (c.signal && !c.beta_given) {
        r = optimal_mewma(c.n, c.arl0, *c.signal);
        r.chart = c.chart.variant;
        return {r, r.limit};
      }
      const double beta = c.chart.beta;
      const double b = solve_mewma_threshold(c.n, beta, c.arl0, c.corrected, c.form);
      r.method = c.form == ArlForm::Integral ? Method::Quadrature : Method::ClosedForm;
      r.limit = b;
      r.beta = beta;
      r.threshold = mewma_threshold(b, beta);
      r.predicted_arl0 = arl0_mewma(c.n, beta, b, c.corrected, c.form);
      if (c.signal) set_saddt(r, saddt_mewma(beta, b, *c.signal));
      const double star = c.corrected ? b + boundary_correction(beta) : b;
      if (c.corrected) r.notes.push_back("limit is the raw b; limit_star = b + boundary correction");
      return {r, star};
    }
    case Variant::Mma: {
      if (c.chart.mode != ThresholdMode::None) throw UsageError("no analytic design for thresholded MA; use calibrate");
      if (c.signal) {
        r = design_mma(c.n, c.arl0, *c.signal);
        r.notes.push_back("first-order optimum; predicted_arl0 is the MMA approximation at the fractional window");
        return {r, r.limit};
      }
      const double w = static_cast<double>(c.chart.window);
      const auto f = [&](double h) { return std::log(arl0_mma(c.n, w, h)) - log_arl; };
      const double lo = std::sqrt(static_cast<double>(c.n) / w);
      const double h = design::detail::bisect_increasing(f, lo, lo + 50.0, 1e-9, "MMA threshold");
      r.method = Method::ClosedForm;
      r.limit = h;
      r.threshold = h * h;
      r.window = w;
      r.predicted_arl0 = arl0_mma(c.n, w, h);
      return {r, h};
    }
    case Variant::McusumWindowed: {
      const double d = solve_mcusum_threshold(c.n, c.chart.k_ref, c.arl0);
      r.method = Method::ClosedForm;
      r.limit = r.threshold = d;
      r.window = static_cast<double>(c.chart.window);
      r.predicted_arl0 = arl0_mcusum(c.n, c.chart.k_ref, d);
      if (c.signal) set_saddt(r, saddt_mcusum(c.chart.k_ref, std::sqrt(*c.signal), c.arl0));
      r.notes.push_back("formula is loose at moderate N; calibrate by simulation");
      return {r, d};
    }
    case Variant::Glrt: {
      const double w = static_cast<double>(c.chart.window);
      const double b = solve_glrt_threshold(c.n, w, c.arl0);
      r.method = Method::ClosedForm;
      r.limit = b;
      r.threshold = b * b;
      r.window = w;
      r.predicted_arl0 = arl0_glrt(c.n, b, w);
      if (c.signal) set_saddt(r, saddt_glrt(*c.signal, c.arl0));
      r.notes.push_back("first-order formula; calibrate by simulation for the final limit");
      return {r, b};
    }
    case Variant::SrMixture:
    case Variant::SumSr: {
      const bool mixture = c.chart.variant == Variant::SrMixture;
      const double delta = mixture ? c.chart.k_ref * std::sqrt(static_cast<double>(c.n)) : c.chart.k_ref;
      const auto th = sr_thresholds(c.n, c.arl0, delta);
      r.method = Method::ClosedForm;
      r.limit = r.threshold = mixture ? th.mixture : th.sum;
      r.predicted_arl0 = c.arl0;
      return {r, r.limit};
    }
    default:
      throw UsageError("no analytic design for chart '" + std::string(to_string(c.chart.variant)) +
                       "'; use calibrate");
  }
}

/// Starting stop level for calibration: the user's threshold, else a low analytic guess.
inline double calibration_start(const RunConfig& c) {
  if (c.threshold_given) return c.chart.threshold;
  switch (c.chart.variant) {
    case Variant::Mewma:
    case Variant::Mewma0:
      if (c.chart.mode == ThresholdMode::None && c.chart.beta < 1.0) return 0.8 * run_design(c).first.threshold;
      break;
    case Variant::Mma:
      if (c.chart.mode == ThresholdMode::None) return 0.8 * run_design(c).first.threshold;
      break;
    case Variant::McusumWindowed:
    case Variant::McusumRecursive: return std::log(c.arl0) / c.chart.k_ref;
    case Variant::Glrt: return 0.8 * run_design(c).first.threshold;
    case Variant::SrMixture:
    case Variant::SumSr: return 0.5 * run_design(c).first.threshold;
    default: break;
  }
  throw UsageError("calibrate needs a starting --threshold for this chart");
}

}  // namespace detail

/// Runs a validated configuration, writing CSV to `out`. Returns the exit code.
inline int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    std::ostringstream body;
    body << detail::metadata(c);
    switch (c.command) {
      case Command::Design: {
        const auto [r, star] = detail::run_design(c);
        body << detail::kDesignHeader << '\n' << detail::design_line(r, c, star) << '\n';
        break;
      }
      case Command::Calibrate: {
        ChartConfig cfg = c.chart;
        cfg.threshold = detail::calibration_start(c);
        const auto r = calibrate_by_simulation(cfg, c.model(), c.arl0, std::max<std::int64_t>(c.reps, 1000), c.seed,
                                               c.threads);
        body << detail::kDesignHeader << '\n' << detail::design_line(r, c, r.limit) << '\n';
        break;
      }
      case Command::Simulate: {
        if (c.cov == CovKind::Loading) throw UsageError("simulate rows do not support the loading model");
        body << kCsvHeader << '\n' << to_csv_line(run_condition(c.condition(), c.reps, c.seed, c.threads)) << '\n';
        break;
      }
      case Command::Table: {
        body << kCsvHeader << '\n';
        for (const auto& row : reproduce_table(c.table_id, c.reps, c.seed, c.threads)) body << to_csv_line(row) << '\n';
        break;
      }
    }
    if (c.out) {
      std::ofstream f(*c.out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write '" + *c.out + "'");
      f << body.str();
      if (!f) throw std::runtime_error("write to '" + *c.out + "' failed");
    } else {
      out << body.str();
    }
    return 0;
  } catch (const UsageError& e) {
    err << "seqwatch: " << e.what() << '\n';
    return e.code();
  } catch (const std::invalid_argument& e) {
    err << "seqwatch: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "seqwatch: " << e.what() << '\n';
    return 1;
  }
}

/// Entry point shared by the executable and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  try {
    c = parse_args(args);
  } catch (const UsageError& e) {
    std::string msg = e.what();
    if (msg.empty() || msg.back() != '\n') msg += '\n';
    (e.code() == 0 ? out : err) << msg;
    return e.code();
  }
  return execute(c, out, err);
}

}  // namespace seqwatch::cli
