// SPDX-License-Identifier: Apache-2.0
//
// Simulation harnesses for the five comparison tables, and the CSV row format
// shared with the command-line tool.
//
// A Condition is one table cell group: chart, covariance, and either a null
// run or a change-point scenario. Each row's random seed is derived from the
// master seed and the row's own textual key, so any row can be recomputed in
// isolation from its printed fields.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "seqwatch/charts.hpp"
#include "seqwatch/covariance.hpp"
#include "seqwatch/design.hpp"
#include "seqwatch/rng.hpp"
#include "seqwatch/simulate.hpp"

namespace seqwatch {

struct Condition {
  int table_id = 0;
  ChartConfig cfg{};
  std::size_t n = 20;
  CovKind cov = CovKind::Identity;
  double sigma_e2 = 1.0;
  double theta = 0.0;
  std::optional<MeanPattern> pattern;  // nullopt: null run
  std::int64_t nu = 100;
  std::int64_t horizon = kDefaultHorizon;

  CovModel model() const {
    if (cov == CovKind::Loading) throw std::invalid_argument("condition: loading covariance is not supported in tables");
    return CovModel::build(cov, n, sigma_e2, cov == CovKind::Identity ? 0.0 : theta);
  }
};

struct CsvRow {
  int table_id = 0;
  std::string chart;
  std::string variant_params;
  double theta = 0.0;
  std::size_t k = 0;
  double mu = 0.0;
  std::int64_t reps = 0;
  Summary summary;
};

inline constexpr std::string_view kCsvHeader =
    "table_id,chart,variant_params,theta,K,mu,reps,arl0,arl0_se,far,saddt,saddt_se,censored";

// ---- number formatting ------------------------------------------------------

/// Shortest text that parses back to the same double.
inline std::string format_exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Six significant digits, C locale.
inline std::string format_sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline double parse_double(std::string_view s, const char* what) {
  double v = 0.0;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument(std::string("cannot parse ") + what + " '" + std::string(s) + "'");
  return v;
}

inline std::int64_t parse_int(std::string_view s, const char* what) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument(std::string("cannot parse ") + what + " '" + std::string(s) + "'");
  return v;
}

// ---- condition <-> text ------------------------------------------------------

/// Reported K: changed channels for the pattern, 0 for a null run.
inline std::size_t changed_channels(const Condition& c) {
  if (!c.pattern) return 0;
  switch (c.pattern->kind) {
    case PatternKind::SingleChannel: return 1;
    case PatternKind::KSparse: return c.pattern->k;
    default: return c.n;
  }
}

/// Semicolon-separated key=value list of everything but theta, K and mu.
inline std::string variant_params(const Condition& c) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("n", std::to_string(c.n));
  kv.emplace_back("cov", std::string(to_string(c.cov)));
  kv.emplace_back("sigma_e2", format_exact(c.sigma_e2));
  if (uses_beta(c.cfg.variant)) kv.emplace_back("beta", format_exact(c.cfg.beta));
  kv.emplace_back("threshold", format_exact(c.cfg.threshold));
  if (uses_window(c.cfg.variant)) kv.emplace_back("window", std::to_string(c.cfg.window));
  if (uses_k_ref(c.cfg.variant)) kv.emplace_back("k", format_exact(c.cfg.k_ref));
  if (c.cfg.mode == ThresholdMode::Hard) {
    kv.emplace_back("mode", "hard");
    kv.emplace_back("s", format_exact(c.cfg.trim));
  } else if (c.cfg.mode == ThresholdMode::Soft) {
    kv.emplace_back("mode", "soft");
    kv.emplace_back("q", format_exact(c.cfg.odds));
  }
  if (c.pattern) {
    kv.emplace_back("pattern", std::string(to_string(c.pattern->kind)));
    kv.emplace_back("nu", std::to_string(c.nu));
  }
  if (c.horizon != kDefaultHorizon) kv.emplace_back("horizon", std::to_string(c.horizon));
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += ';';
    out += k + '=' + v;
  }
  return out;
}

/// Textual identity of a condition; the per-row seed is derived from it.
inline std::string condition_key(const Condition& c) {
  return std::string(to_string(c.cfg.variant)) + ',' + variant_params(c) + ',' + format_exact(c.theta) +
         ',' + std::to_string(changed_channels(c)) + ',' + format_exact(c.pattern ? c.pattern->strength : 0.0);
}

/// Rebuilds a condition from the identifying CSV fields.
inline Condition condition_from_fields(int table_id, std::string_view chart, std::string_view params,
                                       double theta, std::size_t k, double mu) {
  Condition c;
  c.table_id = table_id;
  c.cfg.variant = parse_variant(chart);
  c.theta = theta;
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t pos = 0;
  while (pos <= params.size() && !params.empty()) {
    const std::size_t end = std::min(params.find(';', pos), params.size());
    const std::string_view item = params.substr(pos, end - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("malformed parameter '" + std::string(item) + "'");
    kv.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    pos = end + 1;
  }
  auto take = [&](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  if (auto v = take("n")) c.n = static_cast<std::size_t>(parse_int(*v, "n"));
  if (auto v = take("cov")) c.cov = parse_cov_kind(*v);
  if (auto v = take("sigma_e2")) c.sigma_e2 = parse_double(*v, "sigma_e2");
  if (auto v = take("beta")) c.cfg.beta = parse_double(*v, "beta");
  if (auto v = take("threshold")) c.cfg.threshold = parse_double(*v, "threshold");
  if (auto v = take("window")) c.cfg.window = static_cast<std::size_t>(parse_int(*v, "window"));
  if (auto v = take("k")) c.cfg.k_ref = parse_double(*v, "k");
  if (auto v = take("mode")) c.cfg.mode = parse_threshold_mode(*v);
  if (auto v = take("s")) c.cfg.trim = parse_double(*v, "s");
  if (auto v = take("q")) c.cfg.odds = parse_double(*v, "q");
  if (auto v = take("horizon")) c.horizon = parse_int(*v, "horizon");
  const auto pattern = take("pattern");
  const auto nu = take("nu");
  if (pattern) {
    MeanPattern p;
    p.kind = parse_pattern(*pattern);
    p.strength = mu;
    p.k = p.kind == PatternKind::KSparse ? k : 1;
    c.pattern = p;
    if (nu) c.nu = parse_int(*nu, "nu");
  }
  if (!kv.empty()) throw std::invalid_argument("unknown parameter '" + kv.begin()->first + "'");
  return c;
}

// ---- running and printing -----------------------------------------------------

inline CsvRow run_condition(const Condition& c, std::int64_t reps, std::uint64_t master_seed,
                            std::size_t threads = default_threads()) {
  const CovModel model = c.model();
  validate(c.cfg, model);
  const std::uint64_t seed = derive_seed(master_seed, condition_key(c));
  CsvRow row;
  row.table_id = c.table_id;
  row.chart = std::string(to_string(c.cfg.variant));
  row.variant_params = variant_params(c);
  row.theta = c.theta;
  row.k = changed_channels(c);
  row.mu = c.pattern ? c.pattern->strength : 0.0;
  row.reps = reps;
  if (!c.pattern) {
    row.summary = estimate_arl0(c.cfg, model, reps, seed, threads, c.horizon);
  } else {
    Scenario sc{model, c.nu, *c.pattern, c.horizon};
    row.summary = estimate_detection(c.cfg, sc, reps, seed, threads);
  }
  return row;
}

inline std::string to_csv_line(const CsvRow& r) {
  auto opt = [](const std::optional<double>& v) { return v ? format_sig6(*v) : std::string(); };
  std::ostringstream os;
  os << r.table_id << ',' << r.chart << ',' << r.variant_params << ',' << format_exact(r.theta) << ',' << r.k
     << ',' << format_exact(r.mu) << ',' << r.reps << ',' << opt(r.summary.arl0) << ','
     << opt(r.summary.arl0_se) << ',' << opt(r.summary.far) << ',' << opt(r.summary.saddt) << ','
     << opt(r.summary.saddt_se) << ',' << r.summary.censored;
  return os.str();
}

/// Parses the identifying columns of a CSV row back into a condition, plus its reps.
inline std::pair<Condition, std::int64_t> condition_from_csv(std::string_view line) {
  std::vector<std::string_view> f;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t end = line.find(',', pos);
    f.push_back(line.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  if (f.size() != 13) throw std::invalid_argument("CSV row must have 13 fields");
  Condition c = condition_from_fields(static_cast<int>(parse_int(f[0], "table_id")), f[1], f[2],
                                      parse_double(f[3], "theta"),
                                      static_cast<std::size_t>(parse_int(f[4], "K")), parse_double(f[5], "mu"));
  return {c, parse_int(f[6], "reps")};
}

// ---- table layouts ------------------------------------------------------------

namespace detail {

inline ChartConfig chart(Variant v, double threshold) {
  ChartConfig c;
  c.variant = v;
  c.threshold = threshold;
  return c;
}

inline ChartConfig windowed(Variant v, std::size_t w, double threshold, double k = 0.5) {
  ChartConfig c = chart(v, threshold);
  c.window = w;
  c.k_ref = k;
  return c;
}

inline ChartConfig with_mode(ChartConfig c, ThresholdMode m, double level) {
  c.mode = m;
  if (m == ThresholdMode::Hard) c.trim = level; else c.odds = level;
  return c;
}

inline constexpr double kStrengths[] = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};

/// Tables 1 and 2: N = 10, intra-class dependence with σ_e² + σ_a²/10 = 1.
inline std::vector<Condition> dependence_table(int id, Variant v) {
  struct Design { double beta, b; };
  const Design designs[] = {{0.01, 4.64}, {0.05, 5.14}, {0.1, 5.276}};
  const double shifts[] = {0.2, 0.3, 0.5, 0.6, 0.8, 0.9, 1.0};
  std::vector<Condition> out;
  for (const auto& d : designs) {
    for (int a = 0; a <= 5; ++a) {
      Condition c;
      c.table_id = id;
      c.n = 10;
      c.cov = CovKind::IntraClass;
      c.sigma_e2 = static_cast<double>(10 - a) / 10.0;
      c.theta = static_cast<double>(a) / c.sigma_e2;
      c.cfg = chart(v, design::mewma_threshold(d.b, d.beta));
      c.cfg.beta = d.beta;
      out.push_back(c);
      for (double mu : shifts) {
        c.pattern = MeanPattern{PatternKind::KSparse, mu, 10};
        out.push_back(c);
      }
    }
  }
  return out;
}

/// Null run plus every (strength, pattern) combination for each chart.
inline void sweep(std::vector<Condition>& out, int id, const ChartConfig& cfg,
                  const std::vector<MeanPattern>& patterns) {
  Condition c;
  c.table_id = id;
  c.cfg = cfg;
  out.push_back(c);
  for (const auto& p : patterns) {
    c.pattern = p;
    out.push_back(c);
  }
}

inline std::vector<MeanPattern> patterns(std::initializer_list<PatternKind> kinds) {
  std::vector<MeanPattern> out;
  for (double mu : kStrengths)
    for (auto k : kinds) out.push_back({k, mu, 1});
  return out;
}

inline std::vector<MeanPattern> sparse_patterns(std::initializer_list<std::size_t> ks) {
  std::vector<MeanPattern> out;
  for (double mu : kStrengths)
    for (auto k : ks) out.push_back({PatternKind::KSparse, mu, k});
  return out;
}

}  // namespace detail

/// Conditions of table `id` in row order. Throws std::invalid_argument for an unknown id.
inline std::vector<Condition> table_conditions(int id) {
  using detail::chart;
  using detail::windowed;
  using detail::with_mode;
  const double sr_delta = 0.5 / std::sqrt(20.0);
  std::vector<Condition> out;
  switch (id) {
    case 1: return detail::dependence_table(1, Variant::Mewma0);
    case 2: return detail::dependence_table(2, Variant::Mewma);
    case 3: {
      const auto both = detail::patterns({PatternKind::SingleChannel, PatternKind::Uniform});
      detail::sweep(out, 3, chart(Variant::Mewma, 1.07), both);
      detail::sweep(out, 3, windowed(Variant::Mma, 20, 2.1125), both);
      detail::sweep(out, 3, windowed(Variant::Glrt, 20, 50.1264), both);
      detail::sweep(out, 3, windowed(Variant::McusumWindowed, 20, 24.15), both);
      ChartConfig rc = chart(Variant::McusumRecursive, 31.0);
      detail::sweep(out, 3, rc, both);
      ChartConfig sr = chart(Variant::SrMixture, 747.29);
      sr.k_ref = sr_delta;
      detail::sweep(out, 3, sr,
                    detail::patterns({PatternKind::SingleChannel, PatternKind::Uniform, PatternKind::Harmonic}));
      return out;
    }
    case 4: {
      const auto ks = detail::sparse_patterns({1, 2, 3, 5});
      detail::sweep(out, 4, chart(Variant::Mewma, 1.07), ks);
      detail::sweep(out, 4, with_mode(chart(Variant::Mewma, 0.39), ThresholdMode::Hard, 0.5), ks);
      detail::sweep(out, 4, with_mode(chart(Variant::Mewma, 0.115), ThresholdMode::Soft, 9.0), ks);
      detail::sweep(out, 4, windowed(Variant::Mma, 20, 2.1125), ks);
      detail::sweep(out, 4, with_mode(windowed(Variant::Mma, 20, 1.26), ThresholdMode::Hard, 0.5), ks);
      ChartConfig sum = chart(Variant::SumSr, 14945.83);
      sum.k_ref = 0.5;
      detail::sweep(out, 4, sum, ks);
      ChartConfig sr = chart(Variant::SrMixture, 747.29);
      sr.k_ref = sr_delta;
      detail::sweep(out, 4, sr, ks);
      return out;
    }
    case 5: {
      const auto ks = detail::sparse_patterns({1, 2, 3, 5, 10});
      detail::sweep(out, 5, chart(Variant::Mewma, 1.07), ks);
      detail::sweep(out, 5, chart(Variant::AdaptiveSr, 545.0), ks);
      detail::sweep(out, 5, chart(Variant::AdaptiveCusum, 4.6), ks);
      detail::sweep(out, 5, chart(Variant::AdaptiveSumSr, 15050.0), ks);
      return out;
    }
    default: throw std::invalid_argument("table id must be 1..5");
  }
}

inline std::vector<CsvRow> reproduce_table(int id, std::int64_t reps, std::uint64_t seed,
                                           std::size_t threads = default_threads()) {
  std::vector<CsvRow> rows;
  for (const auto& c : table_conditions(id)) rows.push_back(run_condition(c, reps, seed, threads));
  return rows;
}

}  // namespace seqwatch
