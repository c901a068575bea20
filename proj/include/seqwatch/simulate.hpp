// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo engine: stream X_t = μ·I[t > ν] + Z_t into a chart until it
// alarms, and summarize the stopping times over many replications.
//
// Replication r draws from RandomStream(seed, r). Workers only decide which
// replications they run; per-replication results land in a vector indexed by
// r and are reduced serially, so a Summary is identical for any thread count.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "seqwatch/charts.hpp"
#include "seqwatch/covariance.hpp"
#include "seqwatch/rng.hpp"

namespace seqwatch {

enum class PatternKind { SingleChannel, Uniform, KSparse, Harmonic };

inline std::string_view to_string(PatternKind p) {
  switch (p) {
    case PatternKind::SingleChannel: return "single";
    case PatternKind::Uniform: return "uniform";
    case PatternKind::KSparse: return "ksparse";
    case PatternKind::Harmonic: return "harmonic";
  }
  return "?";
}

inline PatternKind parse_pattern(std::string_view s) {
  if (s == "single") return PatternKind::SingleChannel;
  if (s == "uniform") return PatternKind::Uniform;
  if (s == "ksparse") return PatternKind::KSparse;
  if (s == "harmonic") return PatternKind::Harmonic;
  throw std::invalid_argument("unknown mean pattern '" + std::string(s) + "'");
}

/// Post-change mean. For single/uniform/harmonic `strength` is the Euclidean
/// norm of μ; for ksparse it is the shift of each of the first K channels.
struct MeanPattern {
  PatternKind kind = PatternKind::SingleChannel;
  double strength = 0.0;
  std::size_t k = 1;
};

inline std::vector<double> mean_vector(const MeanPattern& p, std::size_t n) {
  if (!(p.strength >= 0.0)) throw std::invalid_argument("scenario: strength must be >= 0");
  std::vector<double> mu(n, 0.0);
  switch (p.kind) {
    case PatternKind::SingleChannel:
      mu[0] = p.strength;
      break;
    case PatternKind::Uniform:
      std::fill(mu.begin(), mu.end(), p.strength / std::sqrt(static_cast<double>(n)));
      break;
    case PatternKind::KSparse:
      if (p.k < 1 || p.k > n) throw std::invalid_argument("scenario: K must lie in [1, n]");
      std::fill(mu.begin(), mu.begin() + static_cast<std::ptrdiff_t>(p.k), p.strength);
      break;
    case PatternKind::Harmonic: {
      double norm2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) norm2 += 1.0 / static_cast<double>((i + 1) * (i + 1));
      const double scale = p.strength / std::sqrt(norm2);
      for (std::size_t i = 0; i < n; ++i) mu[i] = scale / static_cast<double>(i + 1);
      break;
    }
  }
  return mu;
}

inline constexpr std::int64_t kDefaultHorizon = 100000;

struct Scenario {
  CovModel model;
  std::optional<std::int64_t> nu;  // nullopt: no change ever (null run)
  MeanPattern pattern{};
  std::int64_t horizon_cap = kDefaultHorizon;

  std::size_t n() const { return model.n(); }
};

inline Scenario null_scenario(CovModel model, std::int64_t horizon_cap = kDefaultHorizon) {
  return Scenario{std::move(model), std::nullopt, MeanPattern{}, horizon_cap};
}

struct RunResult {
  std::int64_t tau = 0;          // alarm time, or horizon_cap when censored
  bool alarmed_pre_nu = false;   // τ ≤ ν
  bool censored = false;
};

struct Summary {
  std::int64_t reps = 0;
  std::int64_t censored = 0;
  std::int64_t detections = 0;     // runs with ν < τ that alarmed within the horizon
  std::optional<double> arl0;      // mean τ over null runs (censored runs count at the cap)
  std::optional<double> arl0_se;
  std::optional<double> tau_sd;    // sample sd of τ over null runs
  std::optional<double> far;       // P̂(τ ≤ ν)
  std::optional<double> saddt;     // mean(τ − ν | τ > ν)
  std::optional<double> saddt_se;
};

inline std::size_t default_threads() {
  if (const char* env = std::getenv("SEQWATCH_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

/// One replication on a chart that the caller has reset.
inline RunResult drive(Chart& chart, const Scenario& sc, std::span<const double> mu,
                       RandomStream& rng, std::vector<double>& x) {
  const std::int64_t nu = sc.nu.value_or(std::numeric_limits<std::int64_t>::max());
  for (std::int64_t t = 1; t <= sc.horizon_cap; ++t) {
    sc.model.sample_shock(rng, x);
    if (t > nu)
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += mu[i];
    if (chart.step(x).alarmed) return RunResult{t, t <= nu, false};
  }
  return RunResult{sc.horizon_cap, false, true};
}

/// Runs replications [0, reps) on `threads` workers; result r depends on (seed, r) only.
inline std::vector<RunResult> run_all(const ChartConfig& cfg, const Scenario& sc, std::int64_t reps,
                                      std::uint64_t seed, std::size_t threads) {
  if (reps < 1) throw std::invalid_argument("simulate: reps must be positive");
  const Chart prototype(cfg, sc.model);
  const std::vector<double> mu = mean_vector(sc.pattern, sc.n());
  std::vector<RunResult> results(static_cast<std::size_t>(reps));
  std::atomic<std::int64_t> next{0};
  constexpr std::int64_t kChunk = 16;

  auto worker = [&] {
    Chart chart = prototype;
    std::vector<double> x(sc.n());
    for (;;) {
      const std::int64_t begin = next.fetch_add(kChunk);
      if (begin >= reps) return;
      const std::int64_t end = std::min(begin + kChunk, reps);
      for (std::int64_t r = begin; r < end; ++r) {
        chart.reset();
        RandomStream rng(seed, static_cast<std::uint64_t>(r));
        results[static_cast<std::size_t>(r)] = drive(chart, sc, mu, rng, x);
      }
    }
  };

  threads = std::clamp<std::size_t>(threads, 1, static_cast<std::size_t>(reps));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return results;
}

inline void mean_se(const std::vector<double>& v, std::optional<double>& mean,
                    std::optional<double>& se, std::optional<double>* sd = nullptr) {
  if (v.empty()) return;
  double m = 0.0;
  for (double a : v) m += a;
  m /= static_cast<double>(v.size());
  mean = m;
  if (v.size() < 2) return;
  double ss = 0.0;
  for (double a : v) ss += (a - m) * (a - m);
  const double s = std::sqrt(ss / static_cast<double>(v.size() - 1));
  se = s / std::sqrt(static_cast<double>(v.size()));
  if (sd) *sd = s;
}

}  // namespace detail

/// Single replication with stream id `replication` under `seed`.
inline RunResult run_once(const ChartConfig& cfg, const Scenario& sc, std::uint64_t seed,
                          std::uint64_t replication = 0) {
  Chart chart(cfg, sc.model);
  const std::vector<double> mu = mean_vector(sc.pattern, sc.n());
  std::vector<double> x(sc.n());
  RandomStream rng(seed, replication);
  return detail::drive(chart, sc, mu, rng, x);
}

/// Null-run stopping-time summary (ARL₀). arl0 is left empty when every run is censored.
inline Summary estimate_arl0(const ChartConfig& cfg, const CovModel& model, std::int64_t reps,
                             std::uint64_t seed, std::size_t threads = default_threads(),
                             std::int64_t horizon_cap = kDefaultHorizon) {
  const Scenario sc = null_scenario(model, horizon_cap);
  const auto runs = detail::run_all(cfg, sc, reps, seed, threads);
  Summary s;
  s.reps = reps;
  std::vector<double> taus;
  taus.reserve(runs.size());
  for (const auto& r : runs) {
    s.censored += r.censored ? 1 : 0;
    taus.push_back(static_cast<double>(r.tau));
  }
  if (s.censored < reps) detail::mean_se(taus, s.arl0, s.arl0_se, &s.tau_sd);
  return s;
}

/// Change-point experiment: FAR = P̂(τ ≤ ν), SADDT = mean(τ − ν | τ > ν).
inline Summary estimate_detection(const ChartConfig& cfg, const Scenario& sc, std::int64_t reps,
                                  std::uint64_t seed, std::size_t threads = default_threads()) {
  if (!sc.nu) throw std::invalid_argument("simulate: detection experiment needs a finite change point");
  const auto runs = detail::run_all(cfg, sc, reps, seed, threads);
  Summary s;
  s.reps = reps;
  std::int64_t false_alarms = 0;
  std::vector<double> delays;
  for (const auto& r : runs) {
    if (r.censored) {
      ++s.censored;
    } else if (r.alarmed_pre_nu) {
      ++false_alarms;
    } else {
      delays.push_back(static_cast<double>(r.tau - *sc.nu));
    }
  }
  s.detections = static_cast<std::int64_t>(delays.size());
  s.far = static_cast<double>(false_alarms) / static_cast<double>(reps);
  detail::mean_se(delays, s.saddt, s.saddt_se);
  return s;
}

}  // namespace seqwatch
