// SPDX-License-Identifier: Apache-2.0
//
// Threshold calibration by simulation with common random numbers.
//
// Charts evolve independently of their threshold, so for a fixed random
// stream the stopping time τ(h) = inf{t : stat_t > h} is a non-decreasing step
// function of h. Each replication is simulated once, keeping only the record
// values of its running maximum; τ(h) for any h below the stop level is then a
// lookup, and bisection on the threshold needs no further simulation.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "seqwatch/charts.hpp"
#include "seqwatch/covariance.hpp"
#include "seqwatch/design.hpp"
#include "seqwatch/rng.hpp"
#include "seqwatch/simulate.hpp"

namespace seqwatch {

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CalibrationOptions {
  int max_rounds = 40;
  double growth = 1.25;            // stop-level expansion factor while bracketing
  double horizon_multiple = 20.0;  // per-run cap as a multiple of the target
};

namespace detail {

struct Record {
  std::int64_t t;
  double value;
};

/// Running-maximum records of one null run, until a value exceeds `stop` or t = horizon.
inline std::vector<Record> record_run(Chart& chart, const CovModel& model, RandomStream& rng,
                                      std::vector<double>& x, double stop, std::int64_t horizon) {
  std::vector<Record> rec;
  double best = -std::numeric_limits<double>::infinity();
  for (std::int64_t t = 1; t <= horizon; ++t) {
    model.sample_shock(rng, x);
    const double v = chart.step(x).statistic;
    if (v > best) {
      best = v;
      rec.push_back({t, v});
      if (v > stop) break;
    }
  }
  return rec;
}

/// τ(h) from a record list; `horizon` when no record exceeds h.
inline std::int64_t tau_from_records(const std::vector<Record>& rec, double h, std::int64_t horizon) {
  const auto it = std::upper_bound(rec.begin(), rec.end(), h,
                                   [](double v, const Record& r) { return v < r.value; });
  return it == rec.end() ? horizon : it->t;
}

struct RecordSet {
  std::vector<std::vector<Record>> runs;
  std::int64_t horizon = 0;

  /// (mean, se, censored) of τ(h).
  void summarize(double h, double& mean, double& se, std::int64_t& censored) const {
    const auto n = static_cast<double>(runs.size());
    double sum = 0.0;
    double sum2 = 0.0;
    censored = 0;
    for (const auto& r : runs) {
      const std::int64_t tau = tau_from_records(r, h, horizon);
      if (r.empty() || r.back().value <= h) ++censored;
      const auto v = static_cast<double>(tau);
      sum += v;
      sum2 += v * v;
    }
    mean = sum / n;
    const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
    se = std::sqrt(var / n);
  }
};

inline RecordSet record_all(const ChartConfig& cfg, const CovModel& model, std::int64_t reps,
                            std::uint64_t seed, std::size_t threads, double stop,
                            std::int64_t horizon) {
  RecordSet set;
  set.horizon = horizon;
  set.runs.resize(static_cast<std::size_t>(reps));
  const Chart prototype(cfg, model);
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    Chart chart = prototype;
    std::vector<double> x(model.n());
    for (;;) {
      const std::int64_t r = next.fetch_add(1);
      if (r >= reps) return;
      chart.reset();
      RandomStream rng(seed, static_cast<std::uint64_t>(r));
      set.runs[static_cast<std::size_t>(r)] = record_run(chart, model, rng, x, stop, horizon);
    }
  };
  threads = std::clamp<std::size_t>(threads, 1, static_cast<std::size_t>(reps));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return set;
}

}  // namespace detail

/// Finds the chart threshold whose simulated ARL₀ matches `target_arl0`.
///
/// `cfg.threshold` is the starting stop level and should not exceed the answer
/// by much: the simulation cost is governed by the ARL₀ at the final stop level.
/// Throws CalibrationError when no bracket or no threshold within ±2 se is found
/// in `max_rounds` rounds.
inline design::DesignResult calibrate_by_simulation(const ChartConfig& cfg, const CovModel& model,
                                                    double target_arl0, std::int64_t reps,
                                                    std::uint64_t seed,
                                                    std::size_t threads = default_threads(),
                                                    const CalibrationOptions& opt = {}) {
  if (reps < 1000) throw std::invalid_argument("calibrate: reps must be at least 1000");
  if (!(target_arl0 > 1.0) || !std::isfinite(target_arl0))
    throw std::invalid_argument("calibrate: target ARL0 must exceed 1");
  if (!(cfg.threshold > 0.0) || !std::isfinite(cfg.threshold))
    throw std::invalid_argument("calibrate: starting threshold must be positive and finite");
  validate(cfg, model);

  const auto horizon = static_cast<std::int64_t>(std::ceil(opt.horizon_multiple * target_arl0));
  double stop = cfg.threshold;
  detail::RecordSet set;
  double mean = 0.0;
  double se = 0.0;
  std::int64_t censored = 0;
  int round = 0;
  for (;; ++round) {
    if (round >= opt.max_rounds) throw CalibrationError("calibrate: could not bracket the target ARL0");
    set = detail::record_all(cfg, model, reps, seed, threads, stop, horizon);
    set.summarize(stop, mean, se, censored);
    if (mean >= target_arl0) break;
    stop *= opt.growth;
  }

  // Bisection on the common-random-number ARL curve over [0, stop].
  double lo = 0.0;
  double hi = stop;
  double best = stop;
  bool converged = false;
  for (int i = 0; i < opt.max_rounds; ++i) {
    const double mid = 0.5 * (lo + hi);
    set.summarize(mid, mean, se, censored);
    if (std::abs(mean - target_arl0) <= 2.0 * se) {
      best = mid;
      converged = true;
    }
    if (mean < target_arl0) lo = mid; else hi = mid;
    if (converged && (hi - lo) <= 1e-6 * hi) break;
  }
  if (!converged) throw CalibrationError("calibrate: no threshold within 2 standard errors of the target");

  set.summarize(best, mean, se, censored);
  design::DesignResult r;
  r.chart = cfg.variant;
  r.method = design::Method::Simulation;
  r.threshold = best;
  r.limit = best;
  if (cfg.variant == Variant::Mewma || cfg.variant == Variant::Mewma0) {
    if (cfg.mode == ThresholdMode::None) r.limit = std::sqrt(best * (2.0 - cfg.beta) / cfg.beta);
    r.beta = cfg.beta;
  } else if (cfg.variant == Variant::Glrt || cfg.variant == Variant::Mma) {
    r.limit = std::sqrt(best);
  }
  if (uses_window(cfg.variant)) r.window = static_cast<double>(cfg.window);
  if (uses_beta(cfg.variant)) r.beta = cfg.beta;
  r.predicted_arl0 = mean;
  r.notes.push_back("simulated ARL0 " + std::to_string(mean) + " +/- " + std::to_string(se) + " over " +
                    std::to_string(reps) + " replications, " + std::to_string(round + 1) +
                    " simulation round(s)");
  if (censored > 0) r.notes.push_back(std::to_string(censored) + " run(s) censored at " + std::to_string(horizon));
  return r;
}

}  // namespace seqwatch
