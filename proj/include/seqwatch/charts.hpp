// SPDX-License-Identifier: Apache-2.0
//
// Online detection charts. Each procedure consumes one observation X_t per
// call and reports (statistic, threshold, alarmed) with alarmed ⇔ statistic >
// threshold. Thresholds are stored in the units of the statistic:
//
//   MEWMA / MEWMA0      b²β/(2−β)   on YᵀΣ⁻¹Y (resp. YᵀY/σ_e²)
//     hard mode         c²          on Σ u_j² I[|u_j| > s],       u = Y/σ_e
//     soft mode         d²          on Σ u_j² / (1 + q e^{−u_j²/2})
//   MMA                 h²          on X̄ᵀΣ⁻¹X̄ over the last w observations
//   MCUSUM (windowed)   d           on max_{1≤w≤W} w(‖X̄_w‖ − k/2)
//   MCUSUM (recursive)  h₁          on MC1_t
//   GLRT                b²          on max_{1≤w≤W} w‖X̄_w‖²
//   S-R family          B
//   adaptive CUSUM      c
//
// The S-R and adaptive charts use the per-channel likelihood ratios for unit
// variance channels, i.e. they assume Σ = I as their design does.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "seqwatch/covariance.hpp"

namespace seqwatch {

enum class Variant {
  Mewma,
  Mewma0,
  Mma,
  McusumWindowed,
  McusumRecursive,
  Glrt,
  SrMixture,
  SumSr,
  AdaptiveCusum,
  AdaptiveSr,
  AdaptiveSumSr,
};

enum class ThresholdMode { None, Hard, Soft };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Mewma: return "mewma";
    case Variant::Mewma0: return "mewma0";
    case Variant::Mma: return "mma";
    case Variant::McusumWindowed: return "mcusum";
    case Variant::McusumRecursive: return "rcusum";
    case Variant::Glrt: return "glrt";
    case Variant::SrMixture: return "sr";
    case Variant::SumSr: return "sum-sr";
    case Variant::AdaptiveCusum: return "acusum";
    case Variant::AdaptiveSr: return "asr";
    case Variant::AdaptiveSumSr: return "asum-sr";
  }
  return "?";
}

inline Variant parse_variant(std::string_view s) {
  for (auto v : {Variant::Mewma, Variant::Mewma0, Variant::Mma, Variant::McusumWindowed,
                 Variant::McusumRecursive, Variant::Glrt, Variant::SrMixture, Variant::SumSr,
                 Variant::AdaptiveCusum, Variant::AdaptiveSr, Variant::AdaptiveSumSr}) {
    if (s == to_string(v)) return v;
  }
  throw std::invalid_argument("unknown chart '" + std::string(s) + "'");
}

inline std::string_view to_string(ThresholdMode m) {
  switch (m) {
    case ThresholdMode::None: return "none";
    case ThresholdMode::Hard: return "hard";
    case ThresholdMode::Soft: return "soft";
  }
  return "?";
}

inline ThresholdMode parse_threshold_mode(std::string_view s) {
  if (s == "none") return ThresholdMode::None;
  if (s == "hard") return ThresholdMode::Hard;
  if (s == "soft") return ThresholdMode::Soft;
  throw std::invalid_argument("unknown threshold mode '" + std::string(s) + "'");
}

struct ChartConfig {
  Variant variant = Variant::Mewma;
  double beta = 0.05;        // EWMA weight; also the adaptive estimator's weight
  double threshold = 1.0;    // alarm limit in statistic units (see file header)
  std::size_t window = 1;    // w (MMA) or W (windowed MCUSUM, GLRT)
  double k_ref = 0.5;        // ‖δ‖ (MCUSUM) or per-channel δ (S-R family)
  ThresholdMode mode = ThresholdMode::None;
  double trim = 0.5;         // s, hard mode
  double odds = 9.0;         // q = (1−p)/p, soft mode
};

inline bool uses_beta(Variant v) {
  return v == Variant::Mewma || v == Variant::Mewma0 || v == Variant::AdaptiveCusum ||
         v == Variant::AdaptiveSr || v == Variant::AdaptiveSumSr;
}
inline bool uses_window(Variant v) {
  return v == Variant::Mma || v == Variant::McusumWindowed || v == Variant::Glrt;
}
inline bool uses_k_ref(Variant v) {
  return v == Variant::McusumWindowed || v == Variant::McusumRecursive ||
         v == Variant::SrMixture || v == Variant::SumSr;
}

/// Throws std::invalid_argument on any violated configuration invariant.
inline void validate(const ChartConfig& cfg, const CovModel& model) {
  if (std::isnan(cfg.threshold) || cfg.threshold < 0.0)
    throw std::invalid_argument("chart: threshold must be non-negative");
  if (uses_beta(cfg.variant) && !(cfg.beta > 0.0 && cfg.beta <= 1.0))
    throw std::invalid_argument("chart: beta must lie in (0, 1]");
  if (uses_window(cfg.variant) && cfg.window < 1)
    throw std::invalid_argument("chart: window must be at least 1");
  if (uses_k_ref(cfg.variant) && !(cfg.k_ref > 0.0 && std::isfinite(cfg.k_ref)))
    throw std::invalid_argument("chart: reference value k must be positive");
  if (cfg.mode != ThresholdMode::None) {
    if (cfg.variant != Variant::Mewma && cfg.variant != Variant::Mewma0 &&
        cfg.variant != Variant::Mma)
      throw std::invalid_argument("chart: threshold mode applies to EWMA and MA charts only");
    if (cfg.mode == ThresholdMode::Soft && cfg.variant == Variant::Mma)
      throw std::invalid_argument("chart: soft threshold is defined for EWMA charts only");
    if (!model.is_identity())
      throw std::invalid_argument("chart: threshold mode requires identity covariance");
    if (!(cfg.trim >= 0.0)) throw std::invalid_argument("chart: trim level s must be >= 0");
    if (!(cfg.odds >= 0.0)) throw std::invalid_argument("chart: odds ratio q must be >= 0");
  }
}

/// Mutable per-chart state. Single owner; never shared between threads.
struct ChartState {
  std::size_t n = 0;
  std::vector<double> y;           // EWMA Y_t, or the adaptive mean estimate μ̂_t
  std::vector<double> ring;        // last `capacity` observations, row-major
  std::size_t capacity = 0;
  std::size_t head = 0;            // next slot to write
  std::size_t count = 0;
  std::vector<double> sum;         // Σ X_i since ν̂ (recursive MCUSUM)
  std::vector<double> r_channel;   // per-channel S-R statistics
  double mc1 = 0.0;
  double r = 0.0;
  double w_stat = 0.0;
  std::int64_t nu_hat = 0;         // ν̂_{t+1}, i.e. the estimate for the next step
  std::int64_t t = 0;
  std::vector<double> work;        // scratch for window sums
};

struct StepOutcome {
  double statistic = 0.0;
  double threshold = 0.0;
  bool alarmed = false;
  std::optional<std::int64_t> nu_hat;          // recursive MCUSUM: ν̂_t used at this step
  std::optional<std::size_t> argmax_window;    // windowed charts
};

inline void reset(ChartState& s) {
  std::fill(s.y.begin(), s.y.end(), 0.0);
  std::fill(s.ring.begin(), s.ring.end(), 0.0);
  std::fill(s.sum.begin(), s.sum.end(), 0.0);
  std::fill(s.r_channel.begin(), s.r_channel.end(), 0.0);
  s.head = 0;
  s.count = 0;
  s.mc1 = 0.0;
  s.r = 0.0;
  s.w_stat = 0.0;
  s.nu_hat = 0;
  s.t = 0;
}

inline ChartState make_state(const ChartConfig& cfg, std::size_t n) {
  ChartState s;
  s.n = n;
  s.y.assign(n, 0.0);
  s.work.assign(n, 0.0);
  if (uses_window(cfg.variant)) {
    s.capacity = cfg.window;
    s.ring.assign(cfg.window * n, 0.0);
  }
  if (cfg.variant == Variant::McusumRecursive) s.sum.assign(n, 0.0);
  if (cfg.variant == Variant::SumSr || cfg.variant == Variant::AdaptiveSumSr)
    s.r_channel.assign(n, 0.0);
  return s;
}

namespace detail {

inline void check_step(const ChartState& s, std::span<const double> x, const CovModel& model) {
  if (x.size() != model.n() || s.n != model.n())
    throw std::invalid_argument("chart: observation length " + std::to_string(x.size()) +
                                " does not match n = " + std::to_string(model.n()));
}

inline void require(bool ok, const char* op) {
  if (!ok) throw std::invalid_argument(std::string("chart: wrong variant for ") + op);
}

inline StepOutcome finish(double statistic, double threshold) {
  return StepOutcome{statistic, threshold, statistic > threshold, std::nullopt, std::nullopt};
}

inline void push(ChartState& s, std::span<const double> x) {
  std::copy(x.begin(), x.end(), s.ring.begin() + static_cast<std::ptrdiff_t>(s.head * s.n));
  s.head = (s.head + 1) % s.capacity;
  s.count = std::min(s.count + 1, s.capacity);
}

/// Row of the j-th most recent observation (j = 0 is X_t).
inline std::span<const double> recent(const ChartState& s, std::size_t j) {
  const std::size_t slot = (s.head + s.capacity - 1 - j) % s.capacity;
  return {s.ring.data() + slot * s.n, s.n};
}

/// Σ_j u_j² g(u_j) with u = v/σ_e, for the sparse-signal statistics.
inline double thresholded_sum(std::span<const double> v, const CovModel& model, const ChartConfig& cfg) {
  const double inv_se = 1.0 / std::sqrt(model.sigma_e2());
  double acc = 0.0;
  for (double vj : v) {
    const double u = vj * inv_se;
    const double u2 = u * u;
    if (cfg.mode == ThresholdMode::Hard) {
      if (std::abs(u) > cfg.trim) acc += u2;
    } else {
      // e^{u²/2}/(q + e^{u²/2}) rewritten to avoid overflow.
      acc += u2 / (1.0 + cfg.odds * std::exp(-0.5 * u2));
    }
  }
  return acc;
}

}  // namespace detail

/// MEWMA / MEWMA0, optionally hard- or soft-thresholded.
inline StepOutcome ewma_step(ChartState& s, std::span<const double> x, const ChartConfig& cfg,
                             const CovModel& model) {
  detail::require(cfg.variant == Variant::Mewma || cfg.variant == Variant::Mewma0, "ewma_step");
  detail::check_step(s, x, model);
  if (cfg.mode != ThresholdMode::None && !model.is_identity())
    throw std::invalid_argument("chart: threshold mode requires identity covariance");

  const double keep = 1.0 - cfg.beta;
  for (std::size_t i = 0; i < s.n; ++i) s.y[i] = keep * s.y[i] + cfg.beta * x[i];
  ++s.t;

  double stat;
  if (cfg.mode != ThresholdMode::None) {
    stat = detail::thresholded_sum(s.y, model, cfg);
  } else if (cfg.variant == Variant::Mewma) {
    stat = model.quad_form(s.y);
  } else {
    double yy = 0.0;
    for (double v : s.y) yy += v * v;
    stat = yy / model.sigma_e2();
  }
  return detail::finish(stat, cfg.threshold);
}

/// Moving-average chart over the last w observations. Reports statistic 0
/// (no alarm) until the first full window is available.
inline StepOutcome ma_step(ChartState& s, std::span<const double> x, const ChartConfig& cfg,
                           const CovModel& model) {
  detail::require(cfg.variant == Variant::Mma, "ma_step");
  detail::check_step(s, x, model);
  detail::push(s, x);
  ++s.t;
  if (s.count < cfg.window) return detail::finish(0.0, cfg.threshold);

  std::fill(s.work.begin(), s.work.end(), 0.0);
  for (std::size_t j = 0; j < cfg.window; ++j) {
    const auto row = detail::recent(s, j);
    for (std::size_t i = 0; i < s.n; ++i) s.work[i] += row[i];
  }
  const double inv_w = 1.0 / static_cast<double>(cfg.window);
  for (double& v : s.work) v *= inv_w;

  const double stat = cfg.mode == ThresholdMode::None ? model.quad_form(s.work)
                                                      : detail::thresholded_sum(s.work, model, cfg);
  return detail::finish(stat, cfg.threshold);
}

namespace detail {

/// Scans windows 1..min(W, t) over the ring, newest first. `score(q, w)`
/// maps the window's S_wᵀΣ⁻¹S_w and length to the chart's window score.
template <class Score>
StepOutcome window_scan(ChartState& s, std::span<const double> x, const ChartConfig& cfg,
                        const CovModel& model, Score score) {
  push(s, x);
  ++s.t;
  std::fill(s.work.begin(), s.work.end(), 0.0);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_w = 1;
  for (std::size_t j = 0; j < s.count; ++j) {
    const auto row = recent(s, j);
    for (std::size_t i = 0; i < s.n; ++i) s.work[i] += row[i];
    const double val = score(model.quad_form(s.work), static_cast<double>(j + 1));
    if (val > best) {
      best = val;
      best_w = j + 1;
    }
  }
  StepOutcome out = finish(best, cfg.threshold);
  out.argmax_window = best_w;
  return out;
}

}  // namespace detail

/// Window-restricted MCUSUM: max_{1≤w≤min(W,t)} (‖S_w‖_Σ − w·k/2), S_w the last-w sum.
inline StepOutcome cusum_windowed_step(ChartState& s, std::span<const double> x,
                                       const ChartConfig& cfg, const CovModel& model) {
  detail::require(cfg.variant == Variant::McusumWindowed, "cusum_windowed_step");
  detail::check_step(s, x, model);
  const double half_k = 0.5 * cfg.k_ref;
  return detail::window_scan(s, x, cfg, model,
                             [half_k](double q, double w) { return std::sqrt(q) - w * half_k; });
}

/// Windowed GLRT: max_{1≤w≤min(W,t)} S_wᵀΣ⁻¹S_w / w.
inline StepOutcome glrt_step(ChartState& s, std::span<const double> x, const ChartConfig& cfg,
                             const CovModel& model) {
  detail::require(cfg.variant == Variant::Glrt, "glrt_step");
  detail::check_step(s, x, model);
  return detail::window_scan(s, x, cfg, model, [](double q, double w) { return q / w; });
}

/// Recursive MCUSUM with zero-reset change-point estimate:
///   MC1_t = max(0, ‖S_t‖_Σ − (k/2)(t − ν̂_t)),  S_t = Σ_{ν̂_t < i ≤ t} X_i,
///   ν̂_{t+1} = t if MC1_t = 0, else ν̂_t.
inline StepOutcome cusum_recursive_step(ChartState& s, std::span<const double> x,
                                        const ChartConfig& cfg, const CovModel& model) {
  detail::require(cfg.variant == Variant::McusumRecursive, "cusum_recursive_step");
  detail::check_step(s, x, model);
  ++s.t;
  for (std::size_t i = 0; i < s.n; ++i) s.sum[i] += x[i];
  const std::int64_t nu_used = s.nu_hat;
  const double span_len = static_cast<double>(s.t - nu_used);
  s.mc1 = std::max(0.0, std::sqrt(model.quad_form(s.sum)) - 0.5 * cfg.k_ref * span_len);
  if (s.mc1 == 0.0) {
    s.nu_hat = s.t;
    std::fill(s.sum.begin(), s.sum.end(), 0.0);
  }
  StepOutcome out = detail::finish(s.mc1, cfg.threshold);
  out.nu_hat = nu_used;
  return out;
}

/// Shiryayev-Roberts with R₀ = 0.
///   SrMixture: R_t = (1 + R_{t−1}) exp(δ Σ_i (X_it − δ/2))
///   SumSr:     R_it = (1 + R_{i,t−1}) exp(δ (X_it − δ/2)), statistic Σ_i R_it
inline StepOutcome sr_step(ChartState& s, std::span<const double> x, const ChartConfig& cfg,
                           const CovModel& model) {
  detail::require(cfg.variant == Variant::SrMixture || cfg.variant == Variant::SumSr, "sr_step");
  detail::check_step(s, x, model);
  if (cfg.k_ref < 0.0) throw std::invalid_argument("chart: S-R reference delta must be >= 0");
  ++s.t;
  const double delta = cfg.k_ref;
  if (cfg.variant == Variant::SrMixture) {
    double llr = 0.0;
    for (double xi : x) llr += xi - 0.5 * delta;
    s.r = (1.0 + s.r) * std::exp(delta * llr);
    return detail::finish(s.r, cfg.threshold);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < s.n; ++i) {
    s.r_channel[i] = (1.0 + s.r_channel[i]) * std::exp(delta * (x[i] - 0.5 * delta));
    total += s.r_channel[i];
  }
  s.r = total;
  return detail::finish(total, cfg.threshold);
}

/// Adaptive CUSUM / S-R / sum-S-R driven by the EWMA estimate μ̂. The statistic
/// uses μ̂_{t−1}; μ̂ is updated afterwards, with μ̂₀ = 0.
inline StepOutcome adaptive_step(ChartState& s, std::span<const double> x, const ChartConfig& cfg,
                                 const CovModel& model) {
  detail::require(cfg.variant == Variant::AdaptiveCusum || cfg.variant == Variant::AdaptiveSr ||
                      cfg.variant == Variant::AdaptiveSumSr,
                  "adaptive_step");
  detail::check_step(s, x, model);
  ++s.t;
  double stat;
  if (cfg.variant == Variant::AdaptiveSumSr) {
    double total = 0.0;
    for (std::size_t i = 0; i < s.n; ++i) {
      const double m = s.y[i];
      s.r_channel[i] = (1.0 + s.r_channel[i]) * std::exp(m * (x[i] - 0.5 * m));
      total += s.r_channel[i];
    }
    s.r = total;
    stat = total;
  } else {
    double inc = 0.0;
    for (std::size_t i = 0; i < s.n; ++i) inc += s.y[i] * (x[i] - 0.5 * s.y[i]);
    if (cfg.variant == Variant::AdaptiveCusum) {
      s.w_stat = std::max(0.0, s.w_stat + inc);
      stat = s.w_stat;
    } else {
      s.r = (1.0 + s.r) * std::exp(inc);
      stat = s.r;
    }
  }
  const double keep = 1.0 - cfg.beta;
  for (std::size_t i = 0; i < s.n; ++i) s.y[i] = keep * s.y[i] + cfg.beta * x[i];
  return detail::finish(stat, cfg.threshold);
}

/// Dispatches to the step function for cfg.variant.
inline StepOutcome step(ChartState& s, std::span<const double> x, const ChartConfig& cfg,
                        const CovModel& model) {
  switch (cfg.variant) {
    case Variant::Mewma:
    case Variant::Mewma0: return ewma_step(s, x, cfg, model);
    case Variant::Mma: return ma_step(s, x, cfg, model);
    case Variant::McusumWindowed: return cusum_windowed_step(s, x, cfg, model);
    case Variant::McusumRecursive: return cusum_recursive_step(s, x, cfg, model);
    case Variant::Glrt: return glrt_step(s, x, cfg, model);
    case Variant::SrMixture:
    case Variant::SumSr: return sr_step(s, x, cfg, model);
    case Variant::AdaptiveCusum:
    case Variant::AdaptiveSr:
    case Variant::AdaptiveSumSr: return adaptive_step(s, x, cfg, model);
  }
  throw std::logic_error("chart: unhandled variant");
}

/// A validated chart bound to its covariance model.
class Chart {
 public:
  Chart(ChartConfig cfg, CovModel model) : cfg_(cfg), model_(std::move(model)) {
    validate(cfg_, model_);
    state_ = make_state(cfg_, model_.n());
  }

  StepOutcome step(std::span<const double> x) { return seqwatch::step(state_, x, cfg_, model_); }
  void reset() { seqwatch::reset(state_); }

  const ChartConfig& config() const { return cfg_; }
  const CovModel& model() const { return model_; }
  const ChartState& state() const { return state_; }

 private:
  ChartConfig cfg_;
  CovModel model_;
  ChartState state_;
};

}  // namespace seqwatch
