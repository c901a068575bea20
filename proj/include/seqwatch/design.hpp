// SPDX-License-Identifier: Apache-2.0
//
// Chart design from first-order theory: ARL₀ approximations, stationary
// average delay detection time (SADDT) predictions and optimal tuning for
// the MEWMA, MMA, MCUSUM, GLRT and Shiryayev-Roberts charts.
//
// Everything here is a pure function. Quantities that grow like e^{b²/2}
// are assembled in log space.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "seqwatch/charts.hpp"

namespace seqwatch::design {

/// Siegmund's overshoot constant for the Gaussian random walk.
inline constexpr double kRhoPlus = 0.5826;
/// argmin and min of g(k) = −ln(1 − √k)/k on (0, 1).
inline constexpr double kKStar = 0.5117;
inline constexpr double kCStar = 2.4554;

enum class ArlForm { Integral, Closed };
enum class Method { Quadrature, ClosedForm, Simulation };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Quadrature: return "quadrature";
    case Method::ClosedForm: return "closed_form";
    case Method::Simulation: return "simulation";
  }
  return "?";
}

struct DesignResult {
  Variant chart = Variant::Mewma;
  double limit = 0.0;       // b, h, d, h₁, B or c in its natural units
  double threshold = 0.0;   // the same limit in ChartConfig::threshold units
  std::optional<double> beta;
  std::optional<double> window;  // w or W; may be fractional for first-order optima
  double predicted_arl0 = 0.0;
  std::optional<double> predicted_saddt;
  bool inefficient = false;
  Method method = Method::ClosedForm;
  std::vector<std::string> notes;
};

namespace detail {

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string("design: ") + what + " must be positive");
}

inline void require_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("design: beta must lie in (0, 1)");
}

/// x^{−a} eˣ γ(a, x), γ the unnormalized lower incomplete gamma. Tends to 1/a at 0.
inline double scaled_lower_gamma(double a, double x) {
  if (x <= 0.0) return 1.0 / a;
  const double p = boost::math::gamma_p(a, x);
  if (p < 1e-250 || x < 1e-10 * (a + 1.0)) return (1.0 + x / (a + 1.0)) / a;
  return std::exp(boost::math::lgamma(a) + std::log(p) + x - a * std::log(x));
}

/// Bisection for an increasing function crossing zero in [lo, hi].
inline double bisect_increasing(const std::function<double(double)>& f, double lo, double hi,
                                double rel_tol, const char* what) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo > 0.0 || fhi < 0.0)
    throw std::runtime_error(std::string("design: root bracket exhausted for ") + what);
  for (int i = 0; i < 200 && (hi - lo) > rel_tol * std::abs(hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Continuity correction b* − b = ρ₊ β / √(β/(2−β)).
inline double boundary_correction(double beta) {
  detail::require_beta(beta);
  return kRhoPlus * beta / std::sqrt(beta / (2.0 - beta));
}

/// MEWMA ARL₀ for raw limit b (alarm at YᵀΣ⁻¹Y > b²β/(2−β)):
///   Integral: (1/(−2ln(1−β))) ∫₀^{b*²/2} x^{−N/2} eˣ ∫₀ˣ z^{N/2−1} e^{−z} dz dx
///   Closed:   (1/(−2ln(1−β))) Γ(N/2) (b*²/2)^{−N/2} e^{b*²/2}
/// with b* = b + correction when `corrected`, else b* = b. The integral form is
/// floored at 1.
inline double arl0_mewma(std::size_t n, double beta, double b, bool corrected = true,
                         ArlForm form = ArlForm::Integral, double rel_tol = 1e-6) {
  if (n < 1) throw std::invalid_argument("design: n must be positive");
  detail::require_beta(beta);
  detail::require_positive(b, "b");
  const double bstar = corrected ? b + boundary_correction(beta) : b;
  const double upper = 0.5 * bstar * bstar;
  const double a = 0.5 * static_cast<double>(n);
  const double rate = -2.0 * std::log1p(-beta);

  if (form == ArlForm::Closed)
    return std::exp(boost::math::lgamma(a) - a * std::log(upper) + upper) / rate;

  double err = 0.0;
  const auto f = [a](double x) { return detail::scaled_lower_gamma(a, x); };
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, upper, 20, rel_tol * 1e-2, &err);
  if (!(value > 0.0) || !std::isfinite(value) || err > rel_tol * value)
    throw std::runtime_error("design: MEWMA ARL quadrature did not converge");
  return std::max(1.0, value / rate);
}

/// Raw limit b whose ARL₀ approximation equals `target_arl0` (relative 1e-4 in ARL).
/// The closed form is only monotone for b² > N, so its search starts at √N.
inline double solve_mewma_threshold(std::size_t n, double beta, double target_arl0, bool corrected = true,
                                    ArlForm form = ArlForm::Integral) {
  if (!(target_arl0 > 1.0)) throw std::invalid_argument("design: target ARL0 must exceed 1");
  const double log_target = std::log(target_arl0);
  const auto f = [&](double b) { return std::log(arl0_mewma(n, beta, b, corrected, form)) - log_target; };
  const double lo = form == ArlForm::Closed ? std::sqrt(static_cast<double>(n)) : 0.1;
  return detail::bisect_increasing(f, lo, 20.0 + lo, 1e-7, "MEWMA threshold");
}

/// Converts a raw MEWMA limit b to the chart threshold b²β/(2−β).
inline double mewma_threshold(double b, double beta) { return b * b * beta / (2.0 - beta); }

/// Stationary delay of MEWMA(β, b) against signal δᵀΣ⁻¹δ = signal2.
/// With k = βb²/(2·signal2): −ln(1 − √k)/β for k < 1, nullopt (inefficient) otherwise.
inline std::optional<double> saddt_mewma(double beta, double b, double signal2) {
  detail::require_beta(beta);
  detail::require_positive(b, "b");
  detail::require_positive(signal2, "signal2");
  const double k = beta * b * b / (2.0 * signal2);
  if (k >= 1.0) return std::nullopt;
  return -std::log1p(-std::sqrt(k)) / beta;
}

/// First-order optimal MEWMA for reference signal δᵀΣ⁻¹δ:
/// b* = √(2 ln ARL₀), β* = k* signal2 / ln ARL₀, SADDT = c* ln ARL₀ / signal2.
inline DesignResult optimal_mewma(std::size_t n, double target_arl0, double signal2) {
  detail::require_positive(signal2, "signal2");
  if (!(target_arl0 > std::exp(1.0))) throw std::invalid_argument("design: target ARL0 must exceed e");
  if (n < 1) throw std::invalid_argument("design: n must be positive");
  const double log_arl = std::log(target_arl0);
  DesignResult r;
  r.chart = Variant::Mewma;
  r.method = Method::ClosedForm;
  r.limit = std::sqrt(2.0 * log_arl);
  double beta = kKStar * signal2 / log_arl;
  if (beta > 1.0) {
    beta = 1.0;
    r.notes.emplace_back("optimal beta exceeds 1; capped at 1");
  }
  r.beta = beta;
  r.threshold = mewma_threshold(r.limit, beta);
  r.predicted_arl0 = target_arl0;
  r.predicted_saddt = kCStar * log_arl / signal2;
  return r;
}

/// Golden-section minimization on [lo, hi]; returns (argmin, min).
inline std::pair<double, double> golden_section_min(const std::function<double(double)>& f,
                                                    double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  const double x = 0.5 * (lo + hi);
  return {x, f(x)};
}

/// g(k) = −ln(1 − √k)/k, the MEWMA delay factor.
inline double delay_factor(double k) { return -std::log1p(-std::sqrt(k)) / k; }

/// Recomputes (k*, c*) by minimizing g on (0, 1).
inline std::pair<double, double> kstar_cstar() {
  return golden_section_min(delay_factor, 1e-9, 1.0 - 1e-9, 1e-7);
}

// ---- MMA ------------------------------------------------------------------

/// ARL₀ ≈ w Γ(N/2) / (2 (h²w/2)^{N/2}) · exp(h²w/2 + √2 ρ₊ h).
inline double arl0_mma(std::size_t n, double w, double h) {
  if (n < 1) throw std::invalid_argument("design: n must be positive");
  detail::require_positive(w, "window");
  detail::require_positive(h, "h");
  const double a = 0.5 * static_cast<double>(n);
  const double x = 0.5 * h * h * w;
  return std::exp(std::log(w) + boost::math::lgamma(a) - std::log(2.0) - a * std::log(x) + x +
                  std::sqrt(2.0) * kRhoPlus * h);
}

/// SADDT of the optimally designed MMA when the true signal is true_signal2;
/// nullopt (inefficient) when it falls below the reference.
inline std::optional<double> saddt_mma(double ref_signal2, double true_signal2, double arl0) {
  detail::require_positive(ref_signal2, "reference signal");
  detail::require_positive(true_signal2, "true signal");
  detail::require_positive(arl0, "ARL0");
  if (true_signal2 < ref_signal2) return std::nullopt;
  return 2.0 * std::log(arl0) / true_signal2;
}

/// h* = √signal2, w* = 2 ln ARL₀ / signal2, SADDT ≈ w*.
inline DesignResult design_mma(std::size_t n, double target_arl0, double signal2) {
  detail::require_positive(signal2, "signal2");
  if (!(target_arl0 > 1.0)) throw std::invalid_argument("design: target ARL0 must exceed 1");
  const double w_star = 2.0 * std::log(target_arl0) / signal2;
  DesignResult r;
  r.chart = Variant::Mma;
  r.method = Method::ClosedForm;
  r.limit = std::sqrt(signal2);
  r.threshold = signal2;
  r.window = w_star;
  r.predicted_arl0 = arl0_mma(n, w_star, r.limit);
  r.predicted_saddt = w_star;
  return r;
}

// ---- window-restricted MCUSUM -------------------------------------------

/// ARL₀ = (4‖δ‖d)^{−(N−1)/2} Γ(N−1)/Γ((N−1)/2) · (2/‖δ‖²) · e^{‖δ‖(d + 2ρ₊)}.
/// For N = 1 the gamma ratio takes its limit 1/2.
inline double arl0_mcusum(std::size_t n, double delta_norm, double d) {
  if (n < 1) throw std::invalid_argument("design: n must be positive");
  detail::require_positive(delta_norm, "delta");
  detail::require_positive(d, "d");
  const double m = static_cast<double>(n) - 1.0;
  const double log_ratio =
      n == 1 ? std::log(0.5) : boost::math::lgamma(m) - boost::math::lgamma(0.5 * m);
  return std::exp(-0.5 * m * std::log(4.0 * delta_norm * d) + log_ratio +
                  std::log(2.0 / (delta_norm * delta_norm)) + delta_norm * (d + 2.0 * kRhoPlus));
}

/// ln ARL₀ / (‖δ‖(‖μ‖ − ‖δ‖/2)) when ‖μ‖ > ‖δ‖/2, else nullopt (inefficient).
inline std::optional<double> saddt_mcusum(double delta_norm, double mu_norm, double arl0) {
  detail::require_positive(delta_norm, "delta");
  detail::require_positive(arl0, "ARL0");
  if (!(mu_norm > 0.5 * delta_norm)) return std::nullopt;
  return std::log(arl0) / (delta_norm * (mu_norm - 0.5 * delta_norm));
}

/// d solving arl0_mcusum(n, ‖δ‖, d) = target. Known to be far from simulation at moderate N.
inline double solve_mcusum_threshold(std::size_t n, double delta_norm, double target_arl0) {
  const double log_target = std::log(target_arl0);
  const auto f = [&](double d) { return std::log(arl0_mcusum(n, delta_norm, d)) - log_target; };
  // log ARL is increasing once ‖δ‖ > (N−1)/(2d); start the bracket past that point.
  const double lo = std::max(1e-3, (static_cast<double>(n) - 1.0) / (2.0 * delta_norm));
  return detail::bisect_increasing(f, lo, lo + 200.0 / delta_norm, 1e-9, "MCUSUM threshold");
}

// ---- GLRT -----------------------------------------------------------------

/// ∫_{u₀}^∞ (u/2) e^{−2ρ₊u} du = e^{−2ρ₊u₀} (u₀/(4ρ₊) + 1/(8ρ₊²)).
inline double glrt_tail(double u0) {
  const double r = kRhoPlus;
  return std::exp(-2.0 * r * u0) * (u0 / (4.0 * r) + 1.0 / (8.0 * r * r));
}

/// ARL₀ = (Γ(N/2)/2) (b²/2)^{−N/2} e^{b²/2} / ∫_{b/√W}^∞ (u υ²(u)/2) du with υ(u) ≈ e^{−ρ₊u}.
inline double arl0_glrt(std::size_t n, double b, double window_cap) {
  if (n < 1) throw std::invalid_argument("design: n must be positive");
  detail::require_positive(b, "b");
  detail::require_positive(window_cap, "window");
  const double a = 0.5 * static_cast<double>(n);
  const double x = 0.5 * b * b;
  const double tail = glrt_tail(b / std::sqrt(window_cap));
  return std::exp(boost::math::lgamma(a) - std::log(2.0) - a * std::log(x) + x - std::log(tail));
}

/// 2 ln ARL₀ / ‖μ‖².
inline double saddt_glrt(double mu_norm2, double arl0) {
  detail::require_positive(mu_norm2, "signal");
  detail::require_positive(arl0, "ARL0");
  return 2.0 * std::log(arl0) / mu_norm2;
}

/// b with arl0_glrt(n, b, W) = target; searched where the formula is increasing (b² > N).
inline double solve_glrt_threshold(std::size_t n, double window_cap, double target_arl0) {
  const double log_target = std::log(target_arl0);
  const auto f = [&](double b) { return std::log(arl0_glrt(n, b, window_cap)) - log_target; };
  return detail::bisect_increasing(f, std::sqrt(static_cast<double>(n)) + 1e-6, 100.0, 1e-9,
                                   "GLRT threshold");
}

// ---- Shiryayev-Roberts ------------------------------------------------------

struct SrThresholds {
  double mixture;  // B for the single mixture S-R: ARL₀ ≈ B e^{δρ₊}
  double sum;      // B for the sum of N S-R processes: ARL₀ ≈ (B/N) e^{δρ₊}
};

inline SrThresholds sr_thresholds(std::size_t n, double target_arl0, double delta) {
  if (!(target_arl0 > 1.0)) throw std::invalid_argument("design: target ARL0 must exceed 1");
  if (!(delta >= 0.0)) throw std::invalid_argument("design: delta must be >= 0");
  const double mixture = target_arl0 * std::exp(-delta * kRhoPlus);
  return {mixture, static_cast<double>(n) * mixture};
}

}  // namespace seqwatch::design
