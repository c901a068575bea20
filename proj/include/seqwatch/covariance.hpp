// SPDX-License-Identifier: Apache-2.0
//
// Structured covariance models for cross-sectionally dependent streams.
//
//   Identity    Σ = σ_e² I
//   IntraClass  Σ = σ_e² (I + (θ/N) J)      (equicorrelated via one shared factor)
//   Loading     Σ = σ_e² (I + θ γγᵀ),  |γ| = 1
//
// Both factor models have a rank-one inverse by Sherman-Morrison, so every
// quadratic form costs O(N) and no N×N matrix is ever formed. The dense
// matrices are available from covariance_dense.hpp for testing.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqwatch/rng.hpp"

namespace seqwatch {

enum class CovKind { Identity, IntraClass, Loading };

inline std::string_view to_string(CovKind kind) {
  switch (kind) {
    case CovKind::Identity: return "identity";
    case CovKind::IntraClass: return "intraclass";
    case CovKind::Loading: return "loading";
  }
  return "?";
}

inline CovKind parse_cov_kind(std::string_view s) {
  if (s == "identity") return CovKind::Identity;
  if (s == "intraclass" || s == "intra-class") return CovKind::IntraClass;
  if (s == "loading") return CovKind::Loading;
  throw std::invalid_argument("unknown covariance kind '" + std::string(s) + "'");
}

/// Immutable covariance model. Safe to share across threads.
class CovModel {
 public:
  /// Validates and builds a model. `gamma` is required iff kind == Loading.
  static CovModel build(CovKind kind, std::size_t n, double sigma_e2, double theta,
                        std::optional<std::vector<double>> gamma = std::nullopt) {
    if (n == 0) throw std::invalid_argument("covariance: n must be positive");
    if (!(sigma_e2 > 0.0) || !std::isfinite(sigma_e2))
      throw std::invalid_argument("covariance: sigma_e2 must be positive");
    if (!(theta >= 0.0) || !std::isfinite(theta))
      throw std::invalid_argument("covariance: theta must be non-negative");

    CovModel m;
    m.kind_ = kind;
    m.n_ = n;
    m.sigma_e2_ = sigma_e2;
    switch (kind) {
      case CovKind::Identity:
        if (theta != 0.0) throw std::invalid_argument("covariance: identity model requires theta = 0");
        if (gamma) throw std::invalid_argument("covariance: gamma only applies to the loading model");
        break;
      case CovKind::IntraClass:
        if (gamma) throw std::invalid_argument("covariance: gamma only applies to the loading model");
        m.theta_ = theta;
        break;
      case CovKind::Loading: {
        if (!gamma) throw std::invalid_argument("covariance: loading model requires gamma");
        if (gamma->size() != n)
          throw std::invalid_argument("covariance: gamma length " + std::to_string(gamma->size()) +
                                      " does not match n = " + std::to_string(n));
        const double norm2 = std::inner_product(gamma->begin(), gamma->end(), gamma->begin(), 0.0);
        if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9)
          throw std::invalid_argument("covariance: gamma must have unit norm");
        const double scale = 1.0 / std::sqrt(norm2);
        for (double& g : *gamma) g *= scale;
        m.gamma_ = std::move(*gamma);
        m.theta_ = theta;
        break;
      }
    }
    m.rho_ = m.theta_ / (1.0 + m.theta_);
    return m;
  }

  static CovModel identity(std::size_t n, double sigma_e2 = 1.0) {
    return build(CovKind::Identity, n, sigma_e2, 0.0);
  }
  static CovModel intra_class(std::size_t n, double sigma_e2, double theta) {
    return build(CovKind::IntraClass, n, sigma_e2, theta);
  }
  static CovModel loading(double sigma_e2, double theta, std::vector<double> gamma) {
    const std::size_t n = gamma.size();
    return build(CovKind::Loading, n, sigma_e2, theta, std::move(gamma));
  }

  CovKind kind() const { return kind_; }
  std::size_t n() const { return n_; }
  double sigma_e2() const { return sigma_e2_; }
  double theta() const { return theta_; }
  double rho() const { return rho_; }
  /// Factor variance σ_a² = θ σ_e².
  double sigma_a2() const { return theta_ * sigma_e2_; }
  const std::vector<double>& gamma() const { return gamma_; }

  /// True when Σ is a multiple of the identity (θ = 0 collapses both factor models).
  bool is_identity() const { return kind_ == CovKind::Identity || theta_ == 0.0; }

  /// uᵀ Σ⁻¹ v in O(N).
  double bilinear(std::span<const double> u, std::span<const double> v) const {
    check_length(u.size());
    check_length(v.size());
    const double uv = std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
    if (is_identity()) return uv / sigma_e2_;
    if (kind_ == CovKind::IntraClass) {
      const double su = std::accumulate(u.begin(), u.end(), 0.0);
      const double sv = std::accumulate(v.begin(), v.end(), 0.0);
      return (uv - rho_ / static_cast<double>(n_) * su * sv) / sigma_e2_;
    }
    const double gu = std::inner_product(gamma_.begin(), gamma_.end(), u.begin(), 0.0);
    const double gv = std::inner_product(gamma_.begin(), gamma_.end(), v.begin(), 0.0);
    return (uv - rho_ * gu * gv) / sigma_e2_;
  }

  /// vᵀ Σ⁻¹ v in O(N); clamped at 0 against rounding.
  double quad_form(std::span<const double> v) const {
    check_length(v.size());
    const double vv = std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
    if (is_identity()) return vv / sigma_e2_;
    double proj2;
    if (kind_ == CovKind::IntraClass) {
      const double s = std::accumulate(v.begin(), v.end(), 0.0);
      proj2 = s * s / static_cast<double>(n_);
    } else {
      const double g = std::inner_product(gamma_.begin(), gamma_.end(), v.begin(), 0.0);
      proj2 = g * g;
    }
    // vv - ρ·proj2 ≥ (1-ρ)·vv since proj2 ≤ vv (Cauchy-Schwarz).
    return std::max(vv - rho_ * proj2, 0.0) / sigma_e2_;
  }

  /// One draw of Z ~ N(0, Σ) through the factor construction
  /// Z_i = c_i a + e_i with a ~ N(0, σ_a²), e_i ~ N(0, σ_e²).
  void sample_shock(RandomStream& rng, std::span<double> out) const {
    check_length(out.size());
    const double se = std::sqrt(sigma_e2_);
    for (double& z : out) z = se * rng.normal();
    if (is_identity()) return;
    const double a = std::sqrt(sigma_a2()) * rng.normal();
    if (kind_ == CovKind::IntraClass) {
      const double shared = a / std::sqrt(static_cast<double>(n_));
      for (double& z : out) z += shared;
    } else {
      for (std::size_t i = 0; i < n_; ++i) out[i] += gamma_[i] * a;
    }
  }

  std::vector<double> sample_shock(RandomStream& rng) const {
    std::vector<double> z(n_);
    sample_shock(rng, z);
    return z;
  }

  /// det Σ = σ_e^{2N} (1 + θ), returned as a log to survive large N.
  double log_det() const {
    return static_cast<double>(n_) * std::log(sigma_e2_) + std::log1p(theta_);
  }

 private:
  CovModel() = default;

  void check_length(std::size_t len) const {
    if (len != n_)
      throw std::invalid_argument("covariance: vector length " + std::to_string(len) +
                                  " does not match n = " + std::to_string(n_));
  }

  CovKind kind_ = CovKind::Identity;
  std::size_t n_ = 1;
  double sigma_e2_ = 1.0;
  double theta_ = 0.0;
  double rho_ = 0.0;
  std::vector<double> gamma_;
};

}  // namespace seqwatch
