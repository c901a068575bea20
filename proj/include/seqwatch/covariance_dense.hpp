// SPDX-License-Identifier: Apache-2.0
//
// Explicit N×N matrices for a CovModel. Test and diagnostics only; the
// streaming code never materializes Σ.

#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "seqwatch/covariance.hpp"

namespace seqwatch {

struct DenseCovariance {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd sigma_inv;  // closed form from Sylvester's identity
  double det = 1.0;
};

inline constexpr std::size_t kDenseMaxN = 2000;

inline DenseCovariance dense(const CovModel& model) {
  const auto n = static_cast<Eigen::Index>(model.n());
  if (model.n() > kDenseMaxN)
    throw std::invalid_argument("dense: n exceeds " + std::to_string(kDenseMaxN));

  Eigen::VectorXd dir;
  double scale = 0.0;  // Σ = σ_e² (I + scale·dir dirᵀ)
  switch (model.kind()) {
    case CovKind::Identity:
      dir = Eigen::VectorXd::Zero(n);
      break;
    case CovKind::IntraClass:
      dir = Eigen::VectorXd::Ones(n);
      scale = model.theta() / static_cast<double>(n);
      break;
    case CovKind::Loading:
      dir = Eigen::Map<const Eigen::VectorXd>(model.gamma().data(), n);
      scale = model.theta();
      break;
  }
  const Eigen::MatrixXd outer = dir * dir.transpose();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

  DenseCovariance out;
  out.sigma = model.sigma_e2() * (eye + scale * outer);
  // (I + s·ddᵀ)⁻¹ = I − s/(1 + s·dᵀd)·ddᵀ; for both factor models s/(1+s·dᵀd)·ddᵀ = ρ·(ddᵀ/dᵀd).
  const double dd = dir.squaredNorm();
  const double shrink = dd > 0.0 ? scale / (1.0 + scale * dd) : 0.0;
  out.sigma_inv = (eye - shrink * outer) / model.sigma_e2();
  out.det = std::exp(model.log_det());
  return out;
}

}  // namespace seqwatch
