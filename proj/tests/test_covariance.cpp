// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "seqwatch/covariance.hpp"
#include "seqwatch/covariance_dense.hpp"

using namespace seqwatch;

namespace {

std::vector<double> unit_vector(RandomStream& g, std::size_t n) {
  std::vector<double> v(n);
  double s = 0.0;
  for (double& x : v) {
    x = g.normal();
    s += x * x;
  }
  for (double& x : v) x /= std::sqrt(s);
  return v;
}

CovModel random_model(RandomStream& g, std::size_t n, int kind) {
  const double se2 = 0.2 + 2.0 * g.uniform();
  const double theta = 10.0 * g.uniform();
  if (kind == 0) return CovModel::identity(n, se2);
  if (kind == 1) return CovModel::intra_class(n, se2, theta);
  return CovModel::loading(se2, theta, unit_vector(g, n));
}

}  // namespace

TEST(CovModel, UnitVarianceNormalization) {
  const auto m = CovModel::intra_class(10, 0.9, 1.0 / 0.9);
  EXPECT_NEAR(m.sigma_e2() + m.sigma_a2() / 10.0, 1.0, 1e-15);
  EXPECT_NEAR(m.rho(), m.theta() / (1.0 + m.theta()), 1e-15);
}

TEST(CovModel, IdentityBasics) {
  const auto m = CovModel::identity(20);
  EXPECT_EQ(m.rho(), 0.0);
  EXPECT_TRUE(m.is_identity());
  const auto d = dense(m);
  EXPECT_TRUE(d.sigma.isApprox(Eigen::MatrixXd::Identity(20, 20)));
}

TEST(CovModel, LoadingTwoChannels) {
  const auto m = CovModel::loading(1.0, 1.0, {1.0, 0.0});
  EXPECT_DOUBLE_EQ(m.rho(), 0.5);
  const auto d = dense(m);
  EXPECT_DOUBLE_EQ(d.sigma(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(d.sigma(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(d.sigma(0, 1), 0.0);
  EXPECT_NEAR(d.det, 2.0, 1e-14);
}

TEST(CovModel, RejectsBadParameters) {
  EXPECT_THROW(CovModel::build(CovKind::Identity, 0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(CovModel::intra_class(3, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(CovModel::intra_class(3, -1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(CovModel::intra_class(3, 1.0, -0.1), std::invalid_argument);
  EXPECT_THROW(CovModel::build(CovKind::Identity, 3, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(CovModel::build(CovKind::Loading, 3, 1.0, 1.0, std::vector<double>{1.0, 0.0}),
               std::invalid_argument);
  EXPECT_THROW(CovModel::loading(1.0, 1.0, {1.0, 1e-3}), std::invalid_argument);
  EXPECT_THROW(CovModel::build(CovKind::IntraClass, 2, 1.0, 1.0, std::vector<double>{1.0, 0.0}),
               std::invalid_argument);
  EXPECT_THROW(CovModel::build(CovKind::Loading, 2, 1.0, 1.0), std::invalid_argument);
}

TEST(CovModel, LoadingRenormalizesWithinTolerance) {
  const auto m = CovModel::loading(1.0, 2.0, {0.6 * (1 + 1e-10), 0.8 * (1 + 1e-10)});
  const double n2 = m.gamma()[0] * m.gamma()[0] + m.gamma()[1] * m.gamma()[1];
  EXPECT_LE(std::abs(n2 - 1.0), 1e-12);
}

TEST(QuadForm, HandExamples) {
  EXPECT_DOUBLE_EQ(CovModel::identity(2).quad_form(std::vector<double>{3.0, 4.0}), 25.0);
  EXPECT_NEAR(CovModel::intra_class(2, 1.0, 1.0).quad_form(std::vector<double>{1.0, 1.0}), 1.0, 1e-15);
  EXPECT_NEAR(CovModel::loading(1.0, 1.0, {1.0, 0.0}).quad_form(std::vector<double>{1.0, 1.0}), 1.5, 1e-15);
}

TEST(QuadForm, LengthMismatchThrows) {
  EXPECT_THROW(CovModel::identity(3).quad_form(std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST(Dense, DeterminantsAndIdentity) {
  EXPECT_NEAR(dense(CovModel::intra_class(2, 1.0, 1.0)).det, 2.0, 1e-14);
  const auto d = dense(CovModel::identity(3));
  EXPECT_TRUE(d.sigma.isApprox(Eigen::MatrixXd::Identity(3, 3)));
  EXPECT_TRUE(d.sigma_inv.isApprox(Eigen::MatrixXd::Identity(3, 3)));
  EXPECT_DOUBLE_EQ(d.det, 1.0);
  EXPECT_THROW(dense(CovModel::identity(kDenseMaxN + 1)), std::invalid_argument);
}

TEST(Dense, DeterminantMatchesLu) {
  RandomStream g(5, 0);
  for (int kind = 0; kind < 3; ++kind) {
    const auto m = random_model(g, 6, kind);
    const auto d = dense(m);
    EXPECT_NEAR(std::log(d.sigma.determinant()), m.log_det(), 1e-10);
  }
}

TEST(Property, SylvesterInverse) {
  RandomStream g(17, 0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(g.uniform() * 50);
    const auto d = dense(random_model(g, n, trial % 3));
    const Eigen::MatrixXd err = d.sigma * d.sigma_inv - Eigen::MatrixXd::Identity(d.sigma.rows(), d.sigma.cols());
    EXPECT_LE(err.cwiseAbs().maxCoeff(), 1e-10) << "n=" << n;
  }
}

TEST(Property, QuadFormMatchesDenseOracle) {
  RandomStream g(23, 0);
  for (int trial = 0; trial < 90; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(g.uniform() * 40);
    const auto m = random_model(g, n, trial % 3);
    // Oracle: LU solve on the explicit Σ, independent of the closed-form inverse.
    Eigen::MatrixXd sigma = dense(m).sigma;
    std::vector<double> v(n);
    for (double& x : v) x = 3.0 * g.normal();
    const Eigen::Map<Eigen::VectorXd> ev(v.data(), static_cast<Eigen::Index>(n));
    const double oracle = ev.dot(sigma.partialPivLu().solve(ev));
    const double got = m.quad_form(v);
    EXPECT_LE(std::abs(got - oracle), 1e-9 * (1.0 + std::abs(got)));
    std::vector<double> u(n);
    for (double& x : u) x = g.normal();
    const Eigen::Map<Eigen::VectorXd> eu(u.data(), static_cast<Eigen::Index>(n));
    EXPECT_LE(std::abs(m.bilinear(u, v) - eu.dot(sigma.partialPivLu().solve(ev))), 1e-9 * (1.0 + std::abs(oracle)));
  }
}

TEST(Property, PositiveDefinite) {
  RandomStream g(29, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = random_model(g, 8, trial % 3);
    std::vector<double> v(8);
    for (double& x : v) x = g.normal();
    EXPECT_GT(m.quad_form(v), 0.0);
  }
  // The direction most inflated by the factor is still strictly positive.
  const auto m = CovModel::intra_class(5, 1.0, 1e6);
  EXPECT_GT(m.quad_form(std::vector<double>(5, 1.0)), 0.0);
  EXPECT_EQ(m.quad_form(std::vector<double>(5, 0.0)), 0.0);
}

namespace {

void check_moments(const CovModel& m, std::uint64_t seed) {
  const std::size_t n = m.n();
  const int draws = 100000;
  RandomStream g(seed, 0);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<double> z(n);
  for (int i = 0; i < draws; ++i) {
    m.sample_shock(g, z);
    const Eigen::Map<Eigen::VectorXd> ez(z.data(), static_cast<Eigen::Index>(n));
    acc.noalias() += ez * ez.transpose();
  }
  acc /= draws;
  const Eigen::MatrixXd s = dense(m).sigma;
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      const double se = std::sqrt((s(i, i) * s(j, j) + s(i, j) * s(i, j)) / draws);
      EXPECT_NEAR(acc(i, j), s(i, j), 5.0 * se) << i << "," << j;
    }
}

}  // namespace

TEST(SampleShock, IdentityMoments) {
  check_moments(CovModel::identity(4), 1);
}

TEST(SampleShock, IntraClassUnitVariance) {
  const auto m = CovModel::intra_class(10, 0.5, 5.0 / 0.5);
  check_moments(m, 2);
  RandomStream g(3, 0);
  const int draws = 100000;
  std::vector<double> z(10);
  double v = 0.0;
  for (int i = 0; i < draws; ++i) {
    m.sample_shock(g, z);
    v += z[3] * z[3];
  }
  EXPECT_NEAR(v / draws, 1.0, 0.02);
}

TEST(SampleShock, LoadingMoments) {
  check_moments(CovModel::loading(1.0, 1.0, {1.0, 0.0}), 4);
  RandomStream g(5, 0);
  check_moments(CovModel::loading(0.7, 3.0, unit_vector(g, 5)), 6);
}
