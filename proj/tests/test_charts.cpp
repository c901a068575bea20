// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "seqwatch/charts.hpp"

using namespace seqwatch;

namespace {

ChartConfig make(Variant v, double threshold = 1e9) {
  ChartConfig c;
  c.variant = v;
  c.threshold = threshold;
  return c;
}

ChartConfig windowed(Variant v, std::size_t w, double threshold = 1e9) {
  ChartConfig c = make(v, threshold);
  c.window = w;
  return c;
}

std::vector<double> e1(std::size_t n, double a) {
  std::vector<double> x(n, 0.0);
  x[0] = a;
  return x;
}

const Variant kAll[] = {Variant::Mewma,          Variant::Mewma0,      Variant::Mma,
                        Variant::McusumWindowed, Variant::McusumRecursive, Variant::Glrt,
                        Variant::SrMixture,      Variant::SumSr,       Variant::AdaptiveCusum,
                        Variant::AdaptiveSr,     Variant::AdaptiveSumSr};

}  // namespace

TEST(Ewma, OneStep) {
  ChartConfig c = make(Variant::Mewma, 0.2);
  c.beta = 0.5;
  Chart chart(c, CovModel::identity(2));
  const auto out = chart.step(std::vector<double>{1.0, 0.0});
  EXPECT_DOUBLE_EQ(chart.state().y[0], 0.5);
  EXPECT_DOUBLE_EQ(chart.state().y[1], 0.0);
  EXPECT_DOUBLE_EQ(out.statistic, 0.25);
  EXPECT_TRUE(out.alarmed);
}

TEST(Ewma, HardAndSoftModes) {
  ChartConfig c = make(Variant::Mewma);
  c.beta = 1.0;
  c.mode = ThresholdMode::Hard;
  c.trim = 0.5;
  Chart hard(c, CovModel::identity(3));
  EXPECT_NEAR(hard.step(std::vector<double>{0.4, 0.6, -0.7}).statistic, 0.85, 1e-15);

  c.mode = ThresholdMode::Soft;
  c.odds = 9.0;
  Chart soft(c, CovModel::identity(3));
  EXPECT_EQ(soft.step(std::vector<double>{0.0, 0.0, 0.0}).statistic, 0.0);
  // e^{u²/2}/(q + e^{u²/2}) · u² at u = 2.
  Chart soft2(c, CovModel::identity(1));
  EXPECT_NEAR(soft2.step(std::vector<double>{2.0}).statistic, 4.0 * std::exp(2.0) / (9.0 + std::exp(2.0)), 1e-14);
}

TEST(Ewma, Mewma0IgnoresDependence) {
  ChartConfig c = make(Variant::Mewma0);
  c.beta = 1.0;
  const auto model = CovModel::intra_class(2, 0.5, 3.0);
  Chart naive(c, model);
  EXPECT_DOUBLE_EQ(naive.step(std::vector<double>{1.0, 1.0}).statistic, 4.0);
  c.variant = Variant::Mewma;
  Chart aware(c, model);
  EXPECT_NEAR(aware.step(std::vector<double>{1.0, 1.0}).statistic, model.quad_form(std::vector<double>{1.0, 1.0}),
              1e-15);
}

TEST(Ma, WindowMeanAndWarmUp) {
  Chart chart(windowed(Variant::Mma, 2, 1.5), CovModel::identity(2));
  const auto first = chart.step(std::vector<double>{2.0, 0.0});
  EXPECT_EQ(first.statistic, 0.0);
  EXPECT_FALSE(first.alarmed);
  const auto second = chart.step(std::vector<double>{0.0, 2.0});
  EXPECT_DOUBLE_EQ(second.statistic, 2.0);
  EXPECT_TRUE(second.alarmed);
}

TEST(Ma, HardModeCountsLargeEntriesOnly) {
  ChartConfig c = windowed(Variant::Mma, 1, 1.26);
  c.mode = ThresholdMode::Hard;
  c.trim = 0.5;
  Chart chart(c, CovModel::identity(3));
  EXPECT_NEAR(chart.step(std::vector<double>{0.6, 0.3, -0.2}).statistic, 0.36, 1e-15);
}

TEST(CusumWindowed, HandCases) {
  ChartConfig c = windowed(Variant::McusumWindowed, 1);
  c.k_ref = 0.5;
  Chart one(c, CovModel::identity(2));
  EXPECT_DOUBLE_EQ(one.step(e1(2, 1.0)).statistic, 0.75);

  c.window = 2;
  Chart two(c, CovModel::identity(3));
  two.step(e1(3, 2.0));
  const auto out = two.step(e1(3, 2.0));
  EXPECT_DOUBLE_EQ(out.statistic, 3.5);
  EXPECT_EQ(out.argmax_window.value(), 2u);
}

TEST(CusumRecursive, ResetAndAccumulate) {
  ChartConfig c = make(Variant::McusumRecursive);
  c.k_ref = 0.5;
  Chart a(c, CovModel::identity(3));
  const auto z = a.step(std::vector<double>{0.0, 0.0, 0.0});
  EXPECT_EQ(z.statistic, 0.0);
  EXPECT_EQ(a.state().nu_hat, 1);

  Chart b(c, CovModel::identity(3));
  const auto out = b.step(e1(3, 1.0));
  EXPECT_DOUBLE_EQ(out.statistic, 0.75);
  EXPECT_EQ(out.nu_hat.value(), 0);
  EXPECT_EQ(b.state().nu_hat, 0);
  // Second step keeps summing since ν̂ = 0: ‖(2,0,0)‖ − 0.25·2 = 1.5.
  EXPECT_DOUBLE_EQ(b.step(e1(3, 1.0)).statistic, 1.5);
}

TEST(Glrt, HandCases) {
  Chart one(windowed(Variant::Glrt, 1), CovModel::identity(2));
  EXPECT_DOUBLE_EQ(one.step(std::vector<double>{1.0, 1.0}).statistic, 2.0);
  Chart two(windowed(Variant::Glrt, 2), CovModel::identity(3));
  two.step(e1(3, 2.0));
  const auto out = two.step(e1(3, 2.0));
  EXPECT_DOUBLE_EQ(out.statistic, 8.0);
  EXPECT_EQ(out.argmax_window.value(), 2u);
}

TEST(ShiryayevRoberts, ZeroExponent) {
  ChartConfig c = make(Variant::SumSr);
  c.k_ref = 0.5;
  Chart chart(c, CovModel::identity(1));
  EXPECT_DOUBLE_EQ(chart.step(std::vector<double>{0.25}).statistic, 1.0);
}

TEST(ShiryayevRoberts, MixtureRecursion) {
  ChartConfig c = make(Variant::SrMixture);
  c.k_ref = 0.2;
  Chart chart(c, CovModel::identity(2));
  const std::vector<double> x{0.3, -0.1};
  const double r1 = std::exp(0.2 * ((0.3 - 0.1) + (-0.1 - 0.1)));
  EXPECT_NEAR(chart.step(x).statistic, r1, 1e-15);
  EXPECT_NEAR(chart.step(x).statistic, (1.0 + r1) * r1, 1e-14);
}

TEST(Adaptive, FirstIncrementIsZero) {
  for (auto v : {Variant::AdaptiveCusum, Variant::AdaptiveSr, Variant::AdaptiveSumSr}) {
    Chart chart(make(v), CovModel::identity(4));
    const auto out = chart.step(std::vector<double>{3.0, -1.0, 2.0, 0.5});
    const double expected = v == Variant::AdaptiveCusum ? 0.0 : v == Variant::AdaptiveSr ? 1.0 : 4.0;
    EXPECT_EQ(out.statistic, expected) << to_string(v);
  }
}

TEST(Adaptive, UsesPreviousEstimate) {
  ChartConfig c = make(Variant::AdaptiveCusum);
  c.beta = 0.5;
  Chart chart(c, CovModel::identity(1));
  chart.step(std::vector<double>{2.0});  // μ̂₁ = 1
  // W₂ = max(0, 0 + 1·(3 − 0.5)) = 2.5
  EXPECT_DOUBLE_EQ(chart.step(std::vector<double>{3.0}).statistic, 2.5);
  EXPECT_DOUBLE_EQ(chart.state().y[0], 2.0);
}

TEST(Validate, RejectsBadConfigurations) {
  const auto id = CovModel::identity(3);
  auto bad = [&](ChartConfig c, const CovModel& m) { EXPECT_THROW(Chart(c, m), std::invalid_argument); };
  ChartConfig c = make(Variant::Mewma, -1.0);
  bad(c, id);
  c = make(Variant::Mewma, std::nan(""));
  bad(c, id);
  c = make(Variant::Mewma);
  c.beta = 0.0;
  bad(c, id);
  c.beta = 1.5;
  bad(c, id);
  bad(windowed(Variant::Glrt, 0), id);
  c = make(Variant::McusumWindowed);
  c.window = 5;
  c.k_ref = 0.0;
  bad(c, id);
  c = make(Variant::Mewma);
  c.mode = ThresholdMode::Hard;
  bad(c, CovModel::intra_class(3, 1.0, 1.0));
  c = windowed(Variant::Mma, 3);
  c.mode = ThresholdMode::Soft;
  bad(c, id);
  c = windowed(Variant::Glrt, 3);
  c.mode = ThresholdMode::Hard;
  bad(c, id);

  Chart ok(make(Variant::Mewma), id);
  EXPECT_THROW(ok.step(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Validate, ZeroAndInfiniteThresholdsAreAccepted) {
  Chart zero(make(Variant::Mewma, 0.0), CovModel::identity(2));
  EXPECT_TRUE(zero.step(std::vector<double>{0.1, 0.0}).alarmed);
  Chart inf(make(Variant::Mewma, std::numeric_limits<double>::infinity()), CovModel::identity(2));
  EXPECT_FALSE(inf.step(std::vector<double>{100.0, 0.0}).alarmed);
}

TEST(Property, AlarmConsistencyAllVariants) {
  const auto model = CovModel::identity(5);
  for (auto v : kAll) {
    for (double thr : {0.0, 0.5, 3.0, 50.0}) {
      ChartConfig c = make(v, thr);
      c.window = 4;
      c.k_ref = 0.4;
      Chart chart(c, model);
      RandomStream g(1, static_cast<std::uint64_t>(v));
      std::vector<double> x(5);
      for (int t = 0; t < 200; ++t) {
        for (double& xi : x) xi = g.normal() + 0.3;
        const auto out = chart.step(x);
        ASSERT_EQ(out.alarmed, out.statistic > out.threshold) << to_string(v);
        ASSERT_EQ(out.threshold, thr);
      }
    }
  }
}

TEST(Property, BetaOneTracksObservation) {
  ChartConfig c = make(Variant::Mewma);
  c.beta = 1.0;
  Chart chart(c, CovModel::intra_class(4, 1.0, 2.0));
  RandomStream g(2, 0);
  std::vector<double> x(4);
  for (int t = 0; t < 50; ++t) {
    for (double& xi : x) xi = g.normal();
    chart.step(x);
    ASSERT_EQ(chart.state().y, x);
  }
}

TEST(Property, ThresholdCollapse) {
  const auto model = CovModel::identity(6, 0.7);
  ChartConfig plain = make(Variant::Mewma0);
  ChartConfig hard = plain;
  hard.mode = ThresholdMode::Hard;
  hard.trim = 0.0;
  ChartConfig soft = plain;
  soft.mode = ThresholdMode::Soft;
  soft.odds = 0.0;
  Chart a(plain, model), b(hard, model), c(soft, model);
  RandomStream g(3, 0);
  std::vector<double> x(6);
  for (int t = 0; t < 500; ++t) {
    for (double& xi : x) xi = g.normal();
    const double ref = a.step(x).statistic;
    ASSERT_NEAR(b.step(x).statistic, ref, 1e-12);
    ASSERT_NEAR(c.step(x).statistic, ref, 1e-12);
  }
}

TEST(Property, ShiryayevRobertsNullMartingale) {
  const std::size_t n = 20;
  const auto model = CovModel::identity(n);
  struct Case {
    Variant v;
    double k;
    double scale;  // E[statistic_t] = scale · t
  };
  const Case cases[] = {{Variant::SrMixture, 0.5 / std::sqrt(20.0), 1.0},
                        {Variant::SumSr, 0.5, 20.0}};
  const int reps = 100000;
  for (const auto& cs : cases) {
    ChartConfig c = make(cs.v);
    c.k_ref = cs.k;
    Chart chart(c, model);
    double sum[3] = {0, 0, 0}, sum2[3] = {0, 0, 0};
    std::vector<double> x(n);
    for (int r = 0; r < reps; ++r) {
      chart.reset();
      RandomStream g(11, static_cast<std::uint64_t>(r));
      for (int t = 1; t <= 20; ++t) {
        model.sample_shock(g, x);
        const double s = chart.step(x).statistic;
        const int slot = t == 1 ? 0 : t == 5 ? 1 : t == 20 ? 2 : -1;
        if (slot >= 0) {
          sum[slot] += s;
          sum2[slot] += s * s;
        }
      }
    }
    const int ts[3] = {1, 5, 20};
    for (int i = 0; i < 3; ++i) {
      const double mean = sum[i] / reps;
      const double se = std::sqrt((sum2[i] / reps - mean * mean) / reps);
      EXPECT_NEAR(mean, cs.scale * ts[i], 4.0 * se) << to_string(cs.v) << " t=" << ts[i];
    }
  }
}

TEST(Property, WindowedDominance) {
  const auto model = CovModel::intra_class(4, 1.0, 1.5);
  RandomStream g(4, 0);
  std::vector<std::vector<double>> path(60, std::vector<double>(4));
  for (auto& x : path) model.sample_shock(g, x);

  Chart glrt1(windowed(Variant::Glrt, 1), model);
  for (const auto& x : path) ASSERT_DOUBLE_EQ(glrt1.step(x).statistic, model.quad_form(x));

  std::vector<std::vector<double>> stats;
  for (std::size_t w = 1; w <= 8; ++w) {
    ChartConfig c = windowed(Variant::McusumWindowed, w);
    Chart chart(c, model);
    std::vector<double> s;
    for (const auto& x : path) s.push_back(chart.step(x).statistic);
    stats.push_back(s);
  }
  for (std::size_t w = 1; w < stats.size(); ++w)
    for (std::size_t t = 0; t < path.size(); ++t) ASSERT_GE(stats[w][t], stats[w - 1][t]);
}

TEST(Property, RecursiveCusumResetRule) {
  ChartConfig c = make(Variant::McusumRecursive);
  c.k_ref = 0.5;
  const auto model = CovModel::identity(3);
  Chart chart(c, model);
  RandomStream g(6, 0);
  std::vector<double> x(3);
  for (int t = 1; t <= 2000; ++t) {
    model.sample_shock(g, x);
    if (t > 1000) x[0] += 0.4;
    const std::int64_t before = chart.state().nu_hat;
    const auto out = chart.step(x);
    ASSERT_GE(out.statistic, 0.0);
    ASSERT_EQ(out.nu_hat.value(), before);
    if (out.statistic == 0.0) ASSERT_EQ(chart.state().nu_hat, t);
    else ASSERT_EQ(chart.state().nu_hat, before);
    ASSERT_GE(chart.state().nu_hat, 0);
    ASSERT_LE(chart.state().nu_hat, t);
  }
}

TEST(Reset, ReplayAndFreshAgree) {
  const auto model = CovModel::loading(1.0, 2.0, {0.6, 0.8, 0.0});
  for (auto v : kAll) {
    ChartConfig c = make(v);
    c.window = 5;
    auto trajectory = [&](Chart& chart) {
      RandomStream g(8, 0);
      std::vector<double> x(3), out;
      for (int t = 0; t < 100; ++t) {
        model.sample_shock(g, x);
        out.push_back(chart.step(x).statistic);
      }
      return out;
    };
    Chart used(c, model);
    const auto first = trajectory(used);
    used.reset();
    EXPECT_EQ(used.state().t, 0);
    EXPECT_EQ(used.state().count, 0u);
    EXPECT_EQ(used.state().r, 0.0);
    EXPECT_EQ(used.state().mc1, 0.0);
    EXPECT_EQ(used.state().w_stat, 0.0);
    EXPECT_EQ(used.state().nu_hat, 0);
    const auto replay = trajectory(used);
    Chart fresh(c, model);
    const auto again = trajectory(fresh);
    EXPECT_EQ(first, replay) << to_string(v);
    EXPECT_EQ(first, again) << to_string(v);
  }
}

TEST(Names, RoundTrip) {
  for (auto v : kAll) EXPECT_EQ(parse_variant(to_string(v)), v);
  for (auto m : {ThresholdMode::None, ThresholdMode::Hard, ThresholdMode::Soft})
    EXPECT_EQ(parse_threshold_mode(to_string(m)), m);
  EXPECT_THROW(parse_variant("ewma"), std::invalid_argument);
}
