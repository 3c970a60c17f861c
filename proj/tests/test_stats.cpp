#include <gtest/gtest.h>

#include <cmath>

#include "mtcp/rng.hpp"
#include "mtcp/stats.hpp"

using namespace mtcp;
using namespace mtcp::stats;

TEST(Wilson, KnownValues) {
  // 15 of 20 at 95%: 0.5313 to 0.8881.
  auto i = wilson(15, 20);
  EXPECT_NEAR(i.lo, 0.5313, 1e-4);
  EXPECT_NEAR(i.hi, 0.8881, 1e-4);
  EXPECT_EQ(wilson(0, 10).lo, 0.0);
  EXPECT_EQ(wilson(10, 10).hi, 1.0);
  EXPECT_TRUE(wilson(3, 7).contains(3.0 / 7.0));
}

TEST(Newcombe, UnpairedKnownValue) {
  // 56/70 vs 48/80: 0.0524 to 0.3339.
  auto i = newcombe_unpaired(56, 70, 48, 80);
  EXPECT_NEAR(i.lo, 0.0524, 1e-4);
  EXPECT_NEAR(i.hi, 0.3339, 1e-4);
}

TEST(Newcombe, PairedKnownValue) {
  // Table 36/12/2/4 (n = 54), uncorrected phi; recomputed independently.
  auto i = newcombe_paired(36, 12, 2, 4);
  EXPECT_NEAR(i.lo, 0.056253, 1e-5);
  EXPECT_NEAR(i.hi, 0.313409, 1e-5);
  // Independent pairs reduce to the unpaired width when phi = 0.
  auto j = newcombe_paired(25, 25, 25, 25);
  EXPECT_NEAR(j.lo, -j.hi, 1e-12);
}

TEST(Trend, DetectsDecrease) {
  std::size_t k[3] = {60, 45, 30}, n[3] = {100, 100, 100};
  double s[3] = {1, 2, 3};
  auto t = cochran_armitage(k, n, s);
  EXPECT_LT(t.z, 0);
  EXPECT_LT(t.p_decreasing, 1e-4);
  std::size_t flat[3] = {50, 50, 50};
  EXPECT_NEAR(cochran_armitage(flat, n, s).p_decreasing, 0.5, 1e-12);
}

TEST(ChiSquare, PoissonSamplesFit) {
  Engine rng(1);
  std::vector<std::size_t> c(5000);
  for (auto& v : c) {
    std::size_t n = 0;
    double t = 0;
    while ((t += exponential(rng, 1.0)) < 4.0) ++n;
    v = n;
  }
  EXPECT_GT(poisson_gof(c, 4.0).p, 1e-3);
  EXPECT_LT(poisson_gof(c, 5.0).p, 1e-3);
}

TEST(Fit, ExactLineAndLogLinear) {
  double x[4] = {0, 1, 2, 3}, y[4] = {1, 3, 5, 7}, w[4] = {1, 1, 1, 1};
  auto f = weighted_fit(x, y, w);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  std::size_t k[4] = {800, 400, 200, 100}, n[4] = {1000, 1000, 1000, 1000};
  auto g = log_linear_fit(x, k, n);
  EXPECT_NEAR(g.slope, std::log(0.5), 0.05);
  EXPECT_LT(g.p_negative, 1e-6);
}

TEST(Ks, SameAndShifted) {
  Engine rng(2);
  std::vector<double> a(2000), b(2000), c(2000);
  for (auto& v : a) v = uniform01(rng);
  for (auto& v : b) v = uniform01(rng);
  for (auto& v : c) v = uniform01(rng) + 0.1;
  EXPECT_GT(ks_two_sample(a, b).p, 1e-3);
  EXPECT_LT(ks_two_sample(a, c).p, 1e-3);
  EXPECT_NEAR(kolmogorov_tail(1.36), 0.049, 1e-3);
}

TEST(Summary, MeanQuantileTv) {
  std::vector<double> v{1, 2, 3, 4, 5};
  auto m = mean_ci(v);
  EXPECT_DOUBLE_EQ(m.mean, 3.0);
  EXPECT_NEAR(m.ci.hi - 3.0, 2.776 * std::sqrt(2.5 / 5), 1e-3);
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.25), 2.0);
  double p[2] = {0.5, 0.5}, q[2] = {0.2, 0.8};
  EXPECT_DOUBLE_EQ(total_variation(p, q), 0.3);
}
