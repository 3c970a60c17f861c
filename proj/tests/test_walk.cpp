#include <gtest/gtest.h>

#include <cmath>

#include "mtcp/walk.hpp"

using namespace mtcp;
using namespace mtcp::walk;

namespace {

StepDistribution two_one() { return StepDistribution({{2, 0.7}, {-1, 0.3}}, {{1.0, 1.0}}); }

}  // namespace

TEST(StepDistribution, MomentsAndValidation) {
  auto d = StepDistribution({{2, 7.0}, {-1, 3.0}}, {{0.5, 1.0}, {1.5, 1.0}});
  EXPECT_DOUBLE_EQ(d.mean_x(), 1.1);
  EXPECT_DOUBLE_EQ(d.mean_tau(), 1.0);
  EXPECT_DOUBLE_EQ(d.beta_bar(), 1.1);
  EXPECT_EQ(d.min_x(), -1);
  EXPECT_EQ(d.max_x(), 2);
  EXPECT_THROW(StepDistribution({{1, 0.5}, {-1, 0.5}}, {{1.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(StepDistribution({{1, 1.0}}, {{0.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(StepDistribution({{1, -1.0}}, {{1.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(StepDistribution({}, {{1.0, 1.0}}), std::invalid_argument);
}

TEST(Simulate, DeterministicUnitSteps) {
  auto r = simulate_walk(StepDistribution::deterministic(1), 0, 0.0, 6, 1);
  EXPECT_EQ(r.S, (std::vector<int>{0, 1, 0, 1, 0, 1, 0}));
  EXPECT_EQ(r.S_plus, (std::vector<int>{0, 1, 2, 3, 4, 5, 6}));
  for (std::size_t n = 0; n <= 6; ++n) EXPECT_DOUBLE_EQ(r.T[n], static_cast<double>(n));
}

TEST(Simulate, SignRuleAndSharedDraws) {
  auto r = simulate_walk(two_one(), 3, 2.0, 500, 9);
  EXPECT_EQ(r.steps(), 500u);
  EXPECT_DOUBLE_EQ(r.T[0], 2.0);
  for (std::size_t n = 1; n <= r.steps(); ++n) {
    int x = r.X[n - 1];
    EXPECT_EQ(r.S[n] - r.S[n - 1], r.S[n - 1] <= 0 ? x : -x);
    EXPECT_EQ(r.S_plus[n] - r.S_plus[n - 1], x);
    EXPECT_GE(r.T[n], r.T[n - 1]);
  }
}

TEST(Simulate, LawOfLargeNumbers) {
  auto d = two_one();
  std::vector<double> v;
  for (std::uint64_t s = 0; s < 200; ++s) {
    auto r = simulate_walk(d, 0, 0.0, 1000, run_seed(31, s));
    v.push_back(r.S_plus.back() / 1000.0);
  }
  auto m = stats::mean_ci(v, 0.999);
  EXPECT_TRUE(m.ci.contains(1.1)) << m.ci.lo << " " << m.ci.hi;
}

TEST(Simulate, Reproducible) {
  auto a = simulate_walk(two_one(), 0, 0.0, 100, 5);
  auto b = simulate_walk(two_one(), 0, 0.0, 100, 5);
  EXPECT_EQ(to_json(a), to_json(b));
}

TEST(Hitting, StartInsideIsZero) {
  auto r = simulate_walk(two_one(), 4, 0.0, 10, 1);
  EXPECT_EQ(hitting_time(r, Track::S, Region::closed(0, 5)).index, 0u);
  EXPECT_EQ(hitting_time(r, Track::T, Region::at_least(0)).index, 0u);
}

TEST(Hitting, DeterministicTwoSteps) {
  auto r = simulate_walk(StepDistribution::deterministic(2), 0, 0.0, 5, 1);
  auto h = r.record(Track::S_plus, Region::at_least(3));
  EXPECT_EQ(h.index, 2u);
  EXPECT_FALSE(h.censored);
  ASSERT_EQ(r.hits.size(), 1u);
  auto c = hitting_time(r, Track::S_plus, Region::at_least(100));
  EXPECT_TRUE(c.censored);
  EXPECT_EQ(c.index, 6u);
}

TEST(Hitting, MalformedRegions) {
  auto r = simulate_walk(two_one(), 0, 0.0, 3, 1);
  EXPECT_THROW(hitting_time(r, Track::S, Region::closed(3, 1)), std::invalid_argument);
  EXPECT_THROW(hitting_time(r, Track::S, Region{1, 1, true, false}), std::invalid_argument);
  EXPECT_THROW(hitting_time(r, Track::S, Region{NAN, 1, false, false}), std::invalid_argument);
}

TEST(Hitting, MatchesLinearScan) {
  Engine rng(3);
  for (std::uint64_t s = 0; s < 1000; ++s) {
    auto r = simulate_walk(two_one(), static_cast<int>(uniform_index(rng, 21)) - 10, 0.0, 60, s);
    double a = static_cast<double>(uniform_index(rng, 21)) - 10;
    double b = a + static_cast<double>(uniform_index(rng, 6));
    Region reg = Region::closed(a, b);
    for (Track t : {Track::S, Track::S_plus, Track::T}) {
      const auto h = hitting_time(r, t, reg);
      std::size_t scan = r.S.size();
      for (std::size_t n = 0; n < r.S.size(); ++n) {
        double v = t == Track::S ? r.S[n] : t == Track::S_plus ? r.S_plus[n] : r.T[n];
        if (a <= v && v <= b) {
          scan = n;
          break;
        }
      }
      EXPECT_EQ(h.index, scan);
      EXPECT_EQ(h.censored, scan == r.S.size());
    }
  }
}

TEST(Visits, SimpleWalkClosedForm) {
  // Expected visits to 0 of a transient +-1 walk: 1 / |p - q|.
  auto d = StepDistribution({{1, 0.7}, {-1, 0.3}}, {{1.0, 1.0}});
  auto v = visits_to_zero(d);
  EXPECT_NEAR(v.upper(), 2.5, 1e-10);
  EXPECT_LT(v.tail_bound, 1e-12);
}

TEST(Visits, TwoOneWalkFrozen) {
  auto v = visits_to_zero(two_one());
  EXPECT_NEAR(v.partial, 1.282241334545751, 1e-11);
  EXPECT_NEAR(v.rho, 0.7520, 1e-3);
  EXPECT_EQ(visits_to_zero(StepDistribution::deterministic(1)).upper(), 1.0);
}

TEST(Overshoot, TailSum) {
  auto d = two_one();
  EXPECT_DOUBLE_EQ(overshoot_tail_sum(d, 1), 0.7);
  EXPECT_DOUBLE_EQ(overshoot_tail_sum(d, 2), 0.0);
}

TEST(Overshoot, TwoOneLawPasses) {
  auto c = overshoot_bound_check(two_one(), 10, 1, 20000, 77);
  EXPECT_TRUE(c.pass);
  EXPECT_NEAR(c.rhs, 1.282241334545751 * 0.7, 1e-9);
  // Exact first-passage DP gives 0.404292...
  EXPECT_NEAR(c.lhs, 0.4042924041824796, 4 * c.lhs_se);
  EXPECT_EQ(c.censored, 0u);
}

TEST(Overshoot, BeyondMaxStepIsZero) {
  auto c = overshoot_bound_check(two_one(), 10, 2, 5000, 1);
  EXPECT_EQ(c.lhs, 0.0);
  EXPECT_TRUE(c.pass);
  auto u = overshoot_bound_check(StepDistribution::deterministic(1), 10, 1, 1000, 1);
  EXPECT_EQ(u.lhs, 0.0);
}

TEST(Cone, ZeroTimeIsStartBox) {
  auto d = two_one();
  EXPECT_EQ(cone_experiment(d, 0.5, 5, 0.0, 100, 3, 1).box.hits, 100u);
  EXPECT_EQ(cone_experiment(d, 0.5, 5, 0.0, 100, 6, 1).box.hits, 0u);
}

TEST(Cone, RejectsSteepBeta) {
  auto d = two_one();
  EXPECT_THROW(cone_experiment(d, d.beta_bar(), 5, 10, 10, 0, 1), std::invalid_argument);
}

TEST(Cone, MonotoneInEll) {
  auto d = two_one();
  std::size_t prev = 0;
  for (double ell : {5.0, 10.0, 20.0, 40.0}) {
    auto r = cone_experiment(d, d.beta_bar() / 2, ell, 200, 2000, -50, 4);
    EXPECT_GE(r.box.hits, prev);
    prev = r.box.hits;
  }
}

TEST(BoxChain, ShortTimeSingleBox) {
  auto c = box_chain(3, 50);
  EXPECT_EQ(c.k, 0);
  ASSERT_EQ(c.boxes.size(), 1u);
  EXPECT_EQ(c.boxes[0].half_width, 3);
  EXPECT_EQ(c.boxes[0].t, 50);
}

TEST(BoxChain, TwoAndHundred) {
  auto c = box_chain(2, 100);
  EXPECT_EQ(c.s, (std::vector<double>{100, 84, 3, -253}));
  EXPECT_EQ(c.k, 2);
  EXPECT_EQ(c.times, (std::vector<double>{0, 3, 84, 100}));
  ASSERT_EQ(c.boxes.size(), 3u);
  EXPECT_EQ(c.boxes[0].half_width, 4);
  EXPECT_EQ(c.boxes[1].half_width, 3);
  EXPECT_EQ(c.boxes[2].half_width, 2);
  EXPECT_EQ(c.boxes[2].t, 100);
}

TEST(BoxChain, DisjointAndShrinking) {
  for (double ell : {2.0, 3.0, 5.0})
    for (double t : {10.0, 500.0, 1e4, 1e6}) {
      auto c = box_chain(ell, t);
      for (std::size_t i = 1; i < c.boxes.size(); ++i) {
        EXPECT_LT(c.boxes[i - 1].t + c.boxes[i - 1].half_width, c.boxes[i].t);
        EXPECT_LT(c.boxes[i].half_width, c.boxes[i - 1].half_width);
      }
      EXPECT_EQ(c.boxes.back().t, t);
      EXPECT_EQ(c.boxes.back().half_width, ell);
    }
}

TEST(Lemmas, InsideIntervalImprovesWithM) {
  auto d = two_one();
  std::vector<double> eps;
  for (int m : {4, 6, 8}) {
    auto f = inside_interval(d, m, m, 200, 10 + static_cast<std::uint64_t>(m));
    eps.push_back(1.0 - f.value());
  }
  EXPECT_GE(eps[0], eps[1]);
  EXPECT_GE(eps[1], eps[2]);
}

TEST(Lemmas, HereToThereImprovesWithM) {
  auto d = StepDistribution({{1, 0.6}, {-1, 0.4}}, {{1.0, 1.0}});
  std::vector<double> eps;
  for (int m : {4, 8, 16}) {
    auto f = here_to_there(d, m, std::pow(m, 3), m, 4000, 20);
    eps.push_back(1.0 - f.value());
  }
  EXPECT_GE(eps[0], eps[1]);
  EXPECT_GE(eps[1], eps[2]);
}

TEST(Lemmas, RightLineTowardOne) {
  auto d = two_one();
  std::vector<double> f;
  for (double ell : {1.0, 4.0, 16.0})
    f.push_back(right_line(d, d.beta_bar() / 2, ell, 2000, 2000, 8).value());
  EXPECT_LE(f[0], f[1]);
  EXPECT_LE(f[1], f[2]);
  EXPECT_GT(f[2], 0.99);
}

TEST(Lemmas, ConcentrationExponentNegative) {
  auto c = concentration(two_one(), 0.3, {5, 10, 20, 30, 40}, 20000, 6);
  EXPECT_LT(c.fit.slope, 0.0);
  EXPECT_LT(c.fit.p_negative, 0.05);
}
