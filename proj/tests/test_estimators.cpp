#include <gtest/gtest.h>

#include "mtcp/estimators.hpp"
#include "mtcp/paths.hpp"

using namespace mtcp;
using namespace mtcp::est;

namespace {

MultitypeParams small(double l1 = 2.5, double l2 = 1.5, int radius = 15, double horizon = 10.0) {
  MultitypeParams p;
  p.radius = radius;
  p.lambda1 = l1;
  p.lambda2 = l2;
  p.horizon = horizon;
  return p;
}

bool same(const RunObservation& a, const RunObservation& b) {
  return a.ones_half == b.ones_half && a.ones_end == b.ones_end && a.twos_half == b.twos_half &&
         a.twos_end == b.twos_end && a.boundary == b.boundary && a.cone_slope == b.cone_slope && a.cell == b.cell;
}

}  // namespace

TEST(CoupledOneType, EmptyStartIsDeadAtZero) {
  LatticeWindow w(1, 5, 1, 4.0);
  std::vector<double> l{1.0, 2.0};
  auto r = run_one_type_coupled(w, l, {}, 1);
  EXPECT_EQ(r.death_time, (std::vector<Time>{0.0, 0.0}));
  EXPECT_EQ(r.censored, (std::vector<char>{0, 0}));
}

TEST(CoupledOneType, MonotoneInRate) {
  LatticeWindow w(1, 30, 1, 30.0);
  std::vector<double> grid{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  SiteIndex o = w.origin();
  for (std::uint64_t s = 0; s < 300; ++s) {
    auto r = run_one_type_coupled(w, grid, std::span<const SiteIndex>(&o, 1), s, true);
    for (std::size_t j = 1; j < grid.size(); ++j) {
      EXPECT_GE(r.death_time[j], r.death_time[j - 1]);
      EXPECT_GE(r.censored[j], r.censored[j - 1]);
      for (std::size_t q = 0; q < r.first_reach[j].size(); ++q)
        EXPECT_LE(r.first_reach[j][q], r.first_reach[j - 1][q]);
    }
    for (std::size_t q = 1; q < r.first_reach[0].size(); ++q)
      EXPECT_GE(r.first_reach[0][q], r.first_reach[0][q - 1]);
  }
}

TEST(CoupledOneType, AgreesWithHarrisEvolution) {
  // Survival to the horizon, lazy coupled sampler against the full graphical
  // representation, on independent ensembles.
  const std::size_t n = 3000;
  LatticeWindow w(1, 20, 1, 8.0);
  SiteIndex o = w.origin();
  const double lam[1] = {2.0};
  std::size_t a = 0, b = 0;
  for (std::uint64_t s = 0; s < n; ++s) {
    a += run_one_type_coupled(w, lam, std::span<const SiteIndex>(&o, 1), run_seed(5, s)).censored[0];
    auto h = sample_harris(w, {2.0, 2.0}, run_seed(6, s), {.allow_equal_rates = true});
    auto tr = evolve_one_type(Configuration::single(w, o, 1, 0), h, OneTypeRate::lambda2_only, 8.0);
    b += tr.final_configuration().count(1) > 0;
  }
  auto ci = stats::newcombe_unpaired(a, n, b, n, 0.999);
  EXPECT_TRUE(ci.contains(0.0)) << a << " vs " << b;
}

TEST(LambdaC, DeepSubcriticalNeverSurvives) {
  LambdaCConfig c;
  c.radius = 30;
  c.horizon = 40;
  c.n_runs = 300;
  c.grid = {0.1, 0.2, 4.0};
  c.bisection_steps = 2;
  auto e = estimate_lambda_c(c);
  EXPECT_EQ(e.curve[0].full.hits, 0u);
  EXPECT_EQ(e.curve[0].half.hits, 0u);
  EXPECT_LE(e.lo, e.hi);
  EXPECT_GE(e.lo, 0.2);
  EXPECT_LE(e.hi, 4.0);
  for (std::size_t j = 1; j < e.curve.size(); ++j) {
    EXPECT_GE(e.curve[j].full.hits, e.curve[j - 1].full.hits);
    EXPECT_GE(e.curve[j].half.hits, e.curve[j].full.hits);
  }
}

TEST(LambdaC, RejectsBadGrids) {
  LambdaCConfig c;
  c.grid = {2.0, 1.0};
  EXPECT_THROW(estimate_lambda_c(c), std::invalid_argument);
  c.grid = {1.0};
  EXPECT_THROW(estimate_lambda_c(c), std::invalid_argument);
  c.radius = 10;
  c.horizon = 5;
  c.n_runs = 50;
  c.grid = {5.0, 6.0};  // crossing below the grid
  EXPECT_THROW(estimate_lambda_c(c), std::invalid_argument);
}

TEST(Params, RateOrder) {
  auto p = small(2.0, 2.0);
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.allow_equal_rates = true;
  EXPECT_NO_THROW(p.validate());
  p = small(1.0, 2.0);
  p.allow_equal_rates = true;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = small(3.0, 0.0);
  EXPECT_NO_THROW(p.validate());
  p.lambda_c_hi = 3.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Initial, ParseAndDescribe) {
  for (std::string s : {"all_zero", "all_one", "all_two", "single_one_in_twos", "single_one_in_empty",
                        "block:3:1:2", "block:0:2:0"})
    EXPECT_EQ(parse_initial(s).describe(), s);
  EXPECT_EQ(parse_initial("block:4").describe(), "block:4:1:2");
  EXPECT_EQ(parse_initial("random:0.25:0.5").describe(), "random:0.25:0.5");
  for (std::string s : {"", "none", "block", "block:x", "block:-1", "block:2:3:1", "random:0.7:0.7",
                        "all_one:3", "random:0.1"})
    EXPECT_THROW(parse_initial(s), std::invalid_argument) << s;
}

TEST(Initial, RandomUsesSeed) {
  LatticeWindow w(1, 30, 1, 1.0);
  auto ic = parse_initial("random:0.3:0.3");
  EXPECT_EQ(ic.build(w, 4), ic.build(w, 4));
  EXPECT_FALSE(ic.build(w, 4) == ic.build(w, 5));
}

TEST(Streaming, MatchesEvolve) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    auto p = small();
    LatticeWindow w = p.window();
    Engine rng(s);
    std::vector<State> v(w.num_sites());
    for (auto& x : v) x = static_cast<State>(uniform_index(rng, 3));
    Configuration xi0(w, v);
    Configuration fin(w);
    ObservationSpec spec;
    spec.window_sites = {w.index({-1}), w.index({0}), w.index({1})};
    auto o = observe_multitype(p, xi0, s, spec, &fin);
    auto h = sample_harris(w, {p.lambda1, p.lambda2}, s);
    auto tr = evolve(xi0, h, p.horizon);
    EXPECT_EQ(fin, tr.final_configuration());
    auto mid = tr.configuration_at(p.horizon / 2);
    EXPECT_EQ(o.ones_half, mid.count(1) > 0);
    EXPECT_EQ(o.twos_half, mid.count(2) > 0);
    EXPECT_EQ(o.ones_end, fin.count(1) > 0);
    std::uint32_t cell = fin.at(spec.window_sites[0]) + 3u * fin.at(spec.window_sites[1]) +
                         9u * fin.at(spec.window_sites[2]);
    EXPECT_EQ(o.cell, cell);
  }
}

TEST(Ensemble, IndependentOfThreadCount) {
  auto p = small();
  auto ic = parse_initial("random:0.2:0.4");
  ObservationSpec spec;
  spec.cone = true;
  auto a = run_ensemble(p, ic, 64, 11, spec, 1);
  auto b = run_ensemble(p, ic, 64, 11, spec, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(same(a[i], b[i])) << i;
}

TEST(Survival, NoOnesNoSurvival) {
  auto e = estimate_survival(small(), parse_initial("all_two"), 200, 3);
  EXPECT_EQ(e.s1_half.hits, 0u);
  EXPECT_EQ(e.s1_end.hits, 0u);
  e = estimate_survival(small(), parse_initial("all_zero"), 50, 3);
  EXPECT_EQ(e.s1_end.hits, 0u);
  EXPECT_EQ(e.s2_end.hits, 0u);
}

TEST(Survival, AllOnesSupercritical) {
  auto e = estimate_survival(small(3.0, 1.0, 20, 20.0), parse_initial("all_one"), 200, 3);
  EXPECT_GT(e.s1_end.wilson().lo, 0.95);
  EXPECT_EQ(e.s2_end.hits, 0u);
  EXPECT_TRUE(e.s1_half_ci.contains(e.s1_half.value()));
}

TEST(Survival, DriftIsPairedDifference) {
  auto e = estimate_survival(small(2.0, 1.0, 20, 20.0), parse_initial("single_one_in_empty"), 400, 9);
  EXPECT_GE(e.s1_half.hits, e.s1_end.hits);
  double diff = e.s1_half.value() - e.s1_end.value();
  EXPECT_TRUE(e.s1_drift.contains(diff));
}

TEST(Cone, NoTwosGivesWindowSlope) {
  auto p = small(3.0, 0.0, 15, 10.0);
  ObservationSpec spec;
  spec.cone = true;
  auto obs = run_ensemble(p, parse_initial("single_one_in_empty"), 100, 2, spec);
  auto c = summarize_cone(obs);
  ASSERT_GT(c.survivors, 0u);
  for (double s : c.slopes) EXPECT_DOUBLE_EQ(s, 16.0 / 10.0);
  EXPECT_EQ(c.positive.hits, c.survivors);
}

TEST(Cone, TwoAtOriginGivesZero) {
  auto p = small(3.0, 2.0, 10, 5.0);
  ObservationSpec spec;
  spec.cone = true;
  spec.cone_from = 0.0;
  // A 2 at the origin at time 0 pins the infimum at 0.
  Configuration xi0 = Configuration::single(p.window(), p.window().origin(), 2, 1);
  for (std::uint64_t s = 0; s < 20; ++s) EXPECT_EQ(observe_multitype(p, xi0, s, spec).cone_slope, 0.0);
  EXPECT_THROW(summarize_cone(std::vector<RunObservation>(3)), std::runtime_error);
}

TEST(Convergence, AllZeroIsExact) {
  ConvergenceConfig c;
  c.params = small(3.0, 2.0, 10, 20.0);
  c.init = parse_initial("all_zero");
  c.window = {{-1}, {0}, {1}};
  c.n_runs = 100;
  c.n_reference = 100;
  auto r = complete_convergence_check(c);
  EXPECT_EQ(r.tv, 0.0);
  EXPECT_EQ(r.w0, 1.0);
  EXPECT_EQ(r.empirical[0], 1.0);
  c.window = {{0}, {1}, {2}, {3}, {4}};
  EXPECT_THROW(complete_convergence_check(c), std::invalid_argument);
}

TEST(Convergence, HistogramsAreDistributions) {
  ConvergenceConfig c;
  c.params = small(3.0, 2.0, 10, 10.0);
  c.init = parse_initial("random:0.3:0.3");
  c.window = {{0}, {1}};
  c.n_runs = 200;
  c.n_reference = 200;
  auto r = complete_convergence_check(c);
  for (const auto* v : {&r.empirical, &r.mu1, &r.mu2, &r.mixture}) {
    ASSERT_EQ(v->size(), 9u);
    double sum = 0;
    for (double x : *v) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  // Reference runs from all 1's never show a 2 and vice versa.
  for (std::uint32_t cell = 0; cell < 9; ++cell) {
    bool has2 = cell % 3 == 2 || cell / 3 == 2, has1 = cell % 3 == 1 || cell / 3 == 1;
    if (has2) {
      EXPECT_EQ(r.mu1[cell], 0.0);
    }
    if (has1) {
      EXPECT_EQ(r.mu2[cell], 0.0);
    }
  }
}

TEST(GSet, MonotoneInParameters) {
  LatticeWindow w(1, 10, 1, 1.0);
  Engine rng(8);
  for (int k = 0; k < 2000; ++k) {
    std::vector<State> v(w.num_sites());
    for (auto& x : v) x = uniform01(rng) < 0.05 ? 2 : uniform01(rng) < 0.6 ? 1 : 0;
    Configuration xi(w, v);
    GSet a{uniform_index(rng, 8), static_cast<double>(uniform_index(rng, 11)),
           static_cast<double>(uniform_index(rng, 11))};
    GSet b{a.n + 1, a.u1, a.u2}, c{a.n, a.u1 - 1, a.u2}, d{a.n, a.u1, a.u2 + 1};
    for (const auto& g : {b, c, d})
      if (g.contains(xi)) {
        EXPECT_TRUE(a.contains(xi));
      }
  }
  Configuration ones = Configuration::filled(w, 1);
  EXPECT_TRUE((GSet{20, 10, 10}.contains(ones)));
  EXPECT_FALSE((GSet{21, 10, 10}.contains(ones)));
  EXPECT_FALSE((GSet{0, 10, 0}.contains(Configuration::single(w, w.origin(), 2, 1))));
  EXPECT_TRUE((GSet{0, 10, 0}.contains(Configuration::single(w, w.index({1}), 2, 1))));
}

TEST(Audit, SmallBatchClean) {
  AuditConfig c;
  c.n_trajectories = 30;
  c.n_gset = 500;
  c.n_coupling = 20;
  c.n_block = 0;
  auto r = invariant_audit(c);
  ASSERT_EQ(r.items.size(), 3u);
  EXPECT_EQ(r.exact_violations(), 0u);
  EXPECT_TRUE(r.pass());
  for (const auto& i : r.items) EXPECT_GT(i.checks, 0u) << i.name;
}

TEST(Bounds, HugeSeedSetRarelyDies) {
  BoundConfig c;
  c.radius = 20;
  c.horizon = 20;
  c.lambda = 3.0;
  c.grid = {0, 20};
  c.n_runs = 200;
  auto f = bound_fit(Bound::large_set_extinction, c);
  EXPECT_EQ(f.points[1].x, 41.0);
  EXPECT_EQ(f.points[1].k, 0u);
}

TEST(Bounds, SpreadTimeSign) {
  BoundConfig c;
  c.radius = 30;
  c.horizon = 8;
  c.fixed = 16;
  c.grid = {2, 3, 4, 5, 6, 7, 8};
  c.n_runs = 1000;
  auto f = bound_fit(Bound::spread_time, c);
  EXPECT_FALSE(f.expect_negative);
  EXPECT_TRUE(f.sign_ok) << to_json(f);
  for (std::size_t j = 1; j < f.points.size(); ++j) EXPECT_GE(f.points[j].k, f.points[j - 1].k);
}

TEST(Bounds, Names) {
  for (Bound b : {Bound::spread_distance, Bound::spread_time, Bound::late_extinction,
                  Bound::large_set_extinction, Bound::coupling_failure})
    EXPECT_EQ(parse_bound(to_string(b)), b);
  EXPECT_THROW(parse_bound("eq7"), std::invalid_argument);
}

TEST(Drift, SmallRunsAreConsistent) {
  DriftConfig c;
  c.radius = 12;
  c.horizon = 10;
  c.n_surviving = 20;
  auto a = planted_drift(c);
  auto b = planted_drift(c);
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_LE(a.found, a.surviving);
  EXPECT_LE(a.surviving, a.runs);
  EXPECT_EQ(a.x.size(), a.found);
  c.L = 6;
  EXPECT_THROW(drift_run(c), std::invalid_argument);
}
