#include <gtest/gtest.h>

#include "mtcp/ancestor.hpp"
#include "mtcp/rng.hpp"

using namespace mtcp;

namespace {

constexpr int L = 2;

LatticeWindow line(int m, Time th) { return LatticeWindow(1, m, 1, th); }

// Bifurcation pattern with pivot c and time t0 + 3 (L = 2). With
// minus_later the exit to c - 1 is the later of the two arrows.
void pattern(HarrisBuilder& b, int c, Time t0, bool minus_later = true) {
  b.arrow({c}, {c + 1}, t0 + (minus_later ? 0.3 : 0.5));
  b.arrow({c}, {c - 1}, t0 + (minus_later ? 0.5 : 0.3));
  b.death({c}, t0 + 2.5);
  b.arrow({c - 1}, {c - 2}, t0 + 2.4);
  b.death({c - 1}, t0 + 2.6);
  b.arrow({c + 1}, {c + 2}, t0 + 2.45);
  b.death({c + 1}, t0 + 2.65);
}

AugmentedHarrisSystem case1() {
  HarrisBuilder b(line(4, 4.0));
  pattern(b, 0, 0.0);
  return b.build();
}

SiteIndex at(const LatticeWindow& w, int x) { return w.index({x}); }

}  // namespace

TEST(Ancestor, EventFreeColumn) {
  auto w = line(3, 5.0);
  auto h = HarrisBuilder(w).arrow({1}, {2}, 1.0).death({2}, 3.0).build();
  for (Time t : {0.0, 1.0, 2.5, 5.0}) EXPECT_EQ(ancestor_at(h, at(w, 0), 0.0, t), at(w, 0));
}

TEST(Ancestor, JumpsWithoutArrowAtJumpTime) {
  auto w = line(2, 3.0);
  auto h = HarrisBuilder(w).arrow({0}, {1}, 0.5).death({0}, 2.0).build();
  EXPECT_EQ(ancestor_at(h, at(w, 0), 0.0, 1.9), at(w, 0));
  EXPECT_EQ(ancestor_at(h, at(w, 0), 0.0, 2.1), at(w, 1));
  for (EdgeIndex e = 0; e < static_cast<EdgeIndex>(w.num_edges()); ++e)
    EXPECT_FALSE(h.has_event_at(EventKind::arrow, e, 2.0));
}

TEST(Ancestor, ExtinctIsCemetery) {
  auto w = LatticeWindow(1, 0, 1, 2.0);
  auto h = HarrisBuilder(w).death({0}, 1.0).build();
  EXPECT_FALSE(ancestor_at(h, 0, 0.0, 1.5));
  std::vector<Time> times{0.5, 1.5, 2.0};
  auto tr = ancestor_track(h, {0, 0.0}, times);
  EXPECT_TRUE(tr.values[0]);
  EXPECT_FALSE(tr.values[1]);
  EXPECT_FALSE(tr.values[2]);
}

TEST(Ancestor, AgreesWithRfbipAndComposes) {
  Engine rng(3);
  for (std::uint64_t k = 0; k < 200; ++k) {
    auto h = sample_harris(line(4, 6.0), {2.5, 1.5}, run_seed(11, k));
    auto x = static_cast<SiteIndex>(uniform_index(rng, h.window().num_sites()));
    Time s = 2.0 * uniform01(rng), t = s + 2.0 * uniform01(rng), u = t + 2.0 * uniform01(rng);
    auto y = ancestor_at(h, x, s, t);
    auto p = find_rfbip(h, x, s, t);
    ASSERT_EQ(y.has_value(), p.has_value());
    if (!y) continue;
    EXPECT_EQ(*y, p->end());
    auto z = ancestor_at(h, *y, t, u);
    if (z) {
      EXPECT_EQ(ancestor_at(h, x, s, u), z);
    }
  }
}

TEST(Bifurcation, HandBuiltDetected) {
  auto h = case1();
  const auto& w = h.window();
  auto c = check_bifurcation(h, L, {}, at(w, 0), 3.0);
  for (bool v : c) EXPECT_TRUE(v);
  auto b = find_bifurcations(h, L);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].time, 3.0);
  EXPECT_EQ(b[0].pivot, at(w, 0));
  EXPECT_EQ(b[0].t_minus, 0.5);
  EXPECT_EQ(b[0].t_plus, 0.3);
}

TEST(Bifurcation, EachAblationRejected) {
  const auto base = case1();
  const auto& w = base.window();
  std::vector<AugmentedHarrisSystem> ab;
  ab.push_back(HarrisBuilder::from(base).death({1}, 1.0).build());
  ab.push_back(HarrisBuilder::from(base).erase(EventKind::death, at(w, 0), 2.5, 2.5).build());
  ab.push_back(HarrisBuilder::from(base).arrow({0}, {-1}, 0.4).build());
  ab.push_back(HarrisBuilder::from(base).arrow({0}, {1}, 2.0).build());
  ab.push_back(HarrisBuilder::from(base).arrow({1}, {2}, 1.5).build());
  ab.push_back(HarrisBuilder::from(base).erase(EventKind::death, at(w, -1), 2.6, 2.6).build());
  ab.push_back(HarrisBuilder::from(base).erase(EventKind::death, at(w, 1), 2.65, 2.65).build());
  for (std::size_t k = 0; k < ab.size(); ++k) {
    auto c = check_bifurcation(ab[k], L, {}, at(w, 0), 3.0);
    for (std::size_t j = 0; j < c.size(); ++j)
      EXPECT_EQ(c[j], j != k) << "ablation " << k + 1 << " condition " << j + 1;
    EXPECT_TRUE(find_bifurcations(ab[k], L).empty()) << "ablation " << k + 1;
  }
}

TEST(Bifurcation, ExtinctBeforeThree) {
  auto w = line(4, 6.0);
  HarrisBuilder b(w);
  pattern(b, 0, 1.0);
  b.death({0}, 0.5);
  EXPECT_TRUE(find_bifurcations(b.build(), L).empty());
}

TEST(Ingredient1, FirstTrySucceeds) {
  auto r = build_ingredient1(case1(), L);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.ladder.size(), 1u);
  EXPECT_EQ(r.u_star, 3.0);
}

TEST(Ingredient1, SecondBifurcationTakesOver) {
  auto w = line(10, 14.0);
  HarrisBuilder b(w);
  // A side lineage to -5 keeps the ancestor alive after the first pair dies.
  for (int k = 0; k < 5; ++k) b.arrow({-k}, {-k - 1}, 0.1 + 0.1 * k);
  for (int k = 1; k < 5; ++k) b.death({-k}, 0.55 + 0.05 * k);
  pattern(b, 0, 2.0);
  b.death({-2}, 6.0).death({2}, 6.05);
  pattern(b, -5, 7.0);
  auto h = b.build();
  auto r = build_ingredient1(h, L);
  ASSERT_TRUE(r.found) << r.reason;
  ASSERT_EQ(r.ladder.size(), 2u);
  // The smallest time meeting every condition is the death of y + e1.
  EXPECT_DOUBLE_EQ(r.ladder[0].u, 4.65);
  EXPECT_EQ(r.ladder[0].v, 6.05);
  EXPECT_FALSE(r.ladder[0].v_censored);
  EXPECT_DOUBLE_EQ(r.u_star, 9.65);
  EXPECT_EQ(r.y_star, at(w, -5));
}

TEST(Ingredient2, PairPointSurvives) {
  auto w = line(4, 4.0);
  auto h = HarrisBuilder(w).death({-2}, 1.0).build();
  auto r = build_ingredient2(h, L, Orientation::plus);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.z_site, at(w, 2));
  EXPECT_EQ(r.w, 0.0);
  EXPECT_TRUE(r.ladder.empty());
}

TEST(Ingredient2, ThreeStepLadder) {
  auto w = line(5, 4.0);
  auto h = HarrisBuilder(w)
               .death({2}, 1.0)
               .arrow({-2}, {-3}, 0.5)
               .death({-2}, 1.5)
               .arrow({-3}, {-4}, 0.6)
               .death({-3}, 2.0)
               .build();
  auto r = build_ingredient2(h, L, Orientation::plus);
  ASSERT_TRUE(r.found) << r.reason;
  ASSERT_EQ(r.ladder.size(), 3u);
  EXPECT_EQ(r.ladder[0].z, at(w, -2));
  EXPECT_EQ(r.ladder[0].w, 1.0);
  EXPECT_EQ(r.ladder[1].z, at(w, -3));
  EXPECT_EQ(r.ladder[1].w, 1.5);
  EXPECT_EQ(r.ladder[2].z, at(w, -4));
  EXPECT_EQ(r.z_site, at(w, -4));
  EXPECT_EQ(r.w_time, 2.0);
}

TEST(Ingredient2, BothDieFlagged) {
  auto w = line(4, 4.0);
  auto h = HarrisBuilder(w).death({2}, 1.0).death({-2}, 0.5).build();
  auto r = build_ingredient2(h, L, Orientation::plus);
  EXPECT_FALSE(r.found);
  EXPECT_FALSE(r.reason.empty());
}

TEST(Ingredient2, MinusIsReflectedPlus) {
  int found = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    auto h = sample_harris(line(6, 5.0), {2.5, 1.0}, run_seed(5, k));
    const auto& w = h.window();
    auto m = build_ingredient2(h, L, Orientation::minus);
    auto p = build_ingredient2(reflect_psi(h, 1, -1), L, Orientation::plus);
    ASSERT_EQ(m.found, p.found);
    if (!m.found) continue;
    ++found;
    EXPECT_EQ(m.z_site, psi_site(w, p.z_site, 1, -1));
    EXPECT_EQ(m.w_time, p.w_time);
    EXPECT_EQ(m.z, psi(p.z, 1, -1));
    ASSERT_EQ(m.ladder.size(), p.ladder.size());
  }
  EXPECT_GT(found, 10);
}

TEST(Renewal, CaseOne) {
  auto h = case1();
  const auto& w = h.window();
  auto r = build_renewal_point(h, L);
  ASSERT_TRUE(r.found) << r.reason;
  EXPECT_EQ(r.case_tag, 1);
  EXPECT_EQ(r.x, Coord{-2});
  EXPECT_EQ(r.t, 3.0);
  EXPECT_FALSE(r.selective_event);
  ASSERT_TRUE(r.witness);
  InfectionPath want{0.0, 3.0, at(w, 0),
                     {{0.5, at(w, 0), at(w, -1)}, {2.4, at(w, -1), at(w, -2)}}};
  EXPECT_EQ(*r.witness, want);
  auto c = classify(h, *r.witness, 0.0, 3.0);
  EXPECT_TRUE(c.is_rfsip);
  EXPECT_TRUE(c.is_rfbip);
}

TEST(Renewal, CaseThree) {
  HarrisBuilder b(line(4, 4.0));
  pattern(b, 0, 0.0, false);
  auto h = b.build();
  auto r = build_renewal_point(h, L);
  ASSERT_TRUE(r.found) << r.reason;
  EXPECT_EQ(r.case_tag, 3);
  EXPECT_EQ(r.x, Coord{2});
  EXPECT_EQ(r.t, 3.0);
  EXPECT_TRUE(classify(h, *r.witness, 0.0, 3.0).is_rfbip);
}

TEST(Renewal, SelectiveEventForcesPlus) {
  HarrisBuilder b(line(4, 4.0));
  pattern(b, 0, 0.0);
  b.selective({0}, {1}, 1.5);
  auto h = b.build();
  auto r = build_renewal_point(h, L);
  ASSERT_TRUE(r.found) << r.reason;
  EXPECT_TRUE(r.selective_event);
  EXPECT_EQ(*r.t_plus_sel, 1.5);
  EXPECT_EQ(r.case_tag, 5);
  EXPECT_EQ(r.x, Coord{2});
  auto c = classify(h, *r.witness, 0.0, 3.0);
  EXPECT_TRUE(c.is_rfsip);
  EXPECT_FALSE(c.is_bip);
}

TEST(Renewal, CaseTwoFollowsOtherBranch) {
  HarrisBuilder b(line(4, 5.0));
  pattern(b, 0, 0.0);
  b.death({-2}, 3.5);  // Y - L e1 dies: case 2
  auto h = b.build();
  auto r = build_renewal_point(h, L);
  ASSERT_TRUE(r.found) << r.reason;
  EXPECT_EQ(r.case_tag, 2);
  EXPECT_EQ(r.x, Coord{2});
  EXPECT_EQ(r.t, 3.5);
  EXPECT_TRUE(classify(h, *r.witness, 0.0, r.t).is_rfsip);
}

TEST(Renewal, NotFoundIsExplicit) {
  auto h = HarrisBuilder(line(4, 4.0)).build();
  auto r = build_renewal_point(h, L);
  EXPECT_FALSE(r.found);
  EXPECT_FALSE(r.reason.empty());
}

TEST(Steered, DepthOneIsRenewalPoint) {
  auto h = case1();
  auto s = steered_sequence(h, L, h.window().origin(), 1);
  ASSERT_FALSE(s.truncated) << s.reason;
  ASSERT_EQ(s.steps.size(), 2u);
  auto r = build_renewal_point(h, L);
  EXPECT_EQ(s.steps[1].site, r.x_site);
  EXPECT_EQ(s.steps[1].time, r.t_abs);
  EXPECT_EQ(s.steps[0].kappa, std::vector<int>{1});
}

TEST(Steered, ReflectsTowardOrigin) {
  auto w = line(6, 8.0);
  HarrisBuilder b(w);
  pattern(b, 0, 0.0, false);  // case 3: S_1 = 2
  // Mirrored pattern at 2: in the reflected system it is again case 3.
  b.arrow({2}, {3}, 3.3).arrow({2}, {1}, 3.5).death({2}, 5.5);
  b.arrow({1}, {0}, 5.4).death({1}, 5.6);
  b.arrow({3}, {4}, 5.45).death({3}, 5.65);
  auto h = b.build();
  auto s = steered_sequence(h, L, w.origin(), 2);
  ASSERT_FALSE(s.truncated) << s.reason;
  ASSERT_EQ(s.steps.size(), 3u);
  EXPECT_EQ(s.steps[1].s, Coord{2});
  EXPECT_EQ(s.steps[1].kappa, std::vector<int>{-1});
  EXPECT_EQ(s.steps[2].s, Coord{0});
  EXPECT_EQ(s.steps[2].time, 6.0);
  EXPECT_EQ(s.witness.end(), at(w, 0));
  EXPECT_TRUE(classify(h, s.witness, 0.0, 6.0).is_rfsip);
}

TEST(Plant, ProducesDetectablePattern) {
  int hits = 0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    auto w = line(6, 6.0);
    auto h = plant_bifurcation(HarrisBuilder(w).build(), L, w.origin(), 0.0, k);
    hits += !find_bifurcations(h, L).empty();
  }
  EXPECT_GT(hits, 10);
}

TEST(RenewalJson, HasCaseAndWitness) {
  auto h = case1();
  auto r = build_renewal_point(h, L);
  auto s = renewal_to_json(h, L, r);
  EXPECT_NE(s.find("\"case\": 1"), std::string::npos);
  EXPECT_NE(s.find("witness"), std::string::npos);
}
