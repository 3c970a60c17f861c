#include <gtest/gtest.h>

#include "mtcp/paths.hpp"
#include "mtcp/rng.hpp"

using namespace mtcp;

namespace {

LatticeWindow line(int m, Time th) { return LatticeWindow(1, m, 1, th); }

SiteIndex at(const LatticeWindow& w, int x) { return w.index({x}); }

// Small random corpus: 5 sites, R = 1, T_h = 3.
AugmentedHarrisSystem small(std::uint64_t seed) {
  return sample_harris(line(2, 3.0), {2.5, 1.5}, run_seed(7, seed));
}

constexpr std::size_t kCorpusCap = 400;

}  // namespace

TEST(Reachable, SelfByConvention) {
  auto h = sample_harris(line(3, 2.0), {2.0, 1.0}, 1);
  auto r = reachable(h, 0, 1.0, 0, 1.0, PathMode::bip);
  EXPECT_TRUE(r.reachable);
}

TEST(Reachable, ImmediateDeathBlocks) {
  auto w = LatticeWindow(1, 0, 1, 1.0);
  const Time eps = 0x1.0p-10;
  auto h = HarrisBuilder(w).death({0}, 0.5 + eps).build();
  EXPECT_FALSE(reachable(h, 0, 0.5, 0, 0.5 + 2 * eps, PathMode::bip).reachable);
  EXPECT_FALSE(reachable(h, 0, 0.5, 0, 0.5 + 2 * eps, PathMode::sip).reachable);
}

TEST(Reachable, SelectiveOnlyRoute) {
  auto w = line(1, 1.0);
  auto h = HarrisBuilder(w)
               .selective({-1}, {0}, 0.3)
               .arrow({0}, {1}, 0.6)
               .death({-1}, 0.4)
               .build();
  auto sip = reachable(h, at(w, -1), 0.0, at(w, 1), 1.0, PathMode::sip);
  ASSERT_TRUE(sip.reachable);
  EXPECT_FALSE(reachable(h, at(w, -1), 0.0, at(w, 1), 1.0, PathMode::bip).reachable);
  auto c = classify(h, *sip.witness, 0.0);
  EXPECT_TRUE(c.is_sip);
  EXPECT_FALSE(c.is_bip);
  EXPECT_THROW(reachable(h, 0, 0.5, 0, 0.2, PathMode::bip), std::invalid_argument);
}

TEST(DeathTime, SingleSite) {
  auto w = LatticeWindow(1, 0, 1, 1.0);
  auto h = HarrisBuilder(w).death({0}, 0.4).build();
  SiteIndex s[1] = {0};
  auto d = death_time(h, s);
  EXPECT_FALSE(d.censored);
  EXPECT_EQ(d.value, 0.4);
}

TEST(DeathTime, NoDeathsIsCensored) {
  auto w = line(3, 2.0);
  auto h = HarrisBuilder(w).arrow({0}, {1}, 0.5).build();
  SiteIndex s[1] = {at(w, 0)};
  EXPECT_TRUE(death_time(h, s).censored);
  EXPECT_THROW(death_time(h, std::span<const SiteIndex>{}), std::invalid_argument);
}

TEST(DeathTime, MonotoneInSet) {
  for (std::uint64_t k = 0; k < 50; ++k) {
    auto h = sample_harris(line(4, 6.0), {2.0, 1.0}, k);
    SiteIndex a[1] = {4};
    SiteIndex b[2] = {4, 2};
    auto da = death_time(h, a), db = death_time(h, b);
    EXPECT_TRUE(db.censored || (!da.censored && da.value <= db.value));
  }
}

TEST(Classify, EventFreeColumn) {
  auto w = line(1, 2.0);
  auto h = HarrisBuilder(w).build();
  auto c = classify(h, constant_path(at(w, 0), 0.0, 2.0), 0.0);
  EXPECT_TRUE(c.is_bip && c.is_sip && c.is_fbip && c.is_fsip && c.is_rfbip && c.is_rfsip);
}

TEST(Classify, JumpOntoReachablePointIsNotFree) {
  auto w = line(1, 1.0);
  auto h = HarrisBuilder(w).arrow({0}, {1}, 0.5).build();
  InfectionPath p{0.0, 1.0, at(w, 0), {{0.5, at(w, 0), at(w, 1)}}};
  auto c = classify(h, p, 0.0);
  EXPECT_TRUE(c.is_bip);
  EXPECT_FALSE(c.is_fbip);
  auto f = find_fbip(h, 0.0, at(w, 1), 1.0);
  ASSERT_TRUE(f);
  EXPECT_EQ(*f, constant_path(at(w, 1), 0.0, 1.0));
}

TEST(FindFbip, EventFreeColumn) {
  auto w = line(1, 2.0);
  auto h = HarrisBuilder(w).death({1}, 0.5).build();
  auto f = find_fbip(h, 0.0, at(w, 0), 2.0);
  ASSERT_TRUE(f);
  EXPECT_EQ(*f, constant_path(at(w, 0), 0.0, 2.0));
}

TEST(FindFbip, MatchesEnumerationOnRandomSystems) {
  for (std::uint64_t k = 0; k < 100; ++k) {
    auto h = small(k);
    auto sites = all_sites(h.window());
    for (Time s : {0.0, 1.0})
      for (SiteIndex x : sites) {
        const Time t = 3.0;
        SiteIndex tgt[1] = {x};
        auto bips = enumerate_paths(h, sites, s, tgt, t, PathMode::bip, kCorpusCap);
        std::vector<InfectionPath> free;
        for (const auto& p : bips)
          if (classify(h, p, s).is_fbip) free.push_back(p);
        ASSERT_LE(free.size(), 1u);
        EXPECT_EQ(free.size() == 1, !bips.empty());
        RepairTrace tr;
        auto f = find_fbip(h, s, x, t, &tr);
        ASSERT_EQ(f.has_value(), !free.empty());
        if (f) {
          EXPECT_EQ(*f, free[0]);
          EXPECT_EQ(*f, *fbip_direct(h, s, x, t));
          EXPECT_LE(static_cast<std::size_t>(tr.iterations), bips.size());
          for (std::size_t i = 1; i < tr.violation_times.size(); ++i)
            EXPECT_LT(tr.violation_times[i], tr.violation_times[i - 1]);
        }
      }
  }
}

TEST(FindRfbip, ThreeConstructionsAgree) {
  for (std::uint64_t k = 0; k < 100; ++k) {
    auto h = small(k);
    for (SiteIndex x : all_sites(h.window()))
      for (Time t1 : {0.0, 0.75}) {
        auto a = find_rfbip(h, x, t1, 3.0);
        auto b = rfbip_via_reversal(h, x, t1, 3.0);
        auto c = rfbip_direct(h, x, t1, 3.0);
        ASSERT_EQ(a.has_value(), b.has_value());
        ASSERT_EQ(a.has_value(), c.has_value());
        EXPECT_EQ(a.has_value(), reaches_level(h, x, t1, 3.0));
        if (a) {
          EXPECT_EQ(*a, *b);
          EXPECT_EQ(*a, *c);
          EXPECT_TRUE(classify(h, *a, t1, 3.0).is_rfbip);
        }
      }
  }
}

TEST(FindRfbip, UnreachableSource) {
  auto w = LatticeWindow(1, 0, 1, 1.0);
  auto h = HarrisBuilder(w).death({0}, 0.1).build();
  EXPECT_FALSE(find_rfbip(h, 0, 0.0, 1.0));
}

TEST(Enumerate, NoEventsSingleConstantPath) {
  auto w = line(2, 1.0);
  auto h = HarrisBuilder(w).build();
  SiteIndex s[1] = {at(w, 0)};
  auto v = enumerate_paths(h, s, 0.0, s, 1.0, PathMode::bip);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], constant_path(at(w, 0), 0.0, 1.0));
}

TEST(Enumerate, DiamondHasTwoPaths) {
  auto w = line(2, 1.0);
  auto h = HarrisBuilder(w)
               .arrow({0}, {1}, 0.2)
               .arrow({1}, {2}, 0.4)
               .death({1}, 0.45)
               .arrow({0}, {1}, 0.5)
               .arrow({1}, {2}, 0.7)
               .death({0}, 0.8)
               .build();
  SiteIndex s[1] = {at(w, 0)}, t[1] = {at(w, 2)};
  auto v = enumerate_paths(h, s, 0.0, t, 1.0, PathMode::bip);
  EXPECT_EQ(v.size(), 2u);
}

TEST(Enumerate, CapEnforced) {
  auto h = sample_harris(line(3, 10.0), {2.0, 1.0}, 3);
  auto sites = all_sites(h.window());
  EXPECT_THROW(enumerate_paths(h, sites, 0.0, sites, 10.0, PathMode::bip),
               CapExceeded);
}

TEST(Enumerate, FreeFilterAtMostOne) {
  for (std::uint64_t k = 0; k < 50; ++k) {
    auto h = small(k + 1000);
    auto sites = all_sites(h.window());
    for (SiteIndex x : sites) {
      SiteIndex tgt[1] = {x};
      auto v = enumerate_paths(h, sites, 0.5, tgt, 2.5, PathMode::bip, kCorpusCap);
      int n = 0;
      for (const auto& p : v) n += classify(h, p, 0.5).is_fbip;
      EXPECT_LE(n, 1);
    }
  }
}

TEST(Reversal, ClassesCorrespond) {
  for (std::uint64_t k = 0; k < 30; ++k) {
    auto h = small(k);
    const Time u = 3.0;
    auto r = reverse(h, u);
    auto sites = all_sites(h.window());
    for (PathMode m : {PathMode::bip, PathMode::sip}) {
      auto v = enumerate_paths(h, sites, 0.0, sites, u, m, kCorpusCap);
      for (const auto& p : v) {
        if (!p.jumps.empty() && p.jumps.back().time == u) continue;
        auto c = classify(h, p, 0.0, u);
        auto cr = classify(r, reverse_path(p, u), 0.0, u);
        EXPECT_EQ(c.is_bip, cr.is_bip);
        EXPECT_EQ(c.is_sip, cr.is_sip);
        EXPECT_EQ(c.is_fbip, cr.is_rfbip);
        EXPECT_EQ(c.is_fsip, cr.is_rfsip);
        EXPECT_EQ(c.is_rfbip, cr.is_fbip);
        EXPECT_EQ(c.is_rfsip, cr.is_fsip);
      }
    }
  }
}

TEST(Concatenate, FbipStaysFbip) {
  int checked = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    auto h = small(k);
    for (SiteIndex x : all_sites(h.window())) {
      auto a = find_fbip(h, 0.0, x, 1.5);
      if (!a) continue;
      // The FBIP from (x, 1.5) to some point at level 3.
      for (SiteIndex y : all_sites(h.window())) {
        SiteIndex src[1] = {x}, tgt[1] = {y};
        auto r = reachable(h, src, 1.5, tgt, 3.0, PathMode::bip);
        if (!r.reachable) continue;
        auto b = find_fbip(h, 1.5, y, 3.0);
        if (!b || b->start != x) continue;
        auto c = concatenate(*a, *b);
        EXPECT_TRUE(classify(h, c, 0.0).is_fbip);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(Concatenate, ConstantExtensionAndAssociativity) {
  auto w = line(2, 3.0);
  InfectionPath a{0.0, 1.0, at(w, 0), {{0.5, at(w, 0), at(w, 1)}}};
  InfectionPath b{1.0, 2.0, at(w, 1), {{1.5, at(w, 1), at(w, 2)}}};
  InfectionPath c{2.0, 3.0, at(w, 2), {{2.5, at(w, 2), at(w, 1)}}};
  auto ext = concatenate(a, constant_path(at(w, 1), 1.0, 2.0));
  auto want = a;
  want.t2 = 2.0;
  EXPECT_EQ(ext, want);
  EXPECT_EQ(concatenate(concatenate(a, b), c), concatenate(a, concatenate(b, c)));
  EXPECT_THROW(concatenate(a, c), std::invalid_argument);
}

TEST(Reachable, TransitivityAndModeMonotonicity) {
  for (std::uint64_t k = 0; k < 50; ++k) {
    auto h = small(k);
    const auto& w = h.window();
    for (SiteIndex a : all_sites(w))
      for (SiteIndex b : all_sites(w)) {
        auto ab = reachable(h, a, 0.0, b, 1.5, PathMode::bip);
        EXPECT_TRUE(!ab.reachable || reachable(h, a, 0.0, b, 1.5, PathMode::sip).reachable);
        if (!ab.reachable) continue;
        EXPECT_TRUE(classify(h, *ab.witness, 0.0).is_bip);
        for (SiteIndex c : all_sites(w)) {
          auto bc = reachable(h, b, 1.5, c, 3.0, PathMode::bip);
          if (!bc.reachable) continue;
          auto ac = concatenate(*ab.witness, *bc.witness);
          EXPECT_TRUE(classify(h, ac, 0.0).is_bip);
          EXPECT_TRUE(reachable(h, a, 0.0, c, 3.0, PathMode::bip).reachable);
        }
      }
  }
}

TEST(PathJson, RoundTrip) {
  auto w = line(2, 3.0);
  InfectionPath a{0.25, 2.0, at(w, 0), {{0.5, at(w, 0), at(w, 1)}, {1.5, at(w, 1), at(w, 2)}}};
  EXPECT_EQ(path_from_json(w, path_to_json(w, a)), a);
}

TEST(PathClassifier, MatchesClassify) {
  std::size_t checked = 0;
  for (std::uint64_t k = 0; k < 40; ++k) {
    auto h = small(k);
    auto sites = all_sites(h.window());
    for (Time epoch : {0.0, 0.7}) {
      for (Time top : {2.2, 3.0}) {
        PathClassifier pc(h, epoch, top);
        for (const auto& p : enumerate_paths(h, sites, epoch, sites, 2.2, PathMode::sip, kCorpusCap)) {
          auto a = classify(h, p, epoch, top), b = pc(p);
          ASSERT_EQ(a.is_sip, b.is_sip);
          ASSERT_EQ(a.is_bip, b.is_bip);
          ASSERT_EQ(a.is_fsip, b.is_fsip);
          ASSERT_EQ(a.is_fbip, b.is_fbip);
          ASSERT_EQ(a.is_rfsip, b.is_rfsip);
          ASSERT_EQ(a.is_rfbip, b.is_rfbip);
          ++checked;
        }
      }
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(PathClassifier, InvalidPathIsNothing) {
  auto w = line(1, 2.0);
  auto h = HarrisBuilder(w).death({0}, 1.0).build();
  auto c = PathClassifier(h, 0.0, 2.0)(constant_path(at(w, 0), 0.0, 2.0));
  EXPECT_FALSE(c.is_sip);
  EXPECT_FALSE(c.is_rfsip);
}

TEST(Enumerate, VisitorSeesTheSamePaths) {
  for (std::uint64_t k = 0; k < 20; ++k) {
    auto h = small(k);
    auto sites = all_sites(h.window());
    auto v = enumerate_paths(h, sites, 0.0, sites, 3.0, PathMode::bip, kCorpusCap);
    std::vector<InfectionPath> seen;
    for_each_path(h, sites, 0.0, sites, 3.0, PathMode::bip, kCorpusCap,
                  [&](const InfectionPath& p) { seen.push_back(p); });
    EXPECT_EQ(seen, v);
  }
}

TEST(PathClassifier, ReuseAcrossCallsIsExact) {
  // Alternate between two enumerations so prefixes and suffixes are reused
  // from unrelated paths too.
  for (std::uint64_t k = 0; k < 20; ++k) {
    auto h = small(k);
    auto sites = all_sites(h.window());
    auto v = enumerate_paths(h, sites, 0.0, sites, 3.0, PathMode::sip, kCorpusCap);
    PathClassifier pc(h, 0.0, 3.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto& p = i % 2 ? v[i] : v[v.size() - 1 - i];
      ASSERT_EQ(pc(p), classify(h, p, 0.0, 3.0));
      auto bent = p;
      if (!bent.jumps.empty()) {
        bent.jumps.back().time = std::nextafter(bent.jumps.back().time, 0.0);
        if (bent.jumps.size() == 1 || bent.jumps[bent.jumps.size() - 2].time < bent.jumps.back().time) {
          ASSERT_EQ(pc(bent), classify(h, bent, 0.0, 3.0));
        }
      }
    }
  }
}
