#include <gtest/gtest.h>

#include <sstream>

#include "mtcp/paths.hpp"
#include "mtcp/rng.hpp"
#include "mtcp/process.hpp"

using namespace mtcp;

namespace {

LatticeWindow line(int m, Time th) { return LatticeWindow(1, m, 1, th); }

}  // namespace

TEST(Evolve, AllZeroIsAbsorbing) {
  auto h = sample_harris(line(6, 10.0), {3.0, 2.0}, 1);
  auto tr = evolve(Configuration::filled(h.window(), 0), h, 10.0);
  EXPECT_TRUE(tr.log().empty());
  EXPECT_EQ(tr.final_configuration().count(0), h.window().num_sites());
}

TEST(Evolve, SingleSiteDeath) {
  auto h = HarrisBuilder(LatticeWindow(1, 0, 1, 1.0)).death({0}, 0.5).build();
  auto tr = evolve(Configuration::filled(h.window(), 1), h, 1.0);
  EXPECT_EQ(tr.state_at(0, 0.49), 1);
  EXPECT_EQ(tr.state_at(0, 0.5), 0);
  EXPECT_EQ(tr.state_at(0, 0.5, true), 1);
  EXPECT_EQ(tr.state_at(0, 0.9), 0);
}

TEST(Evolve, SelectiveArrowUnusableByTwo) {
  auto w = line(1, 1.0);
  auto h = HarrisBuilder(w).selective({0}, {1}, 0.3).build();
  auto tr = evolve(Configuration::single(w, w.index({0}), 2, 0), h, 1.0);
  EXPECT_EQ(tr.state_at(w.index({1}), 1.0), 0);
  auto tr1 = evolve(Configuration::single(w, w.index({0}), 1, 0), h, 1.0);
  EXPECT_EQ(tr1.state_at(w.index({1}), 1.0), 1);
  EXPECT_EQ(tr1.log()[0].cause, EventKind::selective);
}

TEST(Evolve, ArrowOntoOccupiedIsNoOp) {
  auto w = line(1, 1.0);
  auto h = HarrisBuilder(w).arrow({0}, {1}, 0.3).build();
  Configuration c(w, {0, 1, 2});
  auto tr = evolve(c, h, 1.0);
  EXPECT_TRUE(tr.log().empty());
}

TEST(Evolve, HorizonChecked) {
  auto h = sample_harris(line(2, 2.0), {2.0, 1.0}, 1);
  EXPECT_THROW(evolve(Configuration::filled(h.window(), 1), h, 3.0),
               std::invalid_argument);
}

TEST(Evolve, OneTypeReductionFromA1) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto h = sample_harris(line(8, 10.0), {2.5, 1.2}, s);
    auto c = Configuration::block(h.window(), 2, 1, 0);
    auto a = evolve(c, h, 10.0);
    auto b = evolve_one_type(c, h, OneTypeRate::lambda1_with_selective, 10.0);
    for (Time t : {1.0, 3.3, 7.0, 10.0})
      EXPECT_TRUE(a.configuration_at(t) == b.configuration_at(t));
  }
}

TEST(Evolve, OneTypeReductionFromA2) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto h = sample_harris(line(8, 10.0), {2.5, 1.2}, s);
    auto c = Configuration::block(h.window(), 2, 2, 0);
    auto a = evolve(c, h, 10.0);
    auto b = evolve_one_type(Configuration::block(h.window(), 2, 1, 0), h,
                             OneTypeRate::lambda2_only, 10.0);
    for (Time t : {2.0, 5.0, 10.0}) {
      auto ca = a.configuration_at(t), cb = b.configuration_at(t);
      for (std::size_t x = 0; x < h.window().num_sites(); ++x)
        EXPECT_EQ(ca.at(static_cast<SiteIndex>(x)) == 2,
                  cb.at(static_cast<SiteIndex>(x)) == 1);
    }
  }
}

TEST(Evolve, FullStartMatchesLevelReachability) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto h = sample_harris(line(6, 4.0), {2.0, 1.5}, s);
    auto tr = evolve_one_type(Configuration::filled(h.window(), 1), h,
                              OneTypeRate::lambda2_only, 4.0);
    auto sweep = ForwardReach::level(h, PathMode::bip, 0.0);
    for (Time t : {0.5, 1.5, 3.0, 4.0}) {
      sweep.advance_to(t);
      auto c = tr.configuration_at(t);
      for (std::size_t x = 0; x < h.window().num_sites(); ++x)
        EXPECT_EQ(c.at(static_cast<SiteIndex>(x)) == 1,
                  sweep.contains(static_cast<SiteIndex>(x)));
    }
  }
}

TEST(StateAt, InitialAndReplayAgree) {
  auto w = line(6, 8.0);
  auto h = sample_harris(w, {3.0, 1.5}, 77);
  Configuration c(w);
  for (std::size_t x = 0; x < w.num_sites(); ++x)
    c.set(static_cast<SiteIndex>(x), static_cast<State>(x % 3));
  auto tr = evolve(c, h, 8.0);
  for (std::size_t x = 0; x < w.num_sites(); ++x)
    EXPECT_EQ(tr.state_at(static_cast<SiteIndex>(x), 0.0),
              c.at(static_cast<SiteIndex>(x)));
  // Independent re-sweep oracle at 100 query points.
  Engine rng(5);
  for (int q = 0; q < 100; ++q) {
    Time t = 8.0 * uniform01(rng);
    auto x = static_cast<SiteIndex>(uniform_index(rng, w.num_sites()));
    Evolver ev(h, c);
    ev.advance_to(t);
    EXPECT_EQ(tr.state_at(x, t), ev.state().at(x));
  }
}

TEST(Absorption, StaysInA1) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto w = line(5, 10.0);
    auto h = sample_harris(w, {3.0, 2.0}, s);
    auto tr = evolve(Configuration::single(w, w.origin(), 1, 2), h, 10.0);
    bool entered = false;
    for (const auto& e : tr.log()) {
      auto c = tr.configuration_at(e.time);
      if (entered) {
        EXPECT_TRUE(c.in_a1());
      }
      if (c.in_a1()) entered = true;
    }
  }
}

TEST(Csv, OneRowPerTransition) {
  auto w = LatticeWindow(1, 0, 1, 3.0);
  auto h = HarrisBuilder(w).death({0}, 1.0).death({0}, 2.0).build();
  auto tr = evolve(Configuration::filled(w, 1), h, 3.0);
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  std::string s = os.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 2);  // header + one change
}
