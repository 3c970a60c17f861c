#include <gtest/gtest.h>

#include "mtcp/paths.hpp"
#include "mtcp/render.hpp"

using namespace mtcp;

namespace {

std::size_t occurrences(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
  return n;
}

// Opening and closing group tags balance, and the document is one svg element.
void well_formed(const std::string& svg) {
  EXPECT_EQ(svg.rfind("<?xml version=\"1.0\"", 0), 0u);
  EXPECT_NE(svg.find("xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
  EXPECT_EQ(occurrences(svg, "<svg "), 1u);
  EXPECT_EQ(svg.substr(svg.size() - 7), "</svg>\n");
  EXPECT_EQ(occurrences(svg, "<g ") + occurrences(svg, "<g>"), occurrences(svg, "</g>"));
  EXPECT_EQ(svg.find("nan"), std::string::npos);
}

// Pivot 0, bifurcation time 4, L = 2.
AugmentedHarrisSystem bifurcation_instance() {
  LatticeWindow w(1, 5, 1, 5.0);
  return HarrisBuilder(w)
      .arrow({0}, {-1}, 1.3)
      .arrow({0}, {1}, 1.6)
      .arrow({-1}, {-2}, 3.4)
      .arrow({1}, {2}, 3.6)
      .death({0}, 3.5)
      .death({-1}, 3.8)
      .death({1}, 3.9)
      .selective({2}, {3}, 2.5)
      .build();
}

}  // namespace

TEST(Render, EmptySystemIsAxesOnly) {
  LatticeWindow w(1, 3, 1, 2.0);
  auto h = HarrisBuilder(w).build();
  DiagramData d;
  d.system = &h;
  auto svg = render_svg({}, d);
  well_formed(svg);
  EXPECT_NE(svg.find("id=\"axes\""), std::string::npos);
  EXPECT_EQ(occurrences(svg, "class=\"death\""), 0u);
  EXPECT_EQ(occurrences(svg, "class=\"arrow\""), 0u);
}

TEST(Render, Deterministic) {
  auto h = sample_harris(LatticeWindow(1, 6, 1, 4.0), {2.0, 1.0}, 17);
  auto tr = evolve(Configuration::single(h.window(), h.window().origin(), 1, 2), h, 4.0);
  DiagramSpec spec;
  spec.layers = {Layer::trajectory, Layer::deaths, Layer::arrows, Layer::selective, Layer::ancestor};
  DiagramData d;
  d.system = &h;
  d.trajectory = &tr;
  d.ancestor = Origin{};
  auto a = render_svg(spec, d), b = render_svg(spec, d);
  EXPECT_EQ(a, b);
  well_formed(a);
  EXPECT_EQ(occurrences(a, "class=\"death\""), h.count(EventKind::death));
  EXPECT_EQ(occurrences(a, "class=\"arrow\""), h.count(EventKind::arrow));
  EXPECT_EQ(occurrences(a, "class=\"selective\""), h.count(EventKind::selective));
  EXPECT_GT(occurrences(a, "class=\"type1\"") + occurrences(a, "class=\"type2\""), 0u);
}

TEST(Render, SelectiveArrowsAreDashed) {
  LatticeWindow w(1, 3, 1, 2.0);
  auto h = HarrisBuilder(w).selective({0}, {1}, 1.0).arrow({1}, {0}, 1.5).build();
  DiagramData d;
  d.system = &h;
  auto svg = render_svg({}, d);
  auto sel = svg.find("<g id=\"selective\"");
  ASSERT_NE(sel, std::string::npos);
  EXPECT_NE(svg.substr(sel, svg.find('>', sel) - sel).find("stroke-dasharray"), std::string::npos);
  auto arr = svg.find("<g id=\"arrows\"");
  ASSERT_NE(arr, std::string::npos);
  EXPECT_EQ(svg.substr(arr, svg.find('>', arr) - arr).find("stroke-dasharray"), std::string::npos);
}

TEST(Render, BifurcationShowsSevenConditions) {
  auto h = bifurcation_instance();
  const auto& w = h.window();
  auto checks = check_bifurcation(h, 2, {}, w.origin(), 4.0);
  for (int k = 0; k < 7; ++k) EXPECT_TRUE(checks[k]) << "condition " << k + 1;

  DiagramSpec spec;
  spec.layers = {Layer::deaths, Layer::arrows, Layer::selective, Layer::bifurcation};
  DiagramData d;
  d.system = &h;
  d.bifurcations = {Bifurcation{.time = 4.0, .pivot = w.origin(), .t_minus = 1.3, .t_plus = 1.6}};
  auto svg = render_svg(spec, d);
  well_formed(svg);
  for (int k = 1; k <= 7; ++k)
    EXPECT_EQ(occurrences(svg, "data-condition=\"" + std::to_string(k) + "\""), 1u) << k;
  // The two unique basic paths are drawn inside their groups.
  for (int k : {6, 7}) {
    auto p = svg.find("data-condition=\"" + std::to_string(k) + "\"");
    auto end = svg.find("</g>", p);
    EXPECT_NE(svg.substr(p, end - p).find("<polyline"), std::string::npos) << k;
  }
  EXPECT_EQ(svg, render_svg(spec, d));
}

TEST(Render, PathsAndBoxes) {
  auto h = bifurcation_instance();
  const auto& w = h.window();
  auto ps = paths_to_level(h, w.origin(), 0.0, 5.0, PathMode::bip, 4);
  ASSERT_FALSE(ps.empty());
  DiagramSpec spec;
  spec.layers = {Layer::paths, Layer::boxes};
  DiagramData d;
  d.system = &h;
  d.paths = {{.path = ps[0], .dashed = true, .label = "a<b"}};
  d.boxes = {{.x_lo = -2, .x_hi = 2, .t_lo = 1, .t_hi = 3, .label = "box"}};
  auto svg = render_svg(spec, d);
  well_formed(svg);
  EXPECT_NE(svg.find("data-label=\"a&lt;b\""), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray=\"8 4\""), std::string::npos);
  EXPECT_EQ(occurrences(svg, "class=\"box\""), 1u);
}

TEST(Render, RejectsBadInput) {
  auto h = bifurcation_instance();
  DiagramData d;
  EXPECT_THROW(render_svg({}, d), std::invalid_argument);
  d.system = &h;
  DiagramSpec spec;
  spec.layers = {Layer::trajectory};
  EXPECT_THROW(render_svg(spec, d), std::invalid_argument);
  spec.layers = {};
  spec.t_hi = 9.0;
  EXPECT_THROW(render_svg(spec, d), std::invalid_argument);
  spec.t_hi = -1;
  spec.x_lo = -9;
  spec.x_hi = 1;
  EXPECT_THROW(render_svg(spec, d), std::invalid_argument);
  EXPECT_THROW(parse_layer("clouds"), std::invalid_argument);
  EXPECT_EQ(parse_layer(to_string(Layer::ancestor)), Layer::ancestor);
}

TEST(Render, Snapshot) {
  LatticeWindow w(2, 4, 1, 1.0);
  auto xi = Configuration::block(w, 1, 1, 0);
  xi.set(w.origin(), 2);
  auto svg = render_snapshot_svg(xi);
  well_formed(svg);
  EXPECT_EQ(occurrences(svg, "class=\"type1\""), 4u);
  EXPECT_EQ(occurrences(svg, "class=\"type2\""), 1u);
  EXPECT_THROW(render_snapshot_svg(Configuration::filled(LatticeWindow(1, 3, 1, 1.0), 1)), std::invalid_argument);
}
