#include "mtcp/render.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <stdexcept>

#include "mtcp/paths.hpp"

namespace mtcp {

namespace {

constexpr std::pair<Layer, const char*> kLayerNames[] = {
    {Layer::deaths, "deaths"},       {Layer::arrows, "arrows"},   {Layer::selective, "selective"},
    {Layer::trajectory, "trajectory"}, {Layer::paths, "paths"},   {Layer::ancestor, "ancestor"},
    {Layer::boxes, "boxes"},         {Layer::bifurcation, "bifurcation"},
};

constexpr double kMargin = 40.0;

std::string num(double v) {
  std::string s = fmt::format("{:.2f}", v);
  return s == "-0.00" ? "0.00" : s;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

class Canvas {
 public:
  Canvas(const DiagramSpec& spec, const LatticeWindow& w) : spec_(spec), w_(w) {
    t_hi_ = spec.t_hi < 0 ? w.horizon() : spec.t_hi;
    x_lo_ = spec.x_lo, x_hi_ = spec.x_hi;
    if (x_lo_ == x_hi_) x_lo_ = -w.radius(), x_hi_ = w.radius();
    if (x_lo_ > x_hi_ || x_lo_ < -w.radius() || x_hi_ > w.radius())
      throw std::invalid_argument("render: site range outside the window");
    if (!(spec.t_lo >= 0 && spec.t_lo < t_hi_ && t_hi_ <= w.horizon()))
      throw std::invalid_argument("render: time range outside [0, horizon]");
    if (!(spec.site_px > 0 && spec.time_px > 0)) throw std::invalid_argument("render: scales must be positive");
  }

  double width() const { return 2 * kMargin + (x_hi_ - x_lo_) * spec_.site_px; }
  double height() const { return 2 * kMargin + (t_hi_ - spec_.t_lo) * spec_.time_px; }
  double px(double x) const { return kMargin + (x - x_lo_) * spec_.site_px; }
  double py(Time t) const { return kMargin + (t_hi_ - t) * spec_.time_px; }
  Time clamp(Time t) const { return std::clamp(t, spec_.t_lo, t_hi_); }
  bool in_time(Time t) const { return t >= spec_.t_lo && t <= t_hi_; }

  // First coordinate when s lies on the drawn slice and column range.
  std::optional<int> column(SiteIndex s) const {
    auto c = w_.coord(s);
    for (std::size_t i = 1; i < c.size(); ++i)
      if (c[i] != 0) return std::nullopt;
    if (c[0] < x_lo_ || c[0] > x_hi_) return std::nullopt;
    return c[0];
  }

  Time t_lo() const { return spec_.t_lo; }
  Time t_hi() const { return t_hi_; }
  int x_lo() const { return x_lo_; }
  int x_hi() const { return x_hi_; }

 private:
  const DiagramSpec& spec_;
  const LatticeWindow& w_;
  Time t_hi_;
  int x_lo_, x_hi_;
};

void line(std::string& o, double x1, double y1, double x2, double y2, const std::string& extra = {}) {
  o += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"{}/>\n", num(x1), num(y1), num(x2), num(y2), extra);
}

void rect(std::string& o, double x1, double y1, double x2, double y2, const std::string& extra) {
  o += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"{}/>\n", num(std::min(x1, x2)),
                   num(std::min(y1, y2)), num(std::abs(x2 - x1)), num(std::abs(y2 - y1)), extra);
}

void axes(std::string& o, const Canvas& c) {
  o += "<g id=\"axes\" stroke=\"#bbbbbb\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"10\">\n";
  for (int x = c.x_lo(); x <= c.x_hi(); ++x) {
    line(o, c.px(x), c.py(c.t_lo()), c.px(x), c.py(c.t_hi()));
    o += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" stroke=\"none\" fill=\"#444444\">{}</text>\n",
                     num(c.px(x)), num(c.py(c.t_lo()) + 16), x);
  }
  Time step = 1.0;
  while ((c.t_hi() - c.t_lo()) / step > 20) step *= 2;
  for (Time t = std::ceil(c.t_lo() / step) * step; t <= c.t_hi(); t += step)
    o += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\" stroke=\"none\" fill=\"#444444\">{}</text>\n",
                     num(kMargin - 8), num(c.py(t) + 3), num(t));
  o += "</g>\n";
}

void arrow_line(std::string& o, const Canvas& c, int from, int to, Time t, const std::string& extra) {
  double inset = 0.18 * (c.px(1) - c.px(0)) * (to > from ? 1 : -1);
  line(o, c.px(from), c.py(t), c.px(to) - inset, c.py(t), extra);
}

void draw_events(std::string& o, const Canvas& c, const AugmentedHarrisSystem& h, Layer which) {
  const auto& w = h.window();
  const double r = 4.0;
  if (which == Layer::deaths) o += "<g id=\"deaths\" stroke=\"#000000\" stroke-width=\"1.6\">\n";
  else if (which == Layer::arrows)
    o += "<g id=\"arrows\" stroke=\"#555555\" stroke-width=\"1.3\" marker-end=\"url(#head)\">\n";
  else
    o += "<g id=\"selective\" stroke=\"#c0392b\" stroke-width=\"1.3\" stroke-dasharray=\"4 3\" "
         "marker-end=\"url(#head-sel)\">\n";
  for (const auto& e : h.events()) {
    if (!c.in_time(e.time)) continue;
    if (which == Layer::deaths && e.kind == EventKind::death) {
      auto x = c.column(e.index);
      if (!x) continue;
      double cx = c.px(*x), cy = c.py(e.time);
      o += "<g class=\"death\">\n";
      line(o, cx - r, cy - r, cx + r, cy + r);
      line(o, cx - r, cy + r, cx + r, cy - r);
      o += "</g>\n";
    } else if ((which == Layer::arrows && e.kind == EventKind::arrow) ||
               (which == Layer::selective && e.kind == EventKind::selective)) {
      auto a = c.column(w.edge_from(e.index)), b = c.column(w.edge_to(e.index));
      if (!a || !b) continue;
      arrow_line(o, c, *a, *b, e.time, which == Layer::arrows ? " class=\"arrow\"" : " class=\"selective\"");
    }
  }
  o += "</g>\n";
}

void draw_trajectory(std::string& o, const Canvas& c, const Trajectory& tr, double site_px) {
  const auto& w = tr.initial().window();
  std::map<SiteIndex, std::vector<std::pair<Time, State>>> runs;
  for (std::size_t s = 0; s < w.num_sites(); ++s)
    if (c.column(static_cast<SiteIndex>(s))) runs[static_cast<SiteIndex>(s)].push_back({0.0, tr.initial().at(static_cast<SiteIndex>(s))});
  for (const auto& t : tr.log())
    if (auto it = runs.find(t.site); it != runs.end()) it->second.push_back({t.time, t.new_state});
  o += fmt::format("<g id=\"trajectory\" stroke-width=\"{}\" stroke-opacity=\"0.35\">\n", num(0.4 * site_px));
  for (const auto& [s, seq] : runs) {
    double x = c.px(*c.column(s));
    for (std::size_t k = 0; k < seq.size(); ++k) {
      State v = seq[k].second;
      if (v == 0) continue;
      Time a = c.clamp(seq[k].first);
      Time b = c.clamp(k + 1 < seq.size() ? seq[k + 1].first : tr.end_time());
      if (b <= a) continue;
      line(o, x, c.py(a), x, c.py(b),
           fmt::format(" class=\"type{}\" stroke=\"{}\"", int(v), v == 1 ? "#1f77b4" : "#d62728"));
    }
  }
  o += "</g>\n";
}

// Polyline of a path restricted to the drawn slice; off-slice pieces break it.
void draw_path(std::string& o, const Canvas& c, const InfectionPath& p, const std::string& attrs) {
  std::vector<std::pair<double, double>> pts;
  auto flush = [&] {
    if (pts.size() >= 2) {
      o += "<polyline fill=\"none\"" + attrs + " points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i)
        o += (i ? " " : "") + num(pts[i].first) + "," + num(pts[i].second);
      o += "\"/>\n";
    }
    pts.clear();
  };
  SiteIndex cur = p.start;
  Time from = p.t1;
  auto piece = [&](Time to) {
    auto x = c.column(cur);
    Time a = c.clamp(from), b = c.clamp(to);
    if (!x || b < a) {
      flush();
      return;
    }
    pts.push_back({c.px(*x), c.py(a)});
    pts.push_back({c.px(*x), c.py(b)});
  };
  for (const auto& j : p.jumps) {
    piece(j.time);
    cur = j.to;
    from = j.time;
  }
  piece(p.t2);
  flush();
}

void draw_ancestor(std::string& o, const Canvas& c, const AugmentedHarrisSystem& h, Origin org) {
  org = resolve(h.window(), org);
  std::vector<Time> times{std::max(org.time, c.t_lo())};
  for (const auto& e : h.events())
    if (e.time > times.front() && e.time <= c.t_hi()) times.push_back(e.time);
  times.push_back(c.t_hi());
  InfectionPath track{.t1 = times.front(), .t2 = times.front(), .start = org.site, .jumps = {}};
  SiteIndex cur = org.site;
  if (auto a = ancestor_at(h, org.site, org.time, times.front())) {
    cur = *a;
    track.start = cur;
    for (Time t : times) {
      auto v = ancestor_at(h, org.site, org.time, t);
      if (!v) break;
      if (*v != cur) {
        track.jumps.push_back({t, cur, *v});
        cur = *v;
      }
      track.t2 = t;
    }
  }
  o += "<g id=\"ancestor\">\n";
  draw_path(o, c, track, " class=\"ancestor\" stroke=\"#2ca02c\" stroke-width=\"2.5\"");
  o += "</g>\n";
}

void draw_bifurcation(std::string& o, const Canvas& c, const AugmentedHarrisSystem& h, const Bifurcation& b,
                      int L) {
  const auto& w = h.window();
  auto y = c.column(b.pivot);
  if (!y) return;
  const Time t = b.time;
  const double half = 0.35 * (c.px(1) - c.px(0));
  auto cond = [&](int k) { return fmt::format(" class=\"bif\" data-condition=\"{}\"", k); };
  o += fmt::format("<g class=\"bifurcation\" data-time=\"{}\">\n", num(t));
  // 1: no deaths on {y-1, y, y+1} x [t-3, t-1]
  rect(o, c.px(*y - 1) - half, c.py(t - 3), c.px(*y + 1) + half, c.py(t - 1),
       cond(1) + " fill=\"#ffe08a\" fill-opacity=\"0.35\" stroke=\"none\"");
  // 2: a death at y in [t-1, t]
  for (Time d : h.deaths(b.pivot))
    if (d >= t - 1 && d <= t)
      o += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"7\"{} fill=\"none\" stroke=\"#e67e22\" stroke-width=\"2\"/>\n",
                       num(c.px(*y)), num(c.py(d)), cond(2));
  // 3: the two arrows out of y in [t-3, t-2]
  o += "<g" + cond(3) + " stroke=\"#e67e22\" stroke-width=\"3\">\n";
  line(o, c.px(*y), c.py(b.t_minus), c.px(*y - 1), c.py(b.t_minus));
  line(o, c.px(*y), c.py(b.t_plus), c.px(*y + 1), c.py(b.t_plus));
  o += "</g>\n";
  // 4: no arrows out of y in [t-2, t]
  rect(o, c.px(*y) - half / 2, c.py(t - 2), c.px(*y) + half / 2, c.py(t),
       cond(4) + " fill=\"none\" stroke=\"#8e44ad\" stroke-dasharray=\"2 2\"");
  // 5: no arrows out of y - 1, y + 1 in [t-3, t-1]
  o += "<g" + cond(5) + " fill=\"none\" stroke=\"#16a085\" stroke-dasharray=\"2 2\">\n";
  rect(o, c.px(*y - 1) - half / 2, c.py(t - 3), c.px(*y - 1) + half / 2, c.py(t - 1), "");
  rect(o, c.px(*y + 1) - half / 2, c.py(t - 3), c.px(*y + 1) + half / 2, c.py(t - 1), "");
  o += "</g>\n";
  // 6, 7: the unique basic paths from (y -+ 1, t - 1) to y -+ L
  int k = 6;
  for (int dir : {-1, 1}) {
    auto from = w.step(b.pivot, 0, dir);
    auto to = w.step(b.pivot, 0, dir * L);
    o += "<g" + cond(k++) + ">\n";
    if (from && to)
      for (const auto& p : paths_to_level(h, *from, t - 1, t, PathMode::bip, 64))
        if (p.end() == *to) draw_path(o, c, p, " stroke=\"#e67e22\" stroke-width=\"2.5\"");
    o += "</g>\n";
  }
  line(o, c.px(c.x_lo()), c.py(t), c.px(c.x_hi()), c.py(t), " stroke=\"#e67e22\" stroke-dasharray=\"6 4\"");
  o += "</g>\n";
}

}  // namespace

const char* to_string(Layer l) {
  for (auto [k, n] : kLayerNames)
    if (k == l) return n;
  return "?";
}

Layer parse_layer(const std::string& s) {
  for (auto [k, n] : kLayerNames)
    if (s == n) return k;
  throw std::invalid_argument("unknown layer: " + s);
}

std::string render_svg(const DiagramSpec& spec, const DiagramData& data) {
  if (!data.system) throw std::invalid_argument("render: no system");
  const auto& h = *data.system;
  Canvas c(spec, h.window());
  std::string o;
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
      num(c.width()), num(c.height()), num(c.width()), num(c.height()));
  o += "<defs>\n"
       "<marker id=\"head\" markerWidth=\"8\" markerHeight=\"8\" refX=\"6\" refY=\"4\" orient=\"auto\">"
       "<path d=\"M0,0 L8,4 L0,8 z\" fill=\"#555555\"/></marker>\n"
       "<marker id=\"head-sel\" markerWidth=\"8\" markerHeight=\"8\" refX=\"6\" refY=\"4\" orient=\"auto\">"
       "<path d=\"M0,0 L8,4 L0,8 z\" fill=\"#c0392b\"/></marker>\n"
       "</defs>\n";
  o += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", num(c.width()),
                   num(c.height()));
  axes(o, c);
  for (Layer l : spec.layers) {
    switch (l) {
      case Layer::deaths:
      case Layer::arrows:
      case Layer::selective: draw_events(o, c, h, l); break;
      case Layer::trajectory:
        if (!data.trajectory) throw std::invalid_argument("render: trajectory layer without a trajectory");
        draw_trajectory(o, c, *data.trajectory, spec.site_px);
        break;
      case Layer::paths:
        o += "<g id=\"paths\">\n";
        for (const auto& p : data.paths) {
          validate_path(h.window(), p.path);
          std::string attrs = " class=\"path\" stroke=\"#000000\" stroke-width=\"3\"";
          if (p.dashed) attrs += " stroke-dasharray=\"8 4\"";
          if (!p.label.empty()) attrs += " data-label=\"" + escape(p.label) + "\"";
          draw_path(o, c, p.path, attrs);
        }
        o += "</g>\n";
        break;
      case Layer::ancestor:
        if (!data.ancestor) throw std::invalid_argument("render: ancestor layer without an origin");
        draw_ancestor(o, c, h, *data.ancestor);
        break;
      case Layer::boxes:
        o += "<g id=\"boxes\" fill=\"none\" stroke=\"#9467bd\" stroke-width=\"1.5\">\n";
        for (const auto& b : data.boxes) {
          std::string extra = " class=\"box\"";
          if (!b.label.empty()) extra += " data-label=\"" + escape(b.label) + "\"";
          rect(o, c.px(std::max<double>(b.x_lo, c.x_lo())), c.py(c.clamp(b.t_lo)),
               c.px(std::min<double>(b.x_hi, c.x_hi())), c.py(c.clamp(b.t_hi)), extra);
        }
        o += "</g>\n";
        break;
      case Layer::bifurcation:
        o += "<g id=\"bifurcations\">\n";
        for (const auto& b : data.bifurcations) draw_bifurcation(o, c, h, b, data.L);
        o += "</g>\n";
        break;
    }
  }
  o += "</svg>\n";
  return o;
}

std::string render_snapshot_svg(const Configuration& xi, double cell_px) {
  const auto& w = xi.window();
  if (w.dim() < 2) throw std::invalid_argument("snapshot: needs dimension >= 2");
  const int m = w.radius();
  const double side = (2 * m + 1) * cell_px;
  std::string o;
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
      num(side), num(side), num(side), num(side));
  o += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#f4f4f4\"/>\n", num(side), num(side));
  o += "<g id=\"snapshot\" stroke=\"none\">\n";
  Coord x(static_cast<std::size_t>(w.dim()), 0);
  for (int a = -m; a <= m; ++a)
    for (int b = -m; b <= m; ++b) {
      x[0] = a;
      x[1] = b;
      auto s = w.find(x);
      if (!s) continue;
      State v = xi.at(*s);
      if (v == 0) continue;
      rect(o, (a + m) * cell_px, (m - b) * cell_px, (a + m + 1) * cell_px, (m - b + 1) * cell_px,
           fmt::format(" class=\"type{}\" fill=\"{}\"", int(v), v == 1 ? "#1f77b4" : "#d62728"));
    }
  o += "</g>\n</svg>\n";
  return o;
}

}  // namespace mtcp
