#include "mtcp/ancestor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "mtcp/rng.hpp"

namespace mtcp {

std::optional<SiteIndex> ancestor_at(const AugmentedHarrisSystem& h,
                                     SiteIndex x, Time s, Time t) {
  if (!(s <= t)) throw std::invalid_argument("ancestor_at: s > t");
  if (s < 0.0 || t > h.horizon())
    throw std::invalid_argument("ancestor_at: times outside [0, horizon]");
  auto p = rfbip_direct(h, x, s, t);
  if (!p) return std::nullopt;
  return p->end();
}

Origin resolve(const LatticeWindow& w, Origin o) {
  if (o.site < 0) o.site = w.origin();
  return o;
}

AncestorTrack ancestor_track(const AugmentedHarrisSystem& h, Origin o,
                             std::span<const Time> times) {
  AncestorTrack tr{o, {times.begin(), times.end()}, {}};
  bool dead = false;
  for (Time t : times) {
    if (dead) {
      tr.values.push_back(std::nullopt);
      continue;
    }
    auto v = ancestor_at(h, o.site, o.time, t);
    dead = !v.has_value();
    tr.values.push_back(v);
  }
  return tr;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t count_in(std::span<const Time> l, Time a, Time b) {
  auto lo = std::lower_bound(l.begin(), l.end(), a);
  auto hi = std::upper_bound(l.begin(), l.end(), b);
  return hi > lo ? static_cast<std::size_t>(hi - lo) : 0;
}

std::optional<Time> first_in(std::span<const Time> l, Time a, Time b) {
  auto it = std::lower_bound(l.begin(), l.end(), a);
  if (it != l.end() && *it <= b) return *it;
  return std::nullopt;
}

std::size_t out_arrows_in(const AugmentedHarrisSystem& h, SiteIndex x, Time a,
                          Time b) {
  std::size_t n = 0;
  for (EdgeIndex e : h.window().out_edges(x)) n += count_in(h.arrows(e), a, b);
  return n;
}

struct Pivot {
  SiteIndex y;
  std::optional<SiteIndex> ym, yp, yl_minus, yl_plus;
  std::optional<EdgeIndex> to_minus, to_plus;
};

Pivot pivot_geometry(const LatticeWindow& w, SiteIndex y, int L) {
  Pivot p{y, w.step(y, 0, -1), w.step(y, 0, 1), w.step(y, 0, -L),
          w.step(y, 0, L), std::nullopt, std::nullopt};
  if (p.ym) p.to_minus = w.find_edge(y, *p.ym);
  if (p.yp) p.to_plus = w.find_edge(y, *p.yp);
  return p;
}

bool complete(const Pivot& p) {
  return p.ym && p.yp && p.yl_minus && p.yl_plus && p.to_minus && p.to_plus;
}

bool unique_path_to(const AugmentedHarrisSystem& h, SiteIndex from, Time s,
                    Time t, SiteIndex end) {
  auto paths = paths_to_level(h, from, s, t, PathMode::bip, 2);
  return paths.size() == 1 && paths[0].end() == end;
}

bool origin_condition(const AugmentedHarrisSystem& h, Origin o, SiteIndex y,
                      Time t) {
  if (!reaches_level(h, o.site, o.time, t)) return false;
  auto eta = ancestor_at(h, o.site, o.time, t - 3.0);
  return eta && *eta == y;
}

// Conditions 1-5 only.
bool local_conditions(const AugmentedHarrisSystem& h, const Pivot& p, Time t,
                      BifurcationChecks* out) {
  bool c[5];
  c[0] = !h.death_in(*p.ym, t - 3.0, t - 1.0) &&
         !h.death_in(p.y, t - 3.0, t - 1.0) &&
         !h.death_in(*p.yp, t - 3.0, t - 1.0);
  c[1] = h.death_in(p.y, t - 1.0, t);
  c[2] = out_arrows_in(h, p.y, t - 3.0, t - 2.0) == 2 &&
         count_in(h.arrows(*p.to_minus), t - 3.0, t - 2.0) == 1 &&
         count_in(h.arrows(*p.to_plus), t - 3.0, t - 2.0) == 1;
  c[3] = out_arrows_in(h, p.y, t - 2.0, t) == 0;
  c[4] = out_arrows_in(h, *p.ym, t - 3.0, t - 1.0) == 0 &&
         out_arrows_in(h, *p.yp, t - 3.0, t - 1.0) == 0;
  if (out)
    for (int k = 0; k < 5; ++k) (*out)[static_cast<std::size_t>(k)] = c[k];
  return c[0] && c[1] && c[2] && c[3] && c[4];
}

bool passes(const AugmentedHarrisSystem& h, Origin o, const Pivot& p,
            Time t) {
  if (t - o.time < 3.0 || t > h.horizon()) return false;
  if (!local_conditions(h, p, t, nullptr)) return false;
  if (!unique_path_to(h, *p.ym, t - 1.0, t, *p.yl_minus)) return false;
  if (!unique_path_to(h, *p.yp, t - 1.0, t, *p.yl_plus)) return false;
  return origin_condition(h, o, p.y, t);
}

struct Window {
  SiteIndex y;
  Time lo;
  Time hi;
};

// Candidate times inside one local pattern window, increasing.
std::vector<Time> candidate_times(const AugmentedHarrisSystem& h,
                                  const Pivot& p, Time lo, Time hi) {
  const auto& w = h.window();
  std::vector<Time> c{lo, lo + kTimeTick};
  auto add = [&](std::span<const Time> l) {
    auto it = std::lower_bound(l.begin(), l.end(), lo - 3.0);
    for (; it != l.end() && *it <= hi; ++it)
      for (int k = 0; k <= 3; ++k) {
        Time v = *it + k;
        if (v > lo && v <= hi) {
          c.push_back(v);
          c.push_back(v + kTimeTick);
        }
      }
  };
  for (SiteIndex s : {*p.ym, p.y, *p.yp}) {
    add(h.deaths(s));
    for (EdgeIndex e : w.out_edges(s)) add(h.arrows(e));
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  while (!c.empty() && c.back() > hi) c.pop_back();
  return c;
}

struct TimedEdge {
  Time time;
  EdgeIndex edge;
};

std::vector<Window> candidate_windows(const AugmentedHarrisSystem& h, int L,
                                      Time t_min) {
  const auto& w = h.window();
  std::vector<Window> out;
  std::vector<TimedEdge> arr;
  for (std::size_t ys = 0; ys < w.num_sites(); ++ys) {
    auto y = static_cast<SiteIndex>(ys);
    Pivot p = pivot_geometry(w, y, L);
    if (!complete(p)) continue;
    arr.clear();
    for (EdgeIndex e : w.out_edges(y))
      for (Time t : h.arrows(e)) arr.push_back({t, e});
    std::sort(arr.begin(), arr.end(),
              [](const TimedEdge& a, const TimedEdge& b) { return a.time < b.time; });
    for (std::size_t i = 0; i + 1 < arr.size(); ++i) {
      const auto& a1 = arr[i];
      const auto& a2 = arr[i + 1];
      bool pair = (a1.edge == *p.to_minus && a2.edge == *p.to_plus) ||
                  (a1.edge == *p.to_plus && a2.edge == *p.to_minus);
      if (!pair || a2.time - a1.time > 1.0) continue;
      Time lo = std::max({a2.time + 2.0, t_min, 3.0});
      Time hi = std::min(a1.time + 3.0, h.horizon());
      // The next out-arrow must come after t and the previous before t - 3.
      if (i + 2 < arr.size()) hi = std::min(hi, arr[i + 2].time - kTimeTick);
      if (i > 0) lo = std::max(lo, arr[i - 1].time + 3.0 + kTimeTick);
      if (lo > hi) continue;
      // A death of y in [t-1, t] is required.
      auto d = h.deaths(y);
      auto it = std::lower_bound(d.begin(), d.end(), lo - 1.0);
      if (it == d.end() || *it > hi) continue;
      out.push_back({y, lo, hi});
    }
  }
  std::sort(out.begin(), out.end(), [](const Window& a, const Window& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.y < b.y);
  });
  return out;
}

Bifurcation make_record(const AugmentedHarrisSystem& h, const Pivot& p,
                        Time t) {
  Bifurcation b;
  b.time = t;
  b.pivot = p.y;
  b.t_minus = *first_in(h.arrows(*p.to_minus), t - 3.0, t - 2.0);
  b.t_plus = *first_in(h.arrows(*p.to_plus), t - 3.0, t - 2.0);
  return b;
}

}  // namespace

BifurcationChecks check_bifurcation(const AugmentedHarrisSystem& h, int L,
                                    Origin o, SiteIndex y, Time t) {
  BifurcationChecks c{};
  if (L <= 1) throw std::invalid_argument("bifurcation: L must exceed 1");
  o = resolve(h.window(), o);
  if (t - o.time < 3.0 || t > h.horizon()) return c;
  Pivot p = pivot_geometry(h.window(), y, L);
  if (!complete(p)) return c;
  local_conditions(h, p, t, &c);
  c[5] = unique_path_to(h, *p.ym, t - 1.0, t, *p.yl_minus);
  c[6] = unique_path_to(h, *p.yp, t - 1.0, t, *p.yl_plus);
  c[7] = origin_condition(h, o, y, t);
  return c;
}

std::vector<Bifurcation> find_bifurcations(const AugmentedHarrisSystem& h,
                                           int L, Origin o, Time t_min,
                                           bool first_only) {
  if (L <= 1) throw std::invalid_argument("bifurcation: L must exceed 1");
  std::vector<Bifurcation> out;
  o = resolve(h.window(), o);
  t_min = std::max(t_min, o.time + 3.0);
  if (t_min > h.horizon()) return out;
  if (!reaches_level(h, o.site, o.time, t_min)) return out;
  const auto& w = h.window();
  for (const Window& win : candidate_windows(h, L, t_min)) {
    if (first_only && !out.empty() && win.lo > out.front().time) break;
    Pivot p = pivot_geometry(w, win.y, L);
    for (Time t : candidate_times(h, p, win.lo, win.hi)) {
      if (!passes(h, o, p, t)) continue;
      Bifurcation b = make_record(h, p, t);
      if (first_only) {
        if (out.empty() || b.time < out.front().time) out.assign(1, b);
      } else {
        out.push_back(b);
      }
      break;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Bifurcation& a, const Bifurcation& b) {
              return a.time < b.time || (a.time == b.time && a.pivot < b.pivot);
            });
  return out;
}

std::optional<Bifurcation> first_bifurcation(const AugmentedHarrisSystem& h,
                                             int L, Origin o, Time t_min) {
  auto v = find_bifurcations(h, L, o, t_min, true);
  if (v.empty()) return std::nullopt;
  return v.front();
}

// ---------------------------------------------------------------------------

Ingredient1 build_ingredient1(const AugmentedHarrisSystem& h, int L, Origin o) {
  Ingredient1 r;
  o = resolve(h.window(), o);
  Time t_min = o.time + 3.0;
  for (;;) {
    auto b = first_bifurcation(h, L, o, t_min);
    if (!b) {
      r.reason = r.ladder.empty() ? "no bifurcation time within the horizon"
                                  : "no bifurcation time after V_k + 3";
      return r;
    }
    const auto& w = h.window();
    SiteIndex pair[2] = {*w.step(b->pivot, 0, -L), *w.step(b->pivot, 0, L)};
    DeathTime v = death_time(h, pair, b->time);
    r.ladder.push_back({b->time, b->pivot, v.value, v.censored});
    if (v.censored) {
      r.found = true;
      r.u_star = b->time;
      r.y_star = b->pivot;
      r.bifurcation = *b;
      return r;
    }
    if (!ancestor_at(h, o.site, o.time, v.value)) {
      r.reason = "ancestor extinct at V_k";
      return r;
    }
    t_min = v.value + 3.0;
  }
}

Ingredient2 build_ingredient2(const AugmentedHarrisSystem& h, int L,
                              Orientation orient, Origin o) {
  Ingredient2 r;
  const auto& w = h.window();
  o = resolve(w, o);
  int sign = orient == Orientation::plus ? 1 : -1;
  auto a = w.step(o.site, 0, sign * L);
  auto b = w.step(o.site, 0, -sign * L);
  if (!a || !b) {
    r.reason = "pair outside the window";
    return r;
  }
  auto finish = [&](SiteIndex z, Time t) {
    r.found = true;
    r.z_site = z;
    r.w_time = t;
    auto zc = w.coord(z);
    auto oc = w.coord(o.site);
    r.z.resize(zc.size());
    for (std::size_t k = 0; k < zc.size(); ++k) r.z[k] = zc[k] - oc[k];
    r.w = t - o.time;
    return r;
  };
  SiteIndex first[1] = {*a};
  DeathTime wk = death_time(h, first, o.time);
  if (wk.censored) return finish(*a, o.time);
  const std::size_t guard = h.events().size() + 2;
  for (std::size_t k = 0; k < guard; ++k) {
    auto z = ancestor_at(h, *b, o.time, wk.value);
    if (!z) {
      r.reason = "both ancestries die out";
      return r;
    }
    r.ladder.push_back({*z, wk.value});
    SiteIndex cur[1] = {*z};
    DeathTime next = death_time(h, cur, wk.value);
    if (next.censored) return finish(*z, wk.value);
    if (!(next.value > wk.value))
      throw std::logic_error("ingredient 2: ladder did not advance");
    wk = next;
  }
  throw std::logic_error("ingredient 2: ladder did not stop");
}

// ---------------------------------------------------------------------------

namespace {

InfectionPath rfbip_to(const AugmentedHarrisSystem& h, SiteIndex x, Time t1,
                       Time t2, SiteIndex expected) {
  auto p = rfbip_direct(h, x, t1, t2);
  if (!p || p->end() != expected)
    throw std::logic_error("renewal witness: segment does not reach its anchor");
  return *p;
}

InfectionPath hold(InfectionPath p, Time t) {
  if (t < p.t2) throw std::logic_error("renewal witness: hold before end");
  p.t2 = t;
  return p;
}

bool survives(const AugmentedHarrisSystem& h, SiteIndex x, Time t) {
  SiteIndex s[1] = {x};
  return death_time(h, s, t).censored;
}

}  // namespace

RenewalPoint build_renewal_point(const AugmentedHarrisSystem& h, int L,
                                 Origin o) {
  RenewalPoint r;
  o = resolve(h.window(), o);
  if (!survives(h, o.site, o.time)) {
    r.reason = "origin does not reach the horizon";
    return r;
  }
  r.ing1 = build_ingredient1(h, L, o);
  if (!r.ing1.found) {
    r.reason = "ingredient 1: " + r.ing1.reason;
    return r;
  }
  const auto& w = h.window();
  const SiteIndex y = r.ing1.y_star;
  const Time u = r.ing1.u_star;
  const Bifurcation& bif = r.ing1.bifurcation;
  const SiteIndex yp = *w.step(y, 0, 1);
  const SiteIndex ym = *w.step(y, 0, -1);
  const SiteIndex ylp = *w.step(y, 0, L);
  const SiteIndex ylm = *w.step(y, 0, -L);

  r.t_plus_sel = first_in(h.selective(*w.find_edge(y, yp)), u - 2.0, u - 1.0);
  r.selective_event = r.t_plus_sel.has_value();
  bool plus = r.selective_event || bif.t_plus > bif.t_minus;
  r.orientation = plus ? Orientation::plus : Orientation::minus;
  r.ing2 = build_ingredient2(h, L, r.orientation, {y, u});
  if (!r.ing2.found) {
    r.reason = "ingredient 2: " + r.ing2.reason;
    return r;
  }
  r.found = true;
  r.x_site = r.ing2.z_site;
  r.t_abs = r.ing2.w_time;
  {
    auto xc = w.coord(r.x_site);
    auto oc = w.coord(o.site);
    r.x.resize(xc.size());
    for (std::size_t k = 0; k < xc.size(); ++k) r.x[k] = xc[k] - oc[k];
    r.t = r.t_abs - o.time;
  }

  if (!r.selective_event && bif.t_minus > bif.t_plus)
    r.case_tag = survives(h, ylm, u) ? 1 : 2;
  else if (!r.selective_event)
    r.case_tag = survives(h, ylp, u) ? 3 : 4;
  else
    r.case_tag = survives(h, ylp, u) ? 5 : 6;

  InfectionPath seg0 = rfbip_to(h, o.site, o.time, u - 3.0, y);
  InfectionPath g;
  switch (r.case_tag) {
    case 1:
      g = join_by_jump(hold(seg0, bif.t_minus),
                       rfbip_to(h, ym, bif.t_minus, u, ylm));
      break;
    case 2:
      g = join_by_jump(hold(seg0, bif.t_plus),
                       rfbip_to(h, yp, bif.t_plus, u, ylp));
      g = concatenate(g, rfbip_to(h, ylp, u, r.t_abs, r.x_site));
      break;
    case 3:
      g = join_by_jump(hold(seg0, bif.t_plus),
                       rfbip_to(h, yp, bif.t_plus, u, ylp));
      break;
    case 5:
      g = join_by_jump(hold(seg0, *r.t_plus_sel),
                       rfbip_to(h, yp, *r.t_plus_sel, u, ylp));
      break;
    default:  // 4 and 6
      g = join_by_jump(hold(seg0, bif.t_minus),
                       rfbip_to(h, ym, bif.t_minus, u, ylm));
      g = concatenate(g, rfbip_to(h, ylm, u, r.t_abs, r.x_site));
      break;
  }
  if (g.end() != r.x_site || g.t2 != r.t_abs)
    throw std::logic_error("renewal witness does not end at (X, T)");
  r.witness = std::move(g);
  return r;
}

namespace {

void map_back(RenewalPoint& r, const LatticeWindow& w, int i, int kappa,
              Origin o) {
  auto m = [&](SiteIndex s) { return psi_site(w, s, i, kappa); };
  if (r.found) {
    r.x_site = m(r.x_site);
    auto xc = w.coord(r.x_site);
    auto oc = w.coord(o.site);
    for (std::size_t k = 0; k < xc.size(); ++k) r.x[k] = xc[k] - oc[k];
  }
  r.ing1.y_star = m(r.ing1.y_star);
  r.ing1.bifurcation.pivot = m(r.ing1.bifurcation.pivot);
  for (auto& s : r.ing1.ladder) s.y = m(s.y);
  r.ing2.z_site = m(r.ing2.z_site);
  if (!r.ing2.z.empty()) r.ing2.z = psi(r.ing2.z, i, kappa);
  for (auto& s : r.ing2.ladder) s.z = m(s.z);
  if (r.witness) {
    std::vector<SiteIndex> map(w.num_sites());
    for (std::size_t s = 0; s < map.size(); ++s)
      map[s] = m(static_cast<SiteIndex>(s));
    r.witness = map_sites(*r.witness, map);
  }
}

}  // namespace

RenewalPoint reflected_renewal_point(const AugmentedHarrisSystem& h, int L,
                                     Origin o, int i, int kappa) {
  if (i == 1 && kappa == 1) return build_renewal_point(h, L, o);
  const auto& w = h.window();
  o = resolve(w, o);
  AugmentedHarrisSystem hr = reflect_psi(h, i, kappa);
  Origin oref{psi_site(w, o.site, i, kappa), o.time};
  RenewalPoint r = build_renewal_point(hr, L, oref);
  map_back(r, w, i, kappa, o);
  return r;
}

SteeredSequence steered_sequence(const AugmentedHarrisSystem& h, int L,
                                 SiteIndex x, int depth) {
  if (depth < 1) throw std::invalid_argument("steered_sequence: depth < 1");
  const auto& w = h.window();
  SteeredSequence seq;
  seq.steps.push_back({x, 0.0, w.coord_vec(x), {}, {}});
  seq.witness = constant_path(x, 0.0, 0.0);
  for (int n = 0; n < depth; ++n) {
    SteeredStep& cur = seq.steps.back();
    for (int c : cur.s) cur.kappa.push_back(c <= 0 ? 1 : -1);
    Origin o{cur.site, cur.time};
    std::vector<int> tags;
    for (int i = 1; i <= w.dim(); ++i) {
      RenewalPoint r = reflected_renewal_point(
          h, L, o, i, seq.steps.back().kappa[static_cast<std::size_t>(i - 1)]);
      if (!r.found) {
        seq.truncated = true;
        seq.reason = r.reason;
        return seq;
      }
      seq.witness = concatenate(seq.witness, *r.witness);
      tags.push_back(r.case_tag);
      o = {r.x_site, r.t_abs};
    }
    seq.steps.back().case_tags = tags;
    seq.steps.push_back({o.site, o.time, w.coord_vec(o.site), {}, {}});
  }
  return seq;
}

// ---------------------------------------------------------------------------

namespace {

Time on_grid(Time t) { return std::ldexp(std::floor(std::ldexp(t, 32)), -32); }

}  // namespace

AugmentedHarrisSystem plant_bifurcation(const AugmentedHarrisSystem& h, int L,
                                        SiteIndex center, Time t0,
                                        std::uint64_t seed) {
  if (L <= 1) throw std::invalid_argument("plant_bifurcation: L must exceed 1");
  const auto& w = h.window();
  if (t0 < 0.0 || t0 + 3.0 > h.horizon())
    throw std::invalid_argument("plant_bifurcation: [t0, t0+3] outside horizon");
  std::vector<SiteIndex> line;
  for (int k = -L; k <= L; ++k) {
    auto s = w.step(center, 0, k);
    if (!s) throw std::invalid_argument("plant_bifurcation: pattern leaves window");
    line.push_back(*s);
  }
  HarrisBuilder b = HarrisBuilder::from(h);
  for (SiteIndex s : line) {
    b.erase(EventKind::death, s, t0, t0 + 3.0);
    for (EdgeIndex e : w.out_edges(s)) b.erase(EventKind::arrow, e, t0, t0 + 3.0);
  }
  Engine rng(seed);
  auto u = [&](Time lo, Time hi) { return on_grid(lo + (hi - lo) * uniform01(rng)); };
  auto c = [&](SiteIndex s) { return w.coord(s); };
  auto site = [&](int k) { return line[static_cast<std::size_t>(k + L)]; };
  b.arrow(c(center), c(site(1)), u(t0, t0 + 1.0));
  b.arrow(c(center), c(site(-1)), u(t0, t0 + 1.0));
  b.death(c(center), u(t0 + 2.0, t0 + 3.0));
  for (int sign : {-1, 1}) {
    std::vector<Time> s(static_cast<std::size_t>(L - 1));
    for (auto& v : s) v = u(t0 + 2.0, t0 + 3.0);
    std::sort(s.begin(), s.end());
    for (int k = 1; k < L; ++k) {
      Time jump = s[static_cast<std::size_t>(k - 1)];
      b.arrow(c(site(sign * k)), c(site(sign * (k + 1))), jump);
      b.death(c(site(sign * k)), u(jump, t0 + 3.0));
    }
  }
  return b.build();
}

// ---------------------------------------------------------------------------

std::string renewal_to_json(const AugmentedHarrisSystem& h, int L,
                            const RenewalPoint& r) {
  const auto& w = h.window();
  nlohmann::json j;
  j["type"] = "renewal_point";
  j["seed"] = h.seed();
  j["L"] = L;
  j["horizon"] = h.horizon();
  j["found"] = r.found;
  if (!r.found) j["reason"] = r.reason;
  if (r.found) {
    j["X"] = r.x;
    j["T"] = r.t;
    j["case"] = r.case_tag;
    j["E"] = r.selective_event;
    if (r.t_plus_sel) j["t_plus_selective"] = *r.t_plus_sel;
    j["orientation"] = r.orientation == Orientation::plus ? "+" : "-";
  }
  if (r.ing1.found) {
    j["U_star"] = r.ing1.u_star;
    j["Y_star"] = w.coord_vec(r.ing1.y_star);
    j["t_minus"] = r.ing1.bifurcation.t_minus;
    j["t_plus"] = r.ing1.bifurcation.t_plus;
  }
  nlohmann::json ladder = nlohmann::json::array();
  for (const auto& s : r.ing1.ladder)
    ladder.push_back({{"U", s.u},
                      {"Y", w.coord_vec(s.y)},
                      {"V", s.v},
                      {"V_censored", s.v_censored}});
  j["ingredient1"] = ladder;
  if (r.ing2.found) {
    j["Z_star"] = r.ing2.z;
    j["W_star"] = r.ing2.w;
  }
  nlohmann::json l2 = nlohmann::json::array();
  for (const auto& s : r.ing2.ladder)
    l2.push_back({{"Z", w.coord_vec(s.z)}, {"W", s.w}});
  j["ingredient2"] = l2;
  if (r.witness) j["witness"] = nlohmann::json::parse(path_to_json(w, *r.witness));
  return j.dump(2);
}

std::string steered_to_json(const AugmentedHarrisSystem& h, int L,
                            const SteeredSequence& s) {
  const auto& w = h.window();
  nlohmann::json j;
  j["type"] = "steered_sequence";
  j["seed"] = h.seed();
  j["L"] = L;
  j["horizon"] = h.horizon();
  j["truncated"] = s.truncated;
  if (s.truncated) j["reason"] = s.reason;
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& st : s.steps)
    steps.push_back({{"S", st.s},
                     {"tau", st.time},
                     {"kappa", st.kappa},
                     {"cases", st.case_tags}});
  j["steps"] = steps;
  j["witness"] = nlohmann::json::parse(path_to_json(w, s.witness));
  return j.dump(2);
}

}  // namespace mtcp
