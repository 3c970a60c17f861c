#include "mtcp/harris.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "mtcp/rng.hpp"

namespace mtcp {

namespace {

using json = nlohmann::json;
using TimeList = AugmentedHarrisSystem::TimeList;

Time quantize(Time t) {
  return std::ldexp(std::nearbyint(std::ldexp(t, 32)), -32);
}

void check_rates(Rates r, bool allow_equal) {
  if (!std::isfinite(r.lambda1) || !std::isfinite(r.lambda2))
    throw std::invalid_argument("rates must be finite");
  if (r.lambda2 < 0.0)
    throw std::invalid_argument("rates must satisfy lambda1 > lambda2 > 0");
  bool ok = allow_equal ? r.lambda1 >= r.lambda2 : r.lambda1 > r.lambda2;
  if (!ok)
    throw std::invalid_argument(
        "rates must satisfy lambda1 > lambda2 > 0 (selective rate "
        "lambda1 - lambda2 must be positive)");
}

std::vector<Event> merge_lists(const std::vector<TimeList>& deaths,
                               const std::vector<TimeList>& arrows,
                               const std::vector<TimeList>& selective) {
  std::vector<Event> out;
  auto add = [&out](const std::vector<TimeList>& lists, EventKind kind) {
    for (std::size_t i = 0; i < lists.size(); ++i)
      for (Time t : lists[i])
        out.push_back({t, static_cast<std::int32_t>(i), kind});
  };
  add(deaths, EventKind::death);
  add(arrows, EventKind::arrow);
  add(selective, EventKind::selective);
  std::sort(out.begin(), out.end(), [](const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.index < b.index;
  });
  return out;
}

AugmentedHarrisSystem from_stream(const LatticeWindow& w, Rates rates,
                                  std::uint64_t seed, bool truncated,
                                  std::vector<Event> stream) {
  return AugmentedHarrisSystem::from_events(w, rates, seed, truncated,
                                            std::move(stream));
}

std::vector<Time> slice(std::span<const Time> list, Time a, Time b) {
  if (a > b) return {};
  auto lo = std::lower_bound(list.begin(), list.end(), a);
  auto hi = std::upper_bound(list.begin(), list.end(), b);
  return std::vector<Time>(lo, hi);
}

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::death: return "death";
    case EventKind::arrow: return "arrow";
    case EventKind::selective: return "selective-arrow";
  }
  return "?";
}

AugmentedHarrisSystem::AugmentedHarrisSystem(LatticeWindow window, Rates rates,
                                             std::uint64_t seed,
                                             std::vector<TimeList> deaths,
                                             std::vector<TimeList> arrows,
                                             std::vector<TimeList> selective,
                                             bool truncated)
    : window_(std::move(window)),
      rates_(rates),
      seed_(seed),
      truncated_(truncated),
      deaths_(std::move(deaths)),
      arrows_(std::move(arrows)),
      selective_(std::move(selective)) {
  if (deaths_.size() != window_.num_sites() ||
      arrows_.size() != window_.num_edges() ||
      selective_.size() != window_.num_edges())
    throw std::invalid_argument("event list shape does not match the window");
  const Time th = window_.horizon();
  for (const auto* group : {&deaths_, &arrows_, &selective_}) {
    for (const auto& list : *group) {
      for (std::size_t k = 0; k < list.size(); ++k) {
        if (!(list[k] >= 0.0 && list[k] <= th))
          throw std::invalid_argument("event time outside [0, horizon]");
        if (k > 0 && !(list[k - 1] < list[k]))
          throw std::invalid_argument("event list not strictly increasing");
      }
    }
  }
  stream_ = merge_lists(deaths_, arrows_, selective_);
  for (std::size_t k = 1; k < stream_.size(); ++k)
    if (stream_[k - 1].time == stream_[k].time)
      throw std::invalid_argument("duplicate event time in system");
}

AugmentedHarrisSystem::AugmentedHarrisSystem(LatticeWindow window, Rates rates,
                                             std::uint64_t seed, bool truncated)
    : window_(std::move(window)),
      rates_(rates),
      seed_(seed),
      truncated_(truncated),
      deaths_(window_.num_sites()),
      arrows_(window_.num_edges()),
      selective_(window_.num_edges()) {}

AugmentedHarrisSystem AugmentedHarrisSystem::from_events(
    LatticeWindow window, Rates rates, std::uint64_t seed, bool truncated,
    std::vector<Event> stream) {
  AugmentedHarrisSystem h(std::move(window), rates, seed, truncated);
  const Time th = h.window_.horizon();
  const auto n_sites = h.deaths_.size();
  const auto n_edges = h.arrows_.size();
  for (std::size_t k = 0; k < stream.size(); ++k) {
    const Event& ev = stream[k];
    if (!(ev.time >= 0.0 && ev.time <= th))
      throw std::invalid_argument("event time outside [0, horizon]");
    if (k > 0 && !(stream[k - 1].time < ev.time))
      throw std::invalid_argument("event stream not strictly increasing");
    auto i = static_cast<std::size_t>(ev.index);
    if (ev.index < 0 || i >= (ev.kind == EventKind::death ? n_sites : n_edges))
      throw std::invalid_argument("event index out of range");
    switch (ev.kind) {
      case EventKind::death: h.deaths_[i].push_back(ev.time); break;
      case EventKind::arrow: h.arrows_[i].push_back(ev.time); break;
      case EventKind::selective: h.selective_[i].push_back(ev.time); break;
    }
  }
  h.stream_ = std::move(stream);
  return h;
}

std::span<const Time> AugmentedHarrisSystem::deaths(SiteIndex s) const {
  return deaths_.at(static_cast<std::size_t>(s));
}

std::span<const Time> AugmentedHarrisSystem::arrows(EdgeIndex e) const {
  return arrows_.at(static_cast<std::size_t>(e));
}

std::span<const Time> AugmentedHarrisSystem::selective(EdgeIndex e) const {
  return selective_.at(static_cast<std::size_t>(e));
}

std::span<const Time> AugmentedHarrisSystem::list(EventKind kind,
                                                  std::int32_t index) const {
  switch (kind) {
    case EventKind::death: return deaths(index);
    case EventKind::arrow: return arrows(index);
    case EventKind::selective: return selective(index);
  }
  return {};
}

std::size_t AugmentedHarrisSystem::first_at_or_after(Time t) const {
  auto it = std::lower_bound(
      stream_.begin(), stream_.end(), t,
      [](const Event& e, Time v) { return e.time < v; });
  return static_cast<std::size_t>(it - stream_.begin());
}

std::size_t AugmentedHarrisSystem::first_after(Time t) const {
  auto it = std::upper_bound(
      stream_.begin(), stream_.end(), t,
      [](Time v, const Event& e) { return v < e.time; });
  return static_cast<std::size_t>(it - stream_.begin());
}

std::size_t AugmentedHarrisSystem::count(EventKind kind) const {
  std::size_t n = 0;
  const auto& group = kind == EventKind::death   ? deaths_
                      : kind == EventKind::arrow ? arrows_
                                                 : selective_;
  for (const auto& l : group) n += l.size();
  return n;
}

bool AugmentedHarrisSystem::has_event_at(EventKind kind, std::int32_t index,
                                         Time t) const {
  auto l = list(kind, index);
  return std::binary_search(l.begin(), l.end(), t);
}

bool AugmentedHarrisSystem::death_in(SiteIndex s, Time a, Time b) const {
  if (a > b) return false;
  auto l = deaths(s);
  auto it = std::lower_bound(l.begin(), l.end(), a);
  return it != l.end() && *it <= b;
}

bool AugmentedHarrisSystem::operator==(const AugmentedHarrisSystem& o) const {
  return window_ == o.window_ && rates_.lambda1 == o.rates_.lambda1 &&
         rates_.lambda2 == o.rates_.lambda2 && seed_ == o.seed_ &&
         deaths_ == o.deaths_ && arrows_ == o.arrows_ &&
         selective_ == o.selective_;
}

HarrisStream::HarrisStream(const LatticeWindow& window, Rates rates,
                           std::uint64_t seed, SampleOptions options)
    : rng_(seed) {
  check_rates(rates, options.allow_equal_rates);
  horizon_ = window.horizon();
  if (horizon_ > kMaxHorizon)
    throw std::invalid_argument("horizon exceeds the supported maximum 2^20");
  n_sites_ = static_cast<double>(window.num_sites());
  n_edges_ = static_cast<double>(window.num_edges());
  lambda2_ = rates.lambda2;
  sel_rate_ = rates.lambda1 - rates.lambda2;
  r_death_ = n_sites_;
  r_arrow_ = n_edges_ * rates.lambda2;
  total_ = r_death_ + r_arrow_ + n_edges_ * sel_rate_;
}

// Superposition: one Poisson clock of the total rate, each event assigned to
// a process with probability proportional to its rate. Each list is then an
// independent Poisson process of its own rate.
bool HarrisStream::next(Event& out) {
  if (done_) return false;
  Time next;
  do next = quantize(t_ + exponential(rng_, total_));
  while (next == t_);  // a gap below the grid resolution is re-drawn
  if (next >= horizon_) {
    done_ = true;
    return false;
  }
  t_ = next;
  double v = uniform01(rng_) * total_;
  if (v < r_death_) {
    auto s = std::min(static_cast<std::int32_t>(v),
                      static_cast<std::int32_t>(n_sites_) - 1);
    out = {t_, s, EventKind::death};
  } else if (v - r_death_ < r_arrow_) {
    auto e = std::min(static_cast<std::int32_t>((v - r_death_) / lambda2_),
                      static_cast<std::int32_t>(n_edges_) - 1);
    out = {t_, e, EventKind::arrow};
  } else {
    double w = (v - r_death_ - r_arrow_) / sel_rate_;
    auto e = std::min(static_cast<std::int32_t>(w),
                      static_cast<std::int32_t>(n_edges_) - 1);
    out = {t_, e, EventKind::selective};
  }
  return true;
}

AugmentedHarrisSystem sample_harris(const LatticeWindow& window, Rates rates,
                                    std::uint64_t seed, SampleOptions options) {
  HarrisStream src(window, rates, seed, options);
  std::vector<Event> stream;
  stream.reserve(static_cast<std::size_t>(src.total_rate() * window.horizon() * 1.05) + 16);
  Event e;
  while (src.next(e)) stream.push_back(e);
  return from_stream(window, rates, seed, false, std::move(stream));
}

AugmentedHarrisSystem restrict_to(const AugmentedHarrisSystem& h, Time a,
                                  Time b, bool rebase) {
  if (!(a >= 0.0) || !(b <= h.horizon()) || a > b)
    throw std::invalid_argument("restrict: need 0 <= a <= b <= horizon");
  std::vector<Event> out;
  auto ev = h.events();
  for (std::size_t k = h.first_at_or_after(a); k < ev.size(); ++k) {
    if (ev[k].time > b) break;
    Event e = ev[k];
    if (rebase) e.time -= a;
    out.push_back(e);
  }
  LatticeWindow w = rebase ? h.window().with_horizon(b - a) : h.window();
  return from_stream(w, h.rates(), h.seed(), h.truncated(), std::move(out));
}

AugmentedHarrisSystem shift(const AugmentedHarrisSystem& h,
                            std::span<const int> x0, Time t0) {
  const LatticeWindow& w = h.window();
  if (!(t0 >= 0.0) || !(t0 <= h.horizon()))
    throw std::invalid_argument("shift: t0 outside [0, horizon]");
  if (static_cast<int>(x0.size()) != w.dim())
    throw std::invalid_argument("shift: offset dimension mismatch");

  // Input site x0 + x becomes output site x.
  std::vector<int> neg(x0.begin(), x0.end());
  for (int& v : neg) v = -v;
  const auto n_sites = w.num_sites();
  std::vector<SiteIndex> site_map(n_sites, -1);
  bool clipped = false;
  for (std::size_t s = 0; s < n_sites; ++s) {
    auto out = w.translate(static_cast<SiteIndex>(s), neg);
    if (out) site_map[s] = *out;
  }
  for (std::size_t s = 0; s < n_sites; ++s)
    if (!w.translate(static_cast<SiteIndex>(s), x0)) clipped = true;
  std::vector<EdgeIndex> edge_map(w.num_edges(), -1);
  for (std::size_t e = 0; e < w.num_edges(); ++e) {
    auto a = site_map[static_cast<std::size_t>(w.edge_from(static_cast<EdgeIndex>(e)))];
    auto b = site_map[static_cast<std::size_t>(w.edge_to(static_cast<EdgeIndex>(e)))];
    if (a >= 0 && b >= 0) edge_map[e] = *w.find_edge(a, b);
  }

  std::vector<Event> out;
  auto ev = h.events();
  for (std::size_t k = h.first_at_or_after(t0); k < ev.size(); ++k) {
    Event e = ev[k];
    auto i = static_cast<std::size_t>(e.index);
    e.index = e.kind == EventKind::death ? site_map[i] : edge_map[i];
    if (e.index < 0) continue;
    e.time -= t0;
    out.push_back(e);
  }
  return from_stream(w.with_horizon(h.horizon() - t0), h.rates(), h.seed(),
                     h.truncated() || clipped, std::move(out));
}

AugmentedHarrisSystem reverse(const AugmentedHarrisSystem& h, Time u) {
  if (!(u >= 0.0) || !(u <= h.horizon()))
    throw std::invalid_argument("reverse: need 0 <= u <= horizon");
  const LatticeWindow& w = h.window();
  std::vector<EdgeIndex> back(w.num_edges());
  for (std::size_t e = 0; e < w.num_edges(); ++e)
    back[e] = *w.find_edge(w.edge_to(static_cast<EdgeIndex>(e)),
                           w.edge_from(static_cast<EdgeIndex>(e)));
  std::vector<Event> out;
  auto ev = h.events();
  std::size_t end = h.first_after(u);
  out.reserve(end);
  for (std::size_t k = end; k-- > 0;) {
    Event e = ev[k];
    e.time = u - e.time;
    if (e.kind != EventKind::death)
      e.index = back[static_cast<std::size_t>(e.index)];
    out.push_back(e);
  }
  return from_stream(w.with_horizon(u), h.rates(), h.seed(), h.truncated(),
                     std::move(out));
}

Coord psi(std::span<const int> x, int i, int kappa) {
  const int d = static_cast<int>(x.size());
  if (i < 1 || i > d) throw std::out_of_range("psi: axis out of range");
  if (kappa != 1 && kappa != -1)
    throw std::invalid_argument("psi: kappa must be +1 or -1");
  Coord y(x.begin(), x.end());
  const auto a = static_cast<std::size_t>(i - 1);
  y[0] = kappa * x[a];
  y[a] = kappa * x[0];
  return y;
}

SiteIndex psi_site(const LatticeWindow& w, SiteIndex s, int i, int kappa) {
  return w.index(psi(w.coord(s), i, kappa));
}

AugmentedHarrisSystem reflect_psi(const AugmentedHarrisSystem& h, int i,
                                  int kappa) {
  const LatticeWindow& w = h.window();
  if (i < 1 || i > w.dim()) throw std::out_of_range("reflect_psi: i out of range");
  std::vector<SiteIndex> site_map(w.num_sites());
  for (std::size_t s = 0; s < site_map.size(); ++s)
    site_map[s] = psi_site(w, static_cast<SiteIndex>(s), i, kappa);
  std::vector<EdgeIndex> edge_map(w.num_edges());
  for (std::size_t e = 0; e < edge_map.size(); ++e) {
    auto a = site_map[static_cast<std::size_t>(w.edge_from(static_cast<EdgeIndex>(e)))];
    auto b = site_map[static_cast<std::size_t>(w.edge_to(static_cast<EdgeIndex>(e)))];
    edge_map[e] = *w.find_edge(a, b);
  }
  std::vector<Event> out(h.events().begin(), h.events().end());
  for (Event& e : out) {
    auto k = static_cast<std::size_t>(e.index);
    e.index = e.kind == EventKind::death ? site_map[k] : edge_map[k];
  }
  return from_stream(w, h.rates(), h.seed(), h.truncated(), std::move(out));
}

AugmentedHarrisSystem thin_selective(const AugmentedHarrisSystem& h,
                                     double keep, std::uint64_t seed) {
  if (!(keep >= 0.0 && keep <= 1.0))
    throw std::invalid_argument("thin_selective: keep must be in [0, 1]");
  Engine rng(seed);
  std::vector<Event> out;
  for (const Event& e : h.events()) {
    if (e.kind == EventKind::selective && !(uniform01(rng) < keep)) continue;
    out.push_back(e);
  }
  Rates r = h.rates();
  r.lambda1 = r.lambda2 + keep * (r.lambda1 - r.lambda2);
  return from_stream(h.window(), r, h.seed(), h.truncated(), std::move(out));
}

std::vector<Time> events_in(const AugmentedHarrisSystem& h,
                            std::span<const int> site, Time a, Time b) {
  auto s = h.window().find(site);
  if (!s) throw std::out_of_range("events_in: unknown site");
  return slice(h.deaths(*s), a, b);
}

std::vector<Time> events_in(const AugmentedHarrisSystem& h,
                            std::span<const int> from, std::span<const int> to,
                            EventKind kind, Time a, Time b) {
  const auto& w = h.window();
  auto x = w.find(from);
  auto y = w.find(to);
  if (!x || !y) throw std::out_of_range("events_in: unknown site");
  auto e = w.find_edge(*x, *y);
  if (!e || kind == EventKind::death)
    throw std::out_of_range("events_in: unknown edge");
  return slice(h.list(kind, *e), a, b);
}

std::string to_json(const AugmentedHarrisSystem& h, int indent) {
  const auto& w = h.window();
  json j;
  j["type"] = "augmented_harris_system";
  j["version"] = 1;
  j["window"] = {{"dim", w.dim()},
                 {"radius", w.radius()},
                 {"range", w.range()},
                 {"horizon", w.horizon()}};
  j["rates"] = {{"lambda1", h.rates().lambda1}, {"lambda2", h.rates().lambda2}};
  j["seed"] = h.seed();
  j["truncated"] = h.truncated();
  json deaths = json::array();
  for (std::size_t s = 0; s < w.num_sites(); ++s) {
    auto l = h.deaths(static_cast<SiteIndex>(s));
    if (l.empty()) continue;
    deaths.push_back({{"site", w.coord_vec(static_cast<SiteIndex>(s))},
                      {"times", std::vector<Time>(l.begin(), l.end())}});
  }
  j["deaths"] = std::move(deaths);
  for (EventKind kind : {EventKind::arrow, EventKind::selective}) {
    json arr = json::array();
    for (std::size_t e = 0; e < w.num_edges(); ++e) {
      auto l = h.list(kind, static_cast<EdgeIndex>(e));
      if (l.empty()) continue;
      arr.push_back(
          {{"from", w.coord_vec(w.edge_from(static_cast<EdgeIndex>(e)))},
           {"to", w.coord_vec(w.edge_to(static_cast<EdgeIndex>(e)))},
           {"times", std::vector<Time>(l.begin(), l.end())}});
    }
    j[kind == EventKind::arrow ? "arrows" : "selective_arrows"] = std::move(arr);
  }
  return j.dump(indent);
}

AugmentedHarrisSystem harris_from_json(std::string_view text) {
  json j = json::parse(text);
  if (j.value("type", "") != "augmented_harris_system")
    throw std::invalid_argument("not a serialized augmented Harris system");
  const auto& jw = j.at("window");
  LatticeWindow w(jw.at("dim").get<int>(), jw.at("radius").get<int>(),
                  jw.at("range").get<int>(), jw.at("horizon").get<double>());
  Rates r{j.at("rates").at("lambda1").get<double>(),
          j.at("rates").at("lambda2").get<double>()};
  std::vector<TimeList> deaths(w.num_sites()), arrows(w.num_edges()),
      selective(w.num_edges());
  for (const auto& d : j.at("deaths")) {
    auto site = d.at("site").get<std::vector<int>>();
    deaths[static_cast<std::size_t>(w.index(site))] =
        d.at("times").get<TimeList>();
  }
  auto read_edges = [&](const char* key, std::vector<TimeList>& out) {
    for (const auto& a : j.at(key)) {
      auto from = a.at("from").get<std::vector<int>>();
      auto to = a.at("to").get<std::vector<int>>();
      auto e = w.find_edge(w.index(from), w.index(to));
      if (!e) throw std::invalid_argument("serialized edge not in window");
      out[static_cast<std::size_t>(*e)] = a.at("times").get<TimeList>();
    }
  };
  read_edges("arrows", arrows);
  read_edges("selective_arrows", selective);
  return AugmentedHarrisSystem(w, r, j.at("seed").get<std::uint64_t>(),
                               std::move(deaths), std::move(arrows),
                               std::move(selective),
                               j.value("truncated", false));
}

HarrisBuilder::HarrisBuilder(LatticeWindow window, Rates rates,
                             std::uint64_t seed)
    : window_(std::move(window)),
      rates_(rates),
      seed_(seed),
      deaths_(window_.num_sites()),
      arrows_(window_.num_edges()),
      selective_(window_.num_edges()) {}

EdgeIndex HarrisBuilder::edge(std::span<const int> x,
                              std::span<const int> y) const {
  auto e = window_.find_edge(window_.index(x), window_.index(y));
  if (!e) throw std::invalid_argument("builder: no such edge in window");
  return *e;
}

HarrisBuilder& HarrisBuilder::death(std::span<const int> x, Time t) {
  deaths_[static_cast<std::size_t>(window_.index(x))].push_back(t);
  return *this;
}

HarrisBuilder& HarrisBuilder::arrow(std::span<const int> x,
                                    std::span<const int> y, Time t) {
  arrows_[static_cast<std::size_t>(edge(x, y))].push_back(t);
  return *this;
}

HarrisBuilder& HarrisBuilder::selective(std::span<const int> x,
                                        std::span<const int> y, Time t) {
  selective_[static_cast<std::size_t>(edge(x, y))].push_back(t);
  return *this;
}

HarrisBuilder& HarrisBuilder::erase(EventKind kind, std::int32_t index, Time a,
                                    Time b) {
  auto& group = kind == EventKind::death   ? deaths_
                : kind == EventKind::arrow ? arrows_
                                           : selective_;
  auto& l = group.at(static_cast<std::size_t>(index));
  l.erase(std::remove_if(l.begin(), l.end(),
                         [a, b](Time t) { return t >= a && t <= b; }),
          l.end());
  return *this;
}

AugmentedHarrisSystem HarrisBuilder::build() const {
  auto sorted = [](std::vector<TimeList> g) {
    for (auto& l : g) std::sort(l.begin(), l.end());
    return g;
  };
  return AugmentedHarrisSystem(window_, rates_, seed_, sorted(deaths_),
                               sorted(arrows_), sorted(selective_));
}

HarrisBuilder HarrisBuilder::from(const AugmentedHarrisSystem& h) {
  HarrisBuilder b(h.window(), h.rates(), h.seed());
  const auto& w = h.window();
  for (std::size_t s = 0; s < w.num_sites(); ++s) {
    auto l = h.deaths(static_cast<SiteIndex>(s));
    b.deaths_[s].assign(l.begin(), l.end());
  }
  for (std::size_t e = 0; e < w.num_edges(); ++e) {
    auto a = h.arrows(static_cast<EdgeIndex>(e));
    b.arrows_[e].assign(a.begin(), a.end());
    auto c = h.selective(static_cast<EdgeIndex>(e));
    b.selective_[e].assign(c.begin(), c.end());
  }
  return b;
}

}  // namespace mtcp
