#include "mtcp/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace mtcp {

namespace {

bool usable(EventKind kind, PathMode mode) {
  return kind == EventKind::arrow ||
         (kind == EventKind::selective && mode == PathMode::sip);
}

}  // namespace

SiteIndex InfectionPath::at(Time t) const {
  SiteIndex x = start;
  for (const Jump& j : jumps) {
    if (j.time > t) break;
    x = j.to;
  }
  return x;
}

SiteIndex InfectionPath::before(Time t) const {
  SiteIndex x = start;
  for (const Jump& j : jumps) {
    if (j.time >= t) break;
    x = j.to;
  }
  return x;
}

InfectionPath constant_path(SiteIndex x, Time t1, Time t2) {
  return InfectionPath{t1, t2, x, {}};
}

std::vector<SiteIndex> all_sites(const LatticeWindow& w) {
  std::vector<SiteIndex> v(w.num_sites());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

void validate_path(const LatticeWindow& w, const InfectionPath& p) {
  const auto n = static_cast<SiteIndex>(w.num_sites());
  if (!(p.t1 <= p.t2)) throw std::invalid_argument("path: t1 > t2");
  if (p.start < 0 || p.start >= n)
    throw std::invalid_argument("path: start site outside window");
  SiteIndex cur = p.start;
  Time last = p.t1;
  for (const Jump& j : p.jumps) {
    if (!(j.time > last) || j.time > p.t2)
      throw std::invalid_argument("path: jump times must increase inside (t1, t2]");
    if (j.from != cur) throw std::invalid_argument("path: jumps do not chain");
    if (j.to < 0 || j.to >= n)
      throw std::invalid_argument("path: jump leaves the window");
    int d = l1_distance(w.coord(j.from), w.coord(j.to));
    if (d <= 0 || d > w.range())
      throw std::invalid_argument("path: jump distance outside (0, R]");
    cur = j.to;
    last = j.time;
  }
}

// ---------------------------------------------------------------------------

ForwardReach::ForwardReach(const AugmentedHarrisSystem& h, PathMode mode,
                           std::span<const SiteIndex> sources, Time s,
                           bool open_start, bool track)
    : h_(&h),
      mode_(mode),
      s_(s),
      track_(track),
      in_(h.window().num_sites(), 0),
      label_(h.window().num_sites(), -1),
      cur_(h.window().num_sites(), -1) {
  for (SiteIndex x : sources) {
    auto i = static_cast<std::size_t>(x);
    if (!in_.at(i)) {
      in_[i] = 1;
      ++size_;
      label_[i] = x;
    } else {
      label_[i] = std::min(label_[i], x);
    }
  }
  auto ev = h.events();
  next_ = h.first_at_or_after(s);
  while (next_ < ev.size() && ev[next_].time == s) {
    if (!open_start && ev[next_].kind == EventKind::death) apply(ev[next_]);
    ++next_;
  }
}

ForwardReach ForwardReach::level(const AugmentedHarrisSystem& h,
                                 PathMode mode, Time s, bool track) {
  auto sites = all_sites(h.window());
  return ForwardReach(h, mode, sites, s, false, track);
}

void ForwardReach::apply(const Event& ev) {
  if (ev.kind == EventKind::death) {
    auto i = static_cast<std::size_t>(ev.index);
    if (in_[i]) {
      in_[i] = 0;
      --size_;
    }
    return;
  }
  if (!usable(ev.kind, mode_)) return;
  const auto& w = h_->window();
  auto x = static_cast<std::size_t>(w.edge_from(ev.index));
  auto y = static_cast<std::size_t>(w.edge_to(ev.index));
  if (!in_[x]) return;
  if (!in_[y]) {
    in_[y] = 1;
    ++size_;
    label_[y] = label_[x];
    if (track_) {
      entries_.push_back({ev.time, static_cast<SiteIndex>(x), cur_[x]});
      cur_[y] = static_cast<std::int64_t>(entries_.size()) - 1;
    }
  } else if (label_[x] < label_[y]) {
    label_[y] = label_[x];
  }
}

void ForwardReach::advance_to(Time t) {
  auto ev = h_->events();
  while (next_ < ev.size() && ev[next_].time <= t) apply(ev[next_++]);
}

void ForwardReach::advance_before(Time t) {
  auto ev = h_->events();
  while (next_ < ev.size() && ev[next_].time < t) apply(ev[next_++]);
}

InfectionPath ForwardReach::witness(SiteIndex x, Time t) const {
  if (!track_) throw std::logic_error("witness needs a tracking sweep");
  if (!contains(x)) throw std::logic_error("witness: site not reachable");
  InfectionPath p{s_, t, x, {}};
  SiteIndex site = x;
  for (std::int64_t e = cur_[static_cast<std::size_t>(x)]; e >= 0;) {
    const Entry& en = entries_[static_cast<std::size_t>(e)];
    p.jumps.push_back({en.time, en.from, site});
    site = en.from;
    e = en.parent;
  }
  p.start = site;
  std::reverse(p.jumps.begin(), p.jumps.end());
  return p;
}

// ---------------------------------------------------------------------------

BackwardReach::BackwardReach(const AugmentedHarrisSystem& h, PathMode mode,
                             Time top, bool track)
    : h_(&h),
      mode_(mode),
      top_(top),
      track_(track),
      next_(h.first_after(top)),
      in_(h.window().num_sites(), 1),
      size_(h.window().num_sites()),
      cur_(h.window().num_sites(), -1) {}

void BackwardReach::retreat_after(Time s) {
  auto ev = h_->events();
  const auto& w = h_->window();
  while (next_ > 0 && ev[next_ - 1].time > s) {
    const Event& e = ev[--next_];
    if (e.kind == EventKind::death) {
      auto i = static_cast<std::size_t>(e.index);
      if (in_[i]) {
        in_[i] = 0;
        --size_;
      }
      continue;
    }
    if (!usable(e.kind, mode_)) continue;
    auto x = static_cast<std::size_t>(w.edge_from(e.index));
    auto y = static_cast<std::size_t>(w.edge_to(e.index));
    if (in_[y] && !in_[x]) {
      in_[x] = 1;
      ++size_;
      if (track_) {
        entries_.push_back({e.time, static_cast<SiteIndex>(y), cur_[y]});
        cur_[x] = static_cast<std::int64_t>(entries_.size()) - 1;
      }
    }
  }
}

bool BackwardReach::contains_closed(SiteIndex x, Time s) const {
  return contains(x) && !h_->has_event_at(EventKind::death, x, s);
}

InfectionPath BackwardReach::witness(SiteIndex x, Time s) const {
  if (!track_) throw std::logic_error("witness needs a tracking sweep");
  if (!contains(x)) throw std::logic_error("witness: site does not reach top");
  InfectionPath p{s, top_, x, {}};
  SiteIndex site = x;
  for (std::int64_t e = cur_[static_cast<std::size_t>(x)]; e >= 0;) {
    const Entry& en = entries_[static_cast<std::size_t>(e)];
    p.jumps.push_back({en.time, site, en.to});
    site = en.to;
    e = en.parent;
  }
  return p;
}

// ---------------------------------------------------------------------------

Reachability reachable(const AugmentedHarrisSystem& h,
                       std::span<const SiteIndex> sources, Time s,
                       std::span<const SiteIndex> targets, Time t,
                       PathMode mode) {
  if (!(s <= t)) throw std::invalid_argument("reachable: source after target");
  if (s < 0.0 || t > h.horizon())
    throw std::invalid_argument("reachable: times outside [0, horizon]");
  Reachability r;
  if (s == t) {
    // (x, s) ~> (x, s) by convention.
    for (SiteIndex y : targets)
      if (std::find(sources.begin(), sources.end(), y) != sources.end()) {
        r.reachable = true;
        r.witness = constant_path(y, s, t);
        return r;
      }
    return r;
  }
  ForwardReach fr(h, mode, sources, s, false, true);
  fr.advance_to(t);
  for (SiteIndex y : targets) {
    if (fr.contains(y)) {
      r.reachable = true;
      r.witness = fr.witness(y, t);
      return r;
    }
  }
  return r;
}

Reachability reachable(const AugmentedHarrisSystem& h, SiteIndex x, Time s,
                       SiteIndex y, Time t, PathMode mode) {
  SiteIndex a[1] = {x};
  SiteIndex b[1] = {y};
  return reachable(h, a, s, b, t, mode);
}

bool reaches_level(const AugmentedHarrisSystem& h, SiteIndex x, Time s, Time t,
                   PathMode mode) {
  if (!(s <= t)) throw std::invalid_argument("reaches_level: s > t");
  SiteIndex a[1] = {x};
  ForwardReach fr(h, mode, a, s);
  fr.advance_to(t);
  return fr.size() > 0;
}

DeathTime death_time(const AugmentedHarrisSystem& h,
                     std::span<const SiteIndex> lambda, Time s) {
  if (lambda.empty()) throw std::invalid_argument("death_time: empty set");
  ForwardReach fr(h, PathMode::bip, lambda, s);
  if (fr.size() == 0) return {s, false};
  auto ev = h.events();
  for (std::size_t k = fr.next_event(); k < ev.size(); ++k) {
    fr.advance_to(ev[k].time);
    if (fr.size() == 0) return {ev[k].time, false};
  }
  return {h.horizon(), true};
}

// ---------------------------------------------------------------------------

PathClass classify(const AugmentedHarrisSystem& h, const InfectionPath& p,
                   Time epoch) {
  return classify(h, p, epoch, p.t2);
}

namespace {

void check_classify_args(const AugmentedHarrisSystem& h, const InfectionPath& p,
                         Time epoch, Time top) {
  validate_path(h.window(), p);
  if (p.t1 < 0.0 || p.t2 > h.horizon())
    throw std::invalid_argument("classify: path outside [0, horizon]");
  if (!(epoch <= p.t1) || !(top >= p.t2) || top > h.horizon())
    throw std::invalid_argument("classify: need epoch <= t1 <= t2 <= top");
}

// Death-mark avoidance on each constant piece and arrow justification.
void classify_pieces(const AugmentedHarrisSystem& h, const InfectionPath& p,
                     PathClass& c) {
  const auto& w = h.window();
  SiteIndex cur = p.start;
  Time from = p.t1;
  bool ok = true;
  bool basic = true;
  for (const Jump& j : p.jumps) {
    if (h.death_in(cur, from, j.time)) ok = false;
    auto e = *w.find_edge(j.from, j.to);
    if (h.has_event_at(EventKind::arrow, e, j.time)) {
    } else if (h.has_event_at(EventKind::selective, e, j.time)) {
      basic = false;
    } else {
      ok = false;
    }
    cur = j.to;
    from = j.time;
  }
  if (h.death_in(cur, from, p.t2)) ok = false;
  c.is_sip = ok;
  c.is_bip = ok && basic;
}

void finish(PathClass& c, bool free, bool rfree) {
  c.is_fsip = free;
  c.is_fbip = free && c.is_bip;
  c.is_rfsip = rfree;
  c.is_rfbip = rfree && c.is_bip;
}

}  // namespace

PathClass classify(const AugmentedHarrisSystem& h, const InfectionPath& p,
                   Time epoch, Time top) {
  check_classify_args(h, p, epoch, top);
  PathClass c;
  c.epoch = epoch;
  c.top = top;
  classify_pieces(h, p, c);
  if (!c.is_sip) return c;

  bool free = true;
  ForwardReach fr = ForwardReach::level(h, PathMode::bip, epoch);
  for (const Jump& j : p.jumps) {
    fr.advance_before(j.time);
    if (fr.contains(j.to)) {
      free = false;
      break;
    }
  }
  bool rfree = true;
  BackwardReach br(h, PathMode::bip, top);
  for (auto it = p.jumps.rbegin(); it != p.jumps.rend(); ++it) {
    br.retreat_after(it->time);
    if (br.contains(it->from)) {
      rfree = false;
      break;
    }
  }
  finish(c, free, rfree);
  return c;
}

PathClassifier::PathClassifier(const AugmentedHarrisSystem& h, Time epoch,
                               Time top)
    : h_(&h), epoch_(epoch), top_(top) {
  if (!(epoch <= top) || top > h.horizon())
    throw std::invalid_argument("PathClassifier: need epoch <= top <= horizon");
  const std::size_t n = h.window().num_sites();
  auto ev = h.events();
  fwd_.resize(n);
  bwd_.resize(n);

  ForwardReach fr = ForwardReach::level(h, PathMode::bip, epoch);
  fwd0_.assign(fr.members().begin(), fr.members().end());
  std::vector<char> last = fwd0_;
  for (std::size_t i = fr.next_event(); i < ev.size() && ev[i].time <= top;) {
    Time tau = ev[i].time;
    while (i < ev.size() && ev[i].time == tau) ++i;
    fr.advance_to(tau);
    for (std::size_t x = 0; x < n; ++x)
      if (fr.members()[x] != last[x]) {
        last[x] = fr.members()[x];
        fwd_[x].push_back({tau, last[x]});
      }
  }

  // Change times are recorded descending, then flipped.
  BackwardReach br(h, PathMode::bip, top);
  std::vector<char> in(n, 1);
  std::size_t i = h.first_after(top);
  while (i > 0) {
    Time tau = ev[i - 1].time;
    while (i > 0 && ev[i - 1].time == tau) --i;
    br.retreat_after(std::nextafter(tau, -std::numeric_limits<Time>::infinity()));
    for (std::size_t x = 0; x < n; ++x) {
      char now = br.contains(static_cast<SiteIndex>(x));
      if (now != in[x]) {
        in[x] = now;
        bwd_[x].push_back({tau, now});
      }
    }
  }
  for (auto& v : bwd_) std::reverse(v.begin(), v.end());

  const auto& w = h.window();
  times_.reserve(ev.size());
  flags_.reserve(ev.size());
  for (const Event& e : ev) {
    times_.push_back(e.time);
    EventFlags f{e.kind, -1, -1, 0, 0};
    if (e.kind != EventKind::death) {
      f.from = w.edge_from(e.index);
      f.to = w.edge_to(e.index);
      f.fwd = forward_before(f.to, e.time);
      f.bwd = backward_after(f.from, e.time);
    }
    flags_.push_back(f);
  }
}

bool PathClassifier::forward_before(SiteIndex x, Time s) const {
  const auto& v = fwd_[static_cast<std::size_t>(x)];
  auto it = std::lower_bound(v.begin(), v.end(), s,
                             [](const Change& c, Time t) { return c.time < t; });
  return it == v.begin() ? fwd0_[static_cast<std::size_t>(x)] : std::prev(it)->in;
}

bool PathClassifier::backward_after(SiteIndex x, Time s) const {
  const auto& v = bwd_[static_cast<std::size_t>(x)];
  auto it = std::upper_bound(v.begin(), v.end(), s,
                             [](Time t, const Change& c) { return t < c.time; });
  return it == v.end() || it->in;
}

// Branch-free lower bound over the event times.
std::size_t PathClassifier::first_not_before(Time t) const {
  const Time* base = times_.data();
  std::size_t len = times_.size();
  if (len == 0) return 0;
  while (len > 1) {
    std::size_t half = len / 2;
    base = base[half - 1] < t ? base + half : base;
    len -= half;
  }
  return static_cast<std::size_t>(base - times_.data()) + (*base < t);
}

PathClass PathClassifier::slow(const InfectionPath& p) const {
  check_classify_args(*h_, p, epoch_, top_);
  PathClass c;
  c.epoch = epoch_;
  c.top = top_;
  classify_pieces(*h_, p, c);
  if (!c.is_sip) return c;
  bool free = true, rfree = true;
  for (const Jump& j : p.jumps) {
    free = free && !forward_before(j.to, j.time);
    rfree = rfree && !backward_after(j.from, j.time);
  }
  finish(c, free, rfree);
  return c;
}

// Unit i < J checks jump i with the constant piece before it, unit J the
// last piece. Returns false for anything slow() has to look at.
bool PathClassifier::unit(const InfectionPath& p, std::size_t i, Unit& u) const {
  const auto& h = *h_;
  const auto n = static_cast<SiteIndex>(h.window().num_sites());
  const std::size_t J = p.jumps.size();
  SiteIndex cur = i == 0 ? p.start : p.jumps[i - 1].to;
  Time last = i == 0 ? p.t1 : p.jumps[i - 1].time;
  if (i == J) {
    u = {!h.death_in(cur, last, p.t2), true, true, true};
    return true;
  }
  const Jump& j = p.jumps[i];
  if (!(j.time > last) || j.time > p.t2 || j.from != cur || j.to < 0 || j.to >= n)
    return false;
  const std::size_t m = times_.size();
  std::size_t hit = m;
  for (std::size_t k = first_not_before(j.time); k < m && times_[k] == j.time; ++k) {
    const EventFlags& f = flags_[k];
    if (f.kind == EventKind::death || f.from != j.from || f.to != j.to) continue;
    if (hit == m || f.kind == EventKind::arrow) hit = k;
  }
  if (hit == m) return false;
  const EventFlags& f = flags_[hit];
  u = {!h.death_in(cur, last, j.time), f.kind == EventKind::arrow, !f.fwd, !f.bwd};
  return true;
}

PathClass PathClassifier::operator()(const InfectionPath& p) const {
  const auto& h = *h_;
  const auto n = static_cast<SiteIndex>(h.window().num_sites());
  if (!(p.t1 <= p.t2) || p.start < 0 || p.start >= n || p.t1 < 0.0 ||
      p.t2 > h.horizon() || !(epoch_ <= p.t1) || !(top_ >= p.t2))
    return slow(p);
  const std::size_t J = p.jumps.size();
  // Units shared with the previous call: a common prefix (same start) or a
  // common non-empty run of last jumps.
  std::size_t pre = 0, suf = 0;
  const auto& q = last_path_;
  const std::size_t Jq = q.jumps.size();
  if (last_ok_ && q.t1 == p.t1 && q.t2 == p.t2) {
    if (q.start == p.start)
      while (pre < std::min(J, Jq) && q.jumps[pre] == p.jumps[pre]) ++pre;
    while (suf < std::min(J, Jq) && q.jumps[Jq - 1 - suf] == p.jumps[J - 1 - suf]) ++suf;
  }
  auto& next = spare_;
  next.resize(J + 1);
  for (std::size_t i = 0; i <= J; ++i) {
    if (i < pre) {
      next[i] = units_[i];
    } else if (suf > 0 && i > J - suf) {
      next[i] = units_[i + Jq - J];
    } else if (!unit(p, i, next[i])) {
      last_ok_ = false;
      return slow(p);
    }
  }
  std::swap(units_, spare_);
  last_path_ = p;
  last_ok_ = true;

  PathClass c;
  c.epoch = epoch_;
  c.top = top_;
  bool ok = true, basic = true, free = true, rfree = true;
  for (const Unit& u : units_) {
    ok = ok && u.ok;
    basic = basic && u.basic;
    free = free && u.free;
    rfree = rfree && u.rfree;
  }
  if (!ok) return c;
  c.is_sip = true;
  c.is_bip = basic;
  finish(c, free, rfree);
  return c;
}

// ---------------------------------------------------------------------------

namespace {

// Lexicographically first BIP from Z^d x {s} to (x, t) or (x, t-): the
// point-source witness of the smallest source index that reaches it.
std::optional<InfectionPath> first_basic_path(const AugmentedHarrisSystem& h,
                                              Time s, SiteIndex x, Time t,
                                              bool before) {
  ForwardReach lvl = ForwardReach::level(h, PathMode::bip, s);
  before ? lvl.advance_before(t) : lvl.advance_to(t);
  if (!lvl.contains(x)) return std::nullopt;
  SiteIndex src[1] = {lvl.min_source(x)};
  ForwardReach pt(h, PathMode::bip, src, s, false, true);
  before ? pt.advance_before(t) : pt.advance_to(t);
  return pt.witness(x, t);
}

std::size_t events_between(const AugmentedHarrisSystem& h, Time a, Time b) {
  return h.first_after(b) - h.first_at_or_after(a);
}

}  // namespace

std::optional<InfectionPath> find_fbip(const AugmentedHarrisSystem& h, Time s,
                                       SiteIndex x, Time t,
                                       RepairTrace* trace) {
  if (!(s <= t)) throw std::invalid_argument("find_fbip: s > t");
  if (s < 0.0 || t > h.horizon())
    throw std::invalid_argument("find_fbip: times outside [0, horizon]");
  auto start = first_basic_path(h, s, x, t, false);
  if (!start) return std::nullopt;
  InfectionPath g = *start;
  const std::size_t limit = events_between(h, s, t) + 2;
  Time last_r = std::numeric_limits<Time>::infinity();
  for (std::size_t iter = 0;; ++iter) {
    if (iter > limit) throw std::logic_error("find_fbip: repair did not stop");
    // Largest jump time r whose landing point (gamma(r), r-) is already
    // BIP-reachable from the epoch.
    ForwardReach chk = ForwardReach::level(h, PathMode::bip, s);
    std::optional<std::size_t> worst;
    for (std::size_t k = 0; k < g.jumps.size(); ++k) {
      chk.advance_before(g.jumps[k].time);
      if (chk.contains(g.jumps[k].to)) worst = k;
    }
    if (!worst) break;
    const Jump bad = g.jumps[*worst];
    if (!(bad.time < last_r))
      throw std::logic_error("find_fbip: violation times not decreasing");
    last_r = bad.time;
    if (trace) {
      ++trace->iterations;
      trace->violation_times.push_back(bad.time);
    }
    auto splice = first_basic_path(h, s, bad.to, bad.time, true);
    InfectionPath next{s, t, splice->start, splice->jumps};
    next.jumps.insert(next.jumps.end(), g.jumps.begin() + (*worst + 1),
                      g.jumps.end());
    g = std::move(next);
  }
  return g;
}

std::optional<InfectionPath> fbip_direct(const AugmentedHarrisSystem& h,
                                         Time s, SiteIndex x, Time t) {
  if (!(s <= t)) throw std::invalid_argument("fbip_direct: s > t");
  ForwardReach lvl = ForwardReach::level(h, PathMode::bip, s, true);
  lvl.advance_to(t);
  if (!lvl.contains(x)) return std::nullopt;
  return lvl.witness(x, t);
}

namespace {

// Basic path from (x, s) (or (x, s+) when open) to the top level t, ending at
// the smallest reachable site index.
std::optional<InfectionPath> first_path_to_level(const AugmentedHarrisSystem& h,
                                                 SiteIndex x, Time s, Time t,
                                                 bool open) {
  SiteIndex src[1] = {x};
  ForwardReach fr(h, PathMode::bip, src, s, open, true);
  fr.advance_to(t);
  if (fr.size() == 0) return std::nullopt;
  auto m = fr.members();
  auto it = std::find(m.begin(), m.end(), 1);
  return fr.witness(static_cast<SiteIndex>(it - m.begin()), t);
}

}  // namespace

std::optional<InfectionPath> find_rfbip(const AugmentedHarrisSystem& h,
                                        SiteIndex x, Time t1, Time t2,
                                        RepairTrace* trace) {
  if (!(t1 <= t2)) throw std::invalid_argument("find_rfbip: t1 > t2");
  if (t1 < 0.0 || t2 > h.horizon())
    throw std::invalid_argument("find_rfbip: times outside [0, horizon]");
  auto start = first_path_to_level(h, x, t1, t2, false);
  if (!start) return std::nullopt;
  InfectionPath g = *start;
  const std::size_t limit = events_between(h, t1, t2) + 2;
  Time last_s = -std::numeric_limits<Time>::infinity();
  for (std::size_t iter = 0;; ++iter) {
    if (iter > limit) throw std::logic_error("find_rfbip: repair did not stop");
    // Smallest jump time s with (gamma(s-), s+) ~> Z^d x {t2}.
    BackwardReach br(h, PathMode::bip, t2);
    std::optional<std::size_t> worst;
    for (std::size_t k = g.jumps.size(); k-- > 0;) {
      br.retreat_after(g.jumps[k].time);
      if (br.contains(g.jumps[k].from)) worst = k;
    }
    if (!worst) break;
    const Jump bad = g.jumps[*worst];
    if (!(bad.time > last_s))
      throw std::logic_error("find_rfbip: violation times not increasing");
    last_s = bad.time;
    if (trace) {
      ++trace->iterations;
      trace->violation_times.push_back(bad.time);
    }
    auto tail = first_path_to_level(h, bad.from, bad.time, t2, true);
    InfectionPath next{t1, t2, g.start,
                       std::vector<Jump>(g.jumps.begin(),
                                         g.jumps.begin() + *worst)};
    next.jumps.insert(next.jumps.end(), tail->jumps.begin(), tail->jumps.end());
    g = std::move(next);
  }
  return g;
}

std::optional<InfectionPath> rfbip_direct(const AugmentedHarrisSystem& h,
                                          SiteIndex x, Time t1, Time t2) {
  if (!(t1 <= t2)) throw std::invalid_argument("rfbip_direct: t1 > t2");
  BackwardReach br(h, PathMode::bip, t2, true);
  br.retreat_after(t1);
  if (!br.contains_closed(x, t1)) return std::nullopt;
  return br.witness(x, t1);
}

std::optional<InfectionPath> rfbip_via_reversal(const AugmentedHarrisSystem& h,
                                                SiteIndex x, Time t1, Time t2) {
  AugmentedHarrisSystem r = reverse(h, t2);
  auto f = find_fbip(r, 0.0, x, t2 - t1);
  if (!f) return std::nullopt;
  return reverse_path(*f, t2);
}

// ---------------------------------------------------------------------------

void reverse_path(const InfectionPath& p, Time u, InfectionPath& out) {
  if (!p.jumps.empty() && !(p.jumps.back().time < p.t2))
    throw std::invalid_argument("reverse_path: jump at the end time");
  out.t1 = u - p.t2;
  out.t2 = u - p.t1;
  out.start = p.end();
  out.jumps.clear();
  for (auto it = p.jumps.rbegin(); it != p.jumps.rend(); ++it)
    out.jumps.push_back({u - it->time, it->to, it->from});
}

InfectionPath reverse_path(const InfectionPath& p, Time u) {
  InfectionPath r;
  r.jumps.reserve(p.jumps.size());
  reverse_path(p, u, r);
  return r;
}

InfectionPath concatenate(const InfectionPath& a, const InfectionPath& b) {
  if (a.t2 != b.t1 || a.end() != b.start)
    throw std::invalid_argument("concatenate: endpoint mismatch");
  InfectionPath p{a.t1, b.t2, a.start, a.jumps};
  p.jumps.insert(p.jumps.end(), b.jumps.begin(), b.jumps.end());
  return p;
}

InfectionPath join_by_jump(const InfectionPath& a, const InfectionPath& b) {
  if (a.t2 != b.t1) throw std::invalid_argument("join_by_jump: time mismatch");
  if (a.end() == b.start)
    throw std::invalid_argument("join_by_jump: no displacement at junction");
  if (!a.jumps.empty() && a.jumps.back().time == a.t2)
    throw std::invalid_argument("join_by_jump: two jumps at one time");
  InfectionPath p{a.t1, b.t2, a.start, a.jumps};
  p.jumps.push_back({a.t2, a.end(), b.start});
  p.jumps.insert(p.jumps.end(), b.jumps.begin(), b.jumps.end());
  return p;
}

InfectionPath translate_path(const LatticeWindow& w, const InfectionPath& p,
                             std::span<const int> dx, Time dt) {
  auto move = [&](SiteIndex s) {
    auto r = w.translate(s, dx);
    if (!r) throw std::out_of_range("translate_path: path leaves the window");
    return *r;
  };
  InfectionPath q{p.t1 + dt, p.t2 + dt, move(p.start), {}};
  for (const Jump& j : p.jumps)
    q.jumps.push_back({j.time + dt, move(j.from), move(j.to)});
  return q;
}

InfectionPath map_sites(const InfectionPath& p,
                        const std::vector<SiteIndex>& site_map) {
  auto m = [&](SiteIndex s) { return site_map.at(static_cast<std::size_t>(s)); };
  InfectionPath q{p.t1, p.t2, m(p.start), {}};
  for (const Jump& j : p.jumps) q.jumps.push_back({j.time, m(j.from), m(j.to)});
  return q;
}

// ---------------------------------------------------------------------------

namespace {

struct Enumerator {
  const AugmentedHarrisSystem& h;
  PathMode mode;
  Time t;
  std::vector<char> is_target;
  std::function<bool(const InfectionPath&)> visit;  // false stops the search
  std::size_t node_limit = kMaxEnumeratedPaths;
  InfectionPath cur{};
  std::size_t nodes = 0;
  bool stopped = false;

  struct Branch {
    Time time;
    SiteIndex to;
  };
  std::vector<std::vector<Branch>> pool{};  // one buffer per depth

  void dfs(SiteIndex z, Time tau, std::size_t depth) {
    if (stopped) return;
    if (++nodes > node_limit)
      throw CapExceeded("enumerate_paths: search tree too large");
    auto dl = h.deaths(z);
    auto d = std::lower_bound(dl.begin(), dl.end(), tau);
    Time stop = std::numeric_limits<Time>::infinity();
    if (d != dl.end() && *d <= t) stop = *d;
    if (stop == std::numeric_limits<Time>::infinity() &&
        is_target[static_cast<std::size_t>(z)] && !visit(cur)) {
      stopped = true;
      return;
    }
    if (pool.size() <= depth) pool.resize(depth + 1);
    auto& branches = pool[depth];
    branches.clear();
    const auto& w = h.window();
    for (EdgeIndex e : w.out_edges(z)) {
      for (EventKind kind : {EventKind::arrow, EventKind::selective}) {
        if (!usable(kind, mode)) continue;
        auto l = h.list(kind, e);
        for (auto it = std::upper_bound(l.begin(), l.end(), tau);
             it != l.end() && *it <= t && *it < stop; ++it)
          branches.push_back({*it, w.edge_to(e)});
      }
    }
    std::sort(branches.begin(), branches.end(),
              [](const Branch& a, const Branch& b) { return a.time < b.time; });
    // Deeper calls may reallocate the pool.
    for (std::size_t k = 0; k < pool[depth].size() && !stopped; ++k) {
      Branch b = pool[depth][k];
      cur.jumps.push_back({b.time, z, b.to});
      dfs(b.to, b.time, depth + 1);
      cur.jumps.pop_back();
    }
  }

  void run(std::span<const SiteIndex> sources, Time s) {
    std::vector<SiteIndex> src(sources.begin(), sources.end());
    std::sort(src.begin(), src.end());
    src.erase(std::unique(src.begin(), src.end()), src.end());
    for (SiteIndex x : src) {
      if (stopped) return;
      cur = InfectionPath{s, t, x, {}};
      dfs(x, s, 0);
    }
  }
};

Enumerator make_enumerator(const AugmentedHarrisSystem& h, Time s,
                           std::span<const SiteIndex> targets, Time t,
                           PathMode mode, std::size_t cap) {
  if (!(s <= t)) throw std::invalid_argument("enumerate_paths: s > t");
  if (events_between(h, s, t) > cap)
    throw CapExceeded("enumerate_paths: event cap exceeded");
  Enumerator en{h, mode, t, std::vector<char>(h.window().num_sites(), 0), {}};
  for (SiteIndex y : targets) en.is_target.at(static_cast<std::size_t>(y)) = 1;
  return en;
}

}  // namespace

std::vector<InfectionPath> enumerate_paths(const AugmentedHarrisSystem& h,
                                           std::span<const SiteIndex> sources,
                                           Time s,
                                           std::span<const SiteIndex> targets,
                                           Time t, PathMode mode,
                                           std::size_t cap) {
  auto en = make_enumerator(h, s, targets, t, mode, cap);
  std::vector<InfectionPath> out;
  en.visit = [&](const InfectionPath& p) {
    out.push_back(p);
    return true;
  };
  en.run(sources, s);
  return out;
}

void for_each_path(const AugmentedHarrisSystem& h,
                   std::span<const SiteIndex> sources, Time s,
                   std::span<const SiteIndex> targets, Time t, PathMode mode,
                   std::size_t cap,
                   const std::function<void(const InfectionPath&)>& visit) {
  auto en = make_enumerator(h, s, targets, t, mode, cap);
  en.node_limit = std::numeric_limits<std::size_t>::max();
  en.visit = [&](const InfectionPath& p) {
    visit(p);
    return true;
  };
  en.run(sources, s);
}

std::vector<InfectionPath> paths_to_level(const AugmentedHarrisSystem& h,
                                          SiteIndex x, Time s, Time t,
                                          PathMode mode, std::size_t limit) {
  if (!(s <= t)) throw std::invalid_argument("paths_to_level: s > t");
  Enumerator en{h, mode, t, std::vector<char>(h.window().num_sites(), 1), {}};
  std::vector<InfectionPath> out;
  en.visit = [&](const InfectionPath& p) {
    out.push_back(p);
    return out.size() < limit;
  };
  SiteIndex src[1] = {x};
  if (limit > 0) en.run(src, s);
  return out;
}

// ---------------------------------------------------------------------------

FreeSipSweep::FreeSipSweep(const AugmentedHarrisSystem& h,
                           std::span<const SiteIndex> sources, Time s)
    : h_(&h),
      next_(h.first_at_or_after(s)),
      free_(h.window().num_sites(), 0),
      basic_(h.window().num_sites(), 1) {
  for (SiteIndex x : sources) free_.at(static_cast<std::size_t>(x)) = 1;
  auto ev = h.events();
  while (next_ < ev.size() && ev[next_].time == s) {
    if (ev[next_].kind == EventKind::death) {
      auto i = static_cast<std::size_t>(ev[next_].index);
      free_[i] = basic_[i] = 0;
    }
    ++next_;
  }
}

void FreeSipSweep::advance_to(Time t) {
  auto ev = h_->events();
  const auto& w = h_->window();
  for (; next_ < ev.size() && ev[next_].time <= t; ++next_) {
    const Event& e = ev[next_];
    if (e.kind == EventKind::death) {
      auto i = static_cast<std::size_t>(e.index);
      free_[i] = basic_[i] = 0;
      continue;
    }
    auto x = static_cast<std::size_t>(w.edge_from(e.index));
    auto y = static_cast<std::size_t>(w.edge_to(e.index));
    if (free_[x] && !basic_[y]) free_[y] = 1;
    if (e.kind == EventKind::arrow && basic_[x]) basic_[y] = 1;
  }
}

// ---------------------------------------------------------------------------

std::string path_to_json(const LatticeWindow& w, const InfectionPath& p) {
  nlohmann::json j;
  j["t1"] = p.t1;
  j["t2"] = p.t2;
  j["start"] = w.coord_vec(p.start);
  nlohmann::json jumps = nlohmann::json::array();
  for (const Jump& q : p.jumps)
    jumps.push_back({{"time", q.time},
                     {"from", w.coord_vec(q.from)},
                     {"to", w.coord_vec(q.to)}});
  j["jumps"] = std::move(jumps);
  return j.dump();
}

InfectionPath path_from_json(const LatticeWindow& w, std::string_view text) {
  auto j = nlohmann::json::parse(text);
  InfectionPath p;
  p.t1 = j.at("t1").get<Time>();
  p.t2 = j.at("t2").get<Time>();
  p.start = w.index(j.at("start").get<std::vector<int>>());
  for (const auto& q : j.at("jumps"))
    p.jumps.push_back({q.at("time").get<Time>(),
                       w.index(q.at("from").get<std::vector<int>>()),
                       w.index(q.at("to").get<std::vector<int>>())});
  validate_path(w, p);
  return p;
}

}  // namespace mtcp
