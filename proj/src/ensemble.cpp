#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mtcp/estimators.hpp"
#include "mtcp/parallel.hpp"
#include "mtcp/rng.hpp"

namespace mtcp::est {

namespace {

using Kind = InitialCondition::Kind;

constexpr std::pair<Kind, const char*> kKindNames[] = {
    {Kind::all_zero, "all_zero"},
    {Kind::all_one, "all_one"},
    {Kind::all_two, "all_two"},
    {Kind::single_one_in_twos, "single_one_in_twos"},
    {Kind::single_one_in_empty, "single_one_in_empty"},
    {Kind::block, "block"},
    {Kind::random, "random"},
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

State parse_state(const std::string& s) {
  if (s == "0") return 0;
  if (s == "1") return 1;
  if (s == "2") return 2;
  throw std::invalid_argument("initial condition: state must be 0, 1 or 2, got " + s);
}

template <class T>
T number(const std::string& s) {
  T v{};
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size())
    throw std::invalid_argument("initial condition: bad number " + s);
  return v;
}

}  // namespace

Configuration InitialCondition::build(const LatticeWindow& w, std::uint64_t seed) const {
  switch (kind) {
    case Kind::all_zero: return Configuration::filled(w, 0);
    case Kind::all_one: return Configuration::filled(w, 1);
    case Kind::all_two: return Configuration::filled(w, 2);
    case Kind::single_one_in_twos: return Configuration::single(w, w.origin(), 1, 2);
    case Kind::single_one_in_empty: return Configuration::single(w, w.origin(), 1, 0);
    case Kind::block: return Configuration::block(w, block_radius, inner, outer);
    case Kind::random: {
      Engine rng(seed);
      std::vector<State> v(w.num_sites());
      for (auto& s : v) {
        double u = uniform01(rng);
        s = u < p1 ? 1 : u < p1 + p2 ? 2 : 0;
      }
      return Configuration(w, std::move(v));
    }
  }
  throw std::logic_error("unreachable");
}

std::string InitialCondition::describe() const {
  std::string name;
  for (auto [k, n] : kKindNames)
    if (k == kind) name = n;
  std::ostringstream os;
  os << name;
  if (kind == Kind::block) os << ':' << block_radius << ':' << int(inner) << ':' << int(outer);
  if (kind == Kind::random) os << ':' << p1 << ':' << p2;
  return os.str();
}

// name, block:m[:inner:outer], random:p1:p2
InitialCondition parse_initial(const std::string& text) {
  auto parts = split(text, ':');
  if (parts.empty()) throw std::invalid_argument("initial condition: empty");
  InitialCondition ic;
  bool found = false;
  for (auto [k, n] : kKindNames)
    if (parts[0] == n) {
      ic.kind = k;
      found = true;
    }
  if (!found) throw std::invalid_argument("initial condition: unknown kind " + parts[0]);
  if (ic.kind == Kind::block) {
    if (parts.size() != 2 && parts.size() != 4)
      throw std::invalid_argument("initial condition: block:m or block:m:inner:outer");
    ic.block_radius = number<int>(parts[1]);
    if (ic.block_radius < 0) throw std::invalid_argument("initial condition: negative block radius");
    ic.inner = 1;
    ic.outer = 2;
    if (parts.size() == 4) {
      ic.inner = parse_state(parts[2]);
      ic.outer = parse_state(parts[3]);
    }
  } else if (ic.kind == Kind::random) {
    if (parts.size() != 3) throw std::invalid_argument("initial condition: random:p1:p2");
    ic.p1 = number<double>(parts[1]);
    ic.p2 = number<double>(parts[2]);
    if (!(ic.p1 >= 0 && ic.p2 >= 0 && ic.p1 + ic.p2 <= 1))
      throw std::invalid_argument("initial condition: need p1, p2 >= 0 and p1 + p2 <= 1");
  } else if (parts.size() != 1) {
    throw std::invalid_argument("initial condition: " + parts[0] + " takes no parameters");
  }
  return ic;
}

void MultitypeParams::validate() const {
  if (dim < 1 || range < 1 || radius < 0) throw std::invalid_argument("need dim >= 1, range >= 1, radius >= 0");
  if (!(horizon > 0 && horizon <= kMaxHorizon)) throw std::invalid_argument("horizon must be in (0, 2^20]");
  if (!(lambda2 >= 0) || !std::isfinite(lambda1)) throw std::invalid_argument("rates must be finite and >= 0");
  if (allow_equal_rates ? lambda1 < lambda2 : lambda1 <= lambda2)
    throw std::invalid_argument("rates violate the global assumption lambda1 > lambda2 > 0");
  if (lambda_c_hi && !(lambda1 > *lambda_c_hi))
    throw std::invalid_argument("lambda1 must exceed the upper end of the lambda_c bracket");
}

RunObservation observe_multitype(const MultitypeParams& p, const Configuration& xi0,
                                 std::uint64_t seed, const ObservationSpec& spec,
                                 Configuration* final_state) {
  p.validate();
  const auto w = p.window();
  if (!xi0.window().same_geometry(w)) throw std::invalid_argument("initial configuration window mismatch");
  HarrisStream stream(w, {p.lambda1, p.lambda2}, seed, {.allow_equal_rates = p.allow_equal_rates});

  std::vector<State> st(xi0.states().begin(), xi0.states().end());
  std::size_t counts[3] = {0, 0, 0};
  for (State s : st) ++counts[s];

  // Norm histogram of the 2's, for the distance from the origin to the nearest 2.
  const int cap = w.radius() + 1;
  std::vector<std::size_t> twos_at(static_cast<std::size_t>(cap) + 1, 0);
  int d2 = cap;
  if (spec.cone) {
    for (std::size_t s = 0; s < st.size(); ++s)
      if (st[s] == 2) ++twos_at[static_cast<std::size_t>(w.norm(static_cast<SiteIndex>(s)))];
    d2 = 0;
    while (d2 < cap && twos_at[static_cast<std::size_t>(d2)] == 0) ++d2;
  }
  const Time half = p.horizon / 2;
  const Time cone_from = spec.cone_from < 0 ? half : spec.cone_from;
  double slope = std::numeric_limits<double>::infinity();

  RunObservation o;
  bool half_done = false;
  auto mark_half = [&] {
    o.ones_half = counts[1] > 0;
    o.twos_half = counts[2] > 0;
    half_done = true;
  };

  Event ev;
  while (stream.next(ev)) {
    if (!half_done && ev.time > half) mark_half();
    SiteIndex target;
    State value;
    if (ev.kind == EventKind::death) {
      target = ev.index;
      if (st[static_cast<std::size_t>(target)] == 0) continue;
      value = 0;
    } else {
      SiteIndex x = w.edge_from(ev.index);
      target = w.edge_to(ev.index);
      State sx = st[static_cast<std::size_t>(x)];
      if (sx == 0 || st[static_cast<std::size_t>(target)] != 0) continue;
      if (ev.kind == EventKind::selective && sx != 1) continue;
      value = sx;
    }
    State old = st[static_cast<std::size_t>(target)];
    st[static_cast<std::size_t>(target)] = value;
    --counts[old];
    ++counts[value];
    if (value == 1 && w.near_boundary(target)) o.boundary = true;
    if (spec.cone && (old == 2 || value == 2)) {
      auto r = static_cast<std::size_t>(w.norm(target));
      int before = d2;
      if (value == 2) {
        ++twos_at[r];
        d2 = std::min(d2, static_cast<int>(r));
      } else {
        --twos_at[r];
        while (d2 < cap && twos_at[static_cast<std::size_t>(d2)] == 0) ++d2;
      }
      // d2 / t on the constant piece ending at this event tends to before / time.
      if (d2 != before && ev.time > cone_from) slope = std::min(slope, before / ev.time);
    }
  }
  if (!half_done) mark_half();
  o.ones_end = counts[1] > 0;
  o.twos_end = counts[2] > 0;
  if (spec.cone) o.cone_slope = std::min(slope, d2 / p.horizon);
  std::uint32_t cell = 0;
  for (auto it = spec.window_sites.rbegin(); it != spec.window_sites.rend(); ++it)
    cell = cell * 3 + st[static_cast<std::size_t>(*it)];
  o.cell = cell;
  if (final_state) *final_state = Configuration(w, std::move(st));
  return o;
}

std::vector<RunObservation> run_ensemble(const MultitypeParams& p, const InitialCondition& init,
                                         std::size_t n_runs, std::uint64_t seed,
                                         const ObservationSpec& spec, int threads) {
  p.validate();
  const auto w = p.window();
  std::vector<RunObservation> out(n_runs);
  const bool fixed = init.kind != Kind::random;
  const Configuration shared = init.build(w, 0);
  parallel_for(n_runs, threads, [&](std::size_t r) {
    if (fixed) {
      out[r] = observe_multitype(p, shared, run_seed(seed, r), spec);
    } else {
      out[r] = observe_multitype(p, init.build(w, run_seed(~seed, r)), run_seed(seed, r), spec);
    }
  });
  return out;
}

SurvivalEstimate summarize_survival(const MultitypeParams& p, const InitialCondition& init,
                                    const std::vector<RunObservation>& obs) {
  SurvivalEstimate e;
  e.params = p;
  e.initial = init.describe();
  e.n_runs = obs.size();
  std::size_t both = 0, half_only = 0, end_only = 0, neither = 0;
  for (const auto& o : obs) {
    e.s1_half.hits += o.ones_half;
    e.s1_end.hits += o.ones_end;
    e.s2_half.hits += o.twos_half;
    e.s2_end.hits += o.twos_end;
    e.boundary_runs += o.boundary;
    if (o.ones_half && o.ones_end) ++both;
    else if (o.ones_half) ++half_only;
    else if (o.ones_end) ++end_only;
    else ++neither;
  }
  e.s1_half.n = e.s1_end.n = e.s2_half.n = e.s2_end.n = obs.size();
  if (!obs.empty()) {
    e.s1_half_ci = e.s1_half.wilson();
    e.s1_end_ci = e.s1_end.wilson();
    e.s1_drift = stats::newcombe_paired(both, half_only, end_only, neither);
  }
  return e;
}

SurvivalEstimate estimate_survival(const MultitypeParams& p, const InitialCondition& init,
                                   std::size_t n_runs, std::uint64_t seed, int threads) {
  return summarize_survival(p, init, run_ensemble(p, init, n_runs, seed, {}, threads));
}

ConeEstimate summarize_cone(const std::vector<RunObservation>& obs, double quantile) {
  ConeEstimate c;
  c.quantile = quantile;
  for (const auto& o : obs)
    if (o.ones_end) c.slopes.push_back(o.cone_slope);
  c.survivors = c.slopes.size();
  if (c.survivors == 0) throw std::runtime_error("cone: no run kept its 1's to the horizon");
  c.positive.n = c.survivors;
  for (double s : c.slopes) c.positive.hits += s > 0;
  c.alpha_hat = stats::quantile(c.slopes, quantile);
  return c;
}

ConeEstimate estimate_cone(const MultitypeParams& p, std::size_t n_runs, std::uint64_t seed,
                           int threads, double quantile) {
  ObservationSpec spec;
  spec.cone = true;
  InitialCondition init;
  init.kind = Kind::single_one_in_twos;
  return summarize_cone(run_ensemble(p, init, n_runs, seed, spec, threads), quantile);
}

ConvergenceReport complete_convergence_check(const ConvergenceConfig& cfg) {
  if (cfg.window.empty() || cfg.window.size() > 4)
    throw std::invalid_argument("convergence: window must hold 1 to 4 sites");
  const auto w = cfg.params.window();
  ConvergenceReport r;
  r.t = cfg.params.horizon;
  r.n_runs = cfg.n_runs;
  r.n_reference = cfg.n_reference;
  ObservationSpec spec;
  for (const auto& x : cfg.window) {
    auto s = w.find(x);
    if (!s) throw std::invalid_argument("convergence: window site outside the lattice window");
    spec.window_sites.push_back(*s);
  }
  r.window_sites = spec.window_sites;
  std::size_t cells = 1;
  for (std::size_t i = 0; i < cfg.window.size(); ++i) cells *= 3;

  auto histogram = [&](const std::vector<RunObservation>& obs) {
    std::vector<double> h(cells, 0.0);
    for (const auto& o : obs) h[o.cell] += 1.0;
    for (auto& v : h) v /= static_cast<double>(obs.size());
    return h;
  };
  auto mixed = run_ensemble(cfg.params, cfg.init, cfg.n_runs, run_seed(cfg.seed, 0), spec, cfg.threads);
  InitialCondition ones, twos;
  ones.kind = Kind::all_one;
  twos.kind = Kind::all_two;
  r.empirical = histogram(mixed);
  r.mu1 = histogram(run_ensemble(cfg.params, ones, cfg.n_reference, run_seed(cfg.seed, 1), spec, cfg.threads));
  r.mu2 = histogram(run_ensemble(cfg.params, twos, cfg.n_reference, run_seed(cfg.seed, 2), spec, cfg.threads));

  std::size_t k1 = 0, k2 = 0;
  for (const auto& o : mixed) {
    if (o.ones_end) ++k1;
    else if (o.twos_end) ++k2;
  }
  const double n = static_cast<double>(mixed.size());
  r.w1 = static_cast<double>(k1) / n;
  r.w2 = static_cast<double>(k2) / n;
  r.w0 = 1.0 - r.w1 - r.w2;
  r.mixture.assign(cells, 0.0);
  for (std::size_t c = 0; c < cells; ++c) r.mixture[c] = r.w1 * r.mu1[c] + r.w2 * r.mu2[c];
  r.mixture[0] += r.w0;  // cell 0 is the empty window
  r.tv = stats::total_variation(r.empirical, r.mixture);
  return r;
}

}  // namespace mtcp::est
