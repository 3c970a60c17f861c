#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mtcp/estimators.hpp"
#include "mtcp/parallel.hpp"
#include "mtcp/paths.hpp"
#include "mtcp/rng.hpp"

namespace mtcp::est {

namespace {

constexpr Time kInf = std::numeric_limits<Time>::infinity();

// Offsets z with 0 < |z|_1 <= R.
std::vector<Coord> offsets(int dim, int range) {
  std::vector<Coord> out;
  Coord z(static_cast<std::size_t>(dim), -range);
  for (;;) {
    int n = 0;
    for (int v : z) n += std::abs(v);
    if (n > 0 && n <= range) out.push_back(z);
    std::size_t i = 0;
    while (i < z.size() && z[i] == range) z[i++] = -range;
    if (i == z.size()) break;
    ++z[i];
  }
  return out;
}

struct NeighborTable {
  int degree = 0;
  std::vector<SiteIndex> to;  // site * degree + k, -1 outside the window
};

NeighborTable neighbors(const LatticeWindow& w) {
  NeighborTable t;
  t.degree = static_cast<int>(offsets(w.dim(), w.range()).size());
  const auto d = static_cast<std::size_t>(t.degree);
  t.to.assign(w.num_sites() * d, -1);
  for (std::size_t s = 0; s < w.num_sites(); ++s) {
    auto out = w.out_edges(static_cast<SiteIndex>(s));
    for (std::size_t k = 0; k < out.size(); ++k) t.to[s * d + k] = w.edge_to(out[k]);
  }
  return t;
}

Frequency tally(const std::vector<char>& v) {
  Frequency f;
  f.n = v.size();
  for (char c : v) f.hits += static_cast<std::size_t>(c != 0);
  return f;
}

}  // namespace

CoupledOneTypeRun run_one_type_coupled(const LatticeWindow& w,
                                       std::span<const double> lambdas,
                                       std::span<const SiteIndex> start,
                                       std::uint64_t seed, bool track_reach) {
  const std::size_t g = lambdas.size();
  if (g == 0 || g > 64) throw std::invalid_argument("one-type: need 1 to 64 rates");
  double lmax = 0.0;
  for (double l : lambdas) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("one-type: rates must be finite and >= 0");
    lmax = std::max(lmax, l);
  }
  const auto table = neighbors(w);
  const int degree = table.degree;
  const Time horizon = w.horizon();
  const std::uint64_t all = g == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << g) - 1);

  CoupledOneTypeRun out;
  out.death_time.assign(g, horizon);
  out.censored.assign(g, 1);
  out.boundary.assign(g, 0);
  if (track_reach)
    out.first_reach.assign(g, std::vector<Time>(static_cast<std::size_t>(w.radius()) + 1, kInf));

  std::vector<std::uint64_t> mask(w.num_sites(), 0);
  std::vector<SiteIndex> active;
  std::vector<std::int64_t> pos(w.num_sites(), -1);
  std::vector<std::size_t> count(g, 0);

  auto activate = [&](SiteIndex s) {
    pos[static_cast<std::size_t>(s)] = static_cast<std::int64_t>(active.size());
    active.push_back(s);
  };
  auto deactivate = [&](SiteIndex s) {
    auto p = static_cast<std::size_t>(pos[static_cast<std::size_t>(s)]);
    active[p] = active.back();
    pos[static_cast<std::size_t>(active[p])] = static_cast<std::int64_t>(p);
    active.pop_back();
    pos[static_cast<std::size_t>(s)] = -1;
  };
  auto occupied = [&](SiteIndex s, std::uint64_t bits, Time t) {
    int r = w.norm(s);
    bool edge = w.near_boundary(s);
    for (std::uint64_t b = bits; b; b &= b - 1) {
      auto j = static_cast<std::size_t>(std::countr_zero(b));
      ++count[j];
      if (edge) out.boundary[j] = 1;
      if (track_reach) {
        auto& fr = out.first_reach[j];
        for (int q = r; q >= 0 && fr[static_cast<std::size_t>(q)] == kInf; --q)
          fr[static_cast<std::size_t>(q)] = t;
      }
    }
  };

  for (SiteIndex s : start) {
    if (mask[static_cast<std::size_t>(s)] != 0) continue;
    mask[static_cast<std::size_t>(s)] = all;
    activate(s);
    occupied(s, all, 0.0);
  }
  if (start.empty()) {
    std::fill(out.death_time.begin(), out.death_time.end(), 0.0);
    std::fill(out.censored.begin(), out.censored.end(), 0);
    return out;
  }

  Engine rng(seed);
  const double per_site = 1.0 + degree * lmax;
  Time t = 0.0;
  while (!active.empty()) {
    t += exponential(rng, per_site * static_cast<double>(active.size()));
    if (t >= horizon) break;
    SiteIndex s = active[uniform_index(rng, active.size())];
    double v = uniform01(rng) * per_site;
    auto& ms = mask[static_cast<std::size_t>(s)];
    if (v < 1.0) {
      std::uint64_t m = ms;
      ms = 0;
      deactivate(s);
      for (std::uint64_t b = m; b; b &= b - 1) {
        auto j = static_cast<std::size_t>(std::countr_zero(b));
        if (--count[j] == 0) {
          out.death_time[j] = t;
          out.censored[j] = 0;
        }
      }
      continue;
    }
    double a = (v - 1.0) / lmax;
    int k = std::min(static_cast<int>(a), degree - 1);
    double u = a - k;
    SiteIndex y = table.to[static_cast<std::size_t>(s) * static_cast<std::size_t>(degree) + static_cast<std::size_t>(k)];
    if (y < 0) continue;
    std::uint64_t eligible = 0;
    for (std::size_t j = 0; j < g; ++j)
      if (u * lmax < lambdas[j]) eligible |= std::uint64_t{1} << j;
    auto& my = mask[static_cast<std::size_t>(y)];
    std::uint64_t fresh = ms & eligible & ~my;
    if (!fresh) continue;
    if (my == 0) activate(y);
    my |= fresh;
    occupied(y, fresh, t);
  }
  return out;
}

namespace {

struct GridPass {
  std::vector<Frequency> half, full;
};

GridPass survival_pass(const LatticeWindow& w, const std::vector<double>& lambdas,
                       std::size_t n_runs, std::uint64_t seed, int threads) {
  const Time half = w.horizon() / 2;
  SiteIndex o = w.origin();
  std::vector<std::vector<char>> h(lambdas.size(), std::vector<char>(n_runs)),
      f(lambdas.size(), std::vector<char>(n_runs));
  parallel_for(n_runs, threads, [&](std::size_t r) {
    auto run = run_one_type_coupled(w, lambdas, std::span<const SiteIndex>(&o, 1), run_seed(seed, r));
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      h[j][r] = run.death_time[j] > half || run.censored[j];
      f[j][r] = run.censored[j];
    }
  });
  GridPass p;
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    p.half.push_back(tally(h[j]));
    p.full.push_back(tally(f[j]));
  }
  return p;
}

}  // namespace

LambdaCEstimate estimate_lambda_c(const LambdaCConfig& cfg) {
  if (cfg.grid.size() < 2) throw std::invalid_argument("lambda_c: grid needs at least two rates");
  if (!std::is_sorted(cfg.grid.begin(), cfg.grid.end()))
    throw std::invalid_argument("lambda_c: grid must be increasing");
  if (cfg.grid.front() <= 0.0) throw std::invalid_argument("lambda_c: rates must be positive");
  if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0))
    throw std::invalid_argument("lambda_c: threshold must be in (0, 1)");
  LatticeWindow w(cfg.dim, cfg.radius, cfg.range, cfg.horizon);
  LambdaCEstimate e;
  e.dim = cfg.dim;
  e.range = cfg.range;
  e.radius = cfg.radius;
  e.horizon = cfg.horizon;
  e.threshold = cfg.threshold;
  e.n_runs = cfg.n_runs;

  auto pass = survival_pass(w, cfg.grid, cfg.n_runs, cfg.seed, cfg.threads);
  for (std::size_t j = 0; j < cfg.grid.size(); ++j) {
    e.curve.push_back({cfg.grid[j], pass.half[j], pass.full[j]});
    if (j > 0) {
      for (auto* fr : {&pass.half, &pass.full}) {
        if ((*fr)[j].wilson().hi < (*fr)[j - 1].wilson().lo)
          throw std::runtime_error("lambda_c: survival curve decreases beyond its confidence "
                                   "intervals; increase n_runs");
      }
    }
  }

  auto crossing = [&](const std::vector<Frequency>& fr) {
    std::size_t j = 0;
    while (j < fr.size() && fr[j].value() < cfg.threshold) ++j;
    if (j == 0 || j == fr.size())
      throw std::invalid_argument("lambda_c: threshold crossing lies outside the grid");
    return std::pair{cfg.grid[j - 1], cfg.grid[j]};
  };
  auto [hl, hh] = crossing(pass.half);
  auto [fl, fh] = crossing(pass.full);
  for (int step = 0; step < cfg.bisection_steps; ++step) {
    std::vector<double> mids{(hl + hh) / 2, (fl + fh) / 2};
    auto p = survival_pass(w, mids, cfg.n_runs, run_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(step)),
                           cfg.threads);
    (p.half[0].value() >= cfg.threshold ? hh : hl) = mids[0];
    (p.full[1].value() >= cfg.threshold ? fh : fl) = mids[1];
  }
  e.cross_half_lo = hl;
  e.cross_half_hi = hh;
  e.cross_full_lo = fl;
  e.cross_full_hi = fh;
  e.lo = std::min({hl, fl});
  e.hi = std::max({hh, fh});
  return e;
}

const char* to_string(Bound b) {
  switch (b) {
    case Bound::spread_distance: return "spread_distance";
    case Bound::spread_time: return "spread_time";
    case Bound::late_extinction: return "late_extinction";
    case Bound::large_set_extinction: return "large_set_extinction";
    case Bound::coupling_failure: return "coupling_failure";
  }
  return "?";
}

Bound parse_bound(const std::string& s) {
  for (Bound b : {Bound::spread_distance, Bound::spread_time, Bound::late_extinction,
                  Bound::large_set_extinction, Bound::coupling_failure})
    if (s == to_string(b)) return b;
  throw std::invalid_argument("unknown bound: " + s);
}

namespace {

std::vector<SiteIndex> ball(const LatticeWindow& w, int r) {
  std::vector<SiteIndex> out;
  for (std::size_t s = 0; s < w.num_sites(); ++s)
    if (w.norm(static_cast<SiteIndex>(s)) <= r) out.push_back(static_cast<SiteIndex>(s));
  return out;
}

}  // namespace

BoundFit bound_fit(Bound which, const BoundConfig& cfg) {
  if (cfg.grid.size() < 2) throw std::invalid_argument("bound_fit: grid needs at least two points");
  if (!(cfg.lambda > 0)) throw std::invalid_argument("bound_fit: rate must be positive");
  BoundFit out;
  out.which = which;
  out.expect_negative = which != Bound::spread_time;
  const std::size_t n = cfg.n_runs;
  const std::size_t gsz = cfg.grid.size();
  std::vector<std::vector<char>> hit(gsz, std::vector<char>(n, 0));
  LatticeWindow w(cfg.dim, cfg.radius, cfg.range, cfg.horizon);
  const double lam[1] = {cfg.lambda};

  switch (which) {
    case Bound::spread_distance:
    case Bound::spread_time: {
      for (double g : cfg.grid) {
        double x = which == Bound::spread_distance ? g : cfg.fixed;
        double t = which == Bound::spread_distance ? cfg.fixed : g;
        if (std::floor(x) + 1 > cfg.radius) throw std::invalid_argument("bound_fit: distance beyond the window");
        if (t > cfg.horizon) throw std::invalid_argument("bound_fit: time beyond the horizon");
      }
      SiteIndex o = w.origin();
      parallel_for(n, cfg.threads, [&](std::size_t r) {
        auto run = run_one_type_coupled(w, lam, std::span<const SiteIndex>(&o, 1), run_seed(cfg.seed, r), true);
        for (std::size_t j = 0; j < gsz; ++j) {
          double x = which == Bound::spread_distance ? cfg.grid[j] : cfg.fixed;
          double t = which == Bound::spread_distance ? cfg.fixed : cfg.grid[j];
          auto need = static_cast<std::size_t>(std::floor(x)) + 1;  // norm > x
          hit[j][r] = run.first_reach[0][need] <= t;
        }
      });
      break;
    }
    case Bound::late_extinction: {
      for (double t : cfg.grid)
        if (!(t < cfg.horizon)) throw std::invalid_argument("bound_fit: times must be below the horizon");
      SiteIndex o = w.origin();
      parallel_for(n, cfg.threads, [&](std::size_t r) {
        auto run = run_one_type_coupled(w, lam, std::span<const SiteIndex>(&o, 1), run_seed(cfg.seed, r));
        for (std::size_t j = 0; j < gsz; ++j)
          hit[j][r] = !run.censored[0] && run.death_time[0] > cfg.grid[j];
      });
      break;
    }
    case Bound::large_set_extinction: {
      std::vector<std::vector<SiteIndex>> sets;
      for (double g : cfg.grid) sets.push_back(ball(w, static_cast<int>(g)));
      parallel_for(n, cfg.threads, [&](std::size_t r) {
        for (std::size_t j = 0; j < gsz; ++j) {
          auto run = run_one_type_coupled(w, lam, sets[j], run_seed(cfg.seed, r * gsz + j));
          hit[j][r] = !run.censored[0];
        }
      });
      break;
    }
    case Bound::coupling_failure: {
      double tmax = *std::max_element(cfg.grid.begin(), cfg.grid.end());
      if (tmax > cfg.horizon) throw std::invalid_argument("bound_fit: time beyond the horizon");
      std::vector<double> order(cfg.grid);
      std::sort(order.begin(), order.end());
      Rates rates{cfg.lambda, cfg.lambda};
      parallel_for(n, cfg.threads, [&](std::size_t r) {
        auto h = sample_harris(w.with_horizon(tmax), rates, run_seed(cfg.seed, r), {.allow_equal_rates = true});
        SiteIndex o = w.origin();
        ForwardReach from_o(h, PathMode::bip, std::span<const SiteIndex>(&o, 1), 0.0);
        auto level = ForwardReach::level(h, PathMode::bip, 0.0);
        for (double t : order) {
          from_o.advance_to(t);
          level.advance_to(t);
          auto y = w.step(o, 0, static_cast<int>(std::floor(std::sqrt(t))));
          if (!y) throw std::invalid_argument("bound_fit: sqrt(t) beyond the window");
          std::size_t j = static_cast<std::size_t>(
              std::find(cfg.grid.begin(), cfg.grid.end(), t) - cfg.grid.begin());
          hit[j][r] = from_o.size() > 0 && level.contains(*y) && !from_o.contains(*y);
        }
      });
      break;
    }
  }

  std::vector<double> xs;
  std::vector<std::size_t> ks, ns;
  std::size_t usable = 0;
  for (std::size_t j = 0; j < gsz; ++j) {
    double x = cfg.grid[j];
    if (which == Bound::large_set_extinction)
      x = static_cast<double>(ball(w, static_cast<int>(cfg.grid[j])).size());
    auto f = tally(hit[j]);
    out.points.push_back({x, f.hits, f.n});
    xs.push_back(x);
    ks.push_back(f.hits);
    ns.push_back(f.n);
    usable += static_cast<std::size_t>(f.hits > 0 && f.hits < f.n);
  }
  if (usable < 2) return out;  // nothing to fit; sign_ok stays false
  out.fit = stats::log_linear_fit(xs, ks, ns);
  out.p_value = out.expect_negative ? out.fit.p_negative : out.fit.p_positive;
  out.sign_ok = out.p_value < 0.05;
  return out;
}

}  // namespace mtcp::est
