#include <algorithm>
#include <sstream>

#include "mtcp/estimators.hpp"
#include "mtcp/parallel.hpp"
#include "mtcp/paths.hpp"
#include "mtcp/rng.hpp"

namespace mtcp::est {

bool GSet::contains(const Configuration& xi) const {
  const auto& w = xi.window();
  std::size_t ones = 0;
  for (std::size_t s = 0; s < w.num_sites(); ++s) {
    int r = w.norm(static_cast<SiteIndex>(s));
    State v = xi.at(static_cast<SiteIndex>(s));
    if (v == 2 && r <= u2) return false;
    if (v == 1 && r <= u1) ++ones;
  }
  return ones > n;
}

bool AuditReport::pass() const {
  return std::all_of(items.begin(), items.end(), [](const AuditItem& i) { return i.pass; });
}

std::size_t AuditReport::exact_violations() const {
  std::size_t v = 0;
  for (const auto& i : items)
    if (i.exact) v += i.violations;
  return v;
}

namespace {

std::vector<SiteIndex> sites_where(const Configuration& xi, bool (*pred)(State)) {
  std::vector<SiteIndex> out;
  for (std::size_t s = 0; s < xi.states().size(); ++s)
    if (pred(xi.states()[s])) out.push_back(static_cast<SiteIndex>(s));
  return out;
}

Configuration random_configuration(const LatticeWindow& w, Engine& rng) {
  std::vector<State> v(w.num_sites());
  for (auto& s : v) s = static_cast<State>(uniform_index(rng, 3));
  return Configuration(w, std::move(v));
}

}  // namespace

std::size_t audit_trajectory(const AugmentedHarrisSystem& h, const Configuration& xi0,
                             std::size_t& checks, std::string* detail) {
  const auto& w = h.window();
  auto twos = sites_where(xi0, [](State v) { return v == 2; });
  auto ones = sites_where(xi0, [](State v) { return v == 1; });
  auto live = sites_where(xi0, [](State v) { return v != 0; });
  ForwardReach bip2(h, PathMode::bip, twos, 0.0);
  ForwardReach sip1(h, PathMode::sip, ones, 0.0);
  ForwardReach bip_live(h, PathMode::bip, live, 0.0);
  ForwardReach sip_live(h, PathMode::sip, live, 0.0);
  FreeSipSweep fsip1(h, ones, 0.0);
  Evolver ev(h, xi0);

  std::size_t bad = 0;
  auto check = [&](Time t) {
    const auto& xi = ev.state();
    for (std::size_t s = 0; s < w.num_sites(); ++s) {
      auto x = static_cast<SiteIndex>(s);
      State v = xi.at(x);
      const char* what = nullptr;
      if (v == 2 && !bip2.contains(x)) what = "a 2 outside the basic reach of the initial 2's";
      else if (v == 1 && !sip1.contains(x)) what = "a 1 outside the selective reach of the initial 1's";
      else if (bip_live.contains(x) && v == 0) what = "an empty site in the basic reach of the occupied sites";
      else if (v != 0 && !sip_live.contains(x)) what = "an occupied site outside the selective reach";
      else if (fsip1.in_free(x) && v != 1) what = "a free selective endpoint not in state 1";
      checks += 5;
      if (what) {
        if (bad == 0 && detail) {
          std::ostringstream os;
          os << what << " at site " << x << ", time " << t << ", seed " << h.seed();
          *detail = os.str();
        }
        ++bad;
      }
    }
  };
  check(0.0);
  for (const auto& e : h.events()) {
    ev.advance_to(e.time);
    bip2.advance_to(e.time);
    sip1.advance_to(e.time);
    bip_live.advance_to(e.time);
    sip_live.advance_to(e.time);
    fsip1.advance_to(e.time);
    check(e.time);
  }
  return bad;
}

AuditReport invariant_audit(const AuditConfig& cfg) {
  cfg.params.validate();
  AuditReport rep;
  const auto w = cfg.params.window();
  const Rates rates{cfg.params.lambda1, cfg.params.lambda2};
  const SampleOptions opts{.allow_equal_rates = cfg.params.allow_equal_rates};

  {
    AuditItem item{.name = "path_inclusions", .exact = true, .detail = {}};
    std::vector<std::size_t> bad(cfg.n_trajectories), checks(cfg.n_trajectories);
    std::vector<std::string> details(cfg.n_trajectories);
    parallel_for(cfg.n_trajectories, cfg.threads, [&](std::size_t r) {
      auto h = sample_harris(w, rates, run_seed(cfg.seed, r), opts);
      Engine rng(run_seed(~cfg.seed, r));
      auto xi0 = random_configuration(w, rng);
      bad[r] = audit_trajectory(h, xi0, checks[r], &details[r]);
    });
    for (std::size_t r = 0; r < cfg.n_trajectories; ++r) {
      item.checks += checks[r];
      item.violations += bad[r];
      if (bad[r] && item.detail.empty()) item.detail = details[r];
    }
    item.pass = item.violations == 0;
    rep.items.push_back(item);
  }

  {
    // larger n, smaller u1, larger u2: smaller set
    AuditItem item{.name = "gset_monotone", .exact = true, .detail = {}};
    Engine rng(run_seed(cfg.seed, 1u << 30));
    const int m = w.radius();
    for (std::size_t k = 0; k < cfg.n_gset; ++k) {
      auto xi = random_configuration(w, rng);
      // Sparse 2's so that both sides of the inclusion are exercised.
      for (std::size_t s = 0; s < w.num_sites(); ++s)
        if (xi.at(static_cast<SiteIndex>(s)) == 2 && uniform01(rng) < 0.9) xi.set(static_cast<SiteIndex>(s), 0);
      GSet a{uniform_index(rng, 2 * w.num_sites() / 3 + 1), static_cast<double>(uniform_index(rng, m + 1)),
             static_cast<double>(uniform_index(rng, m + 1))};
      GSet b{a.n + uniform_index(rng, 3), a.u1 - static_cast<double>(uniform_index(rng, 3)),
             a.u2 + static_cast<double>(uniform_index(rng, 3))};
      ++item.checks;
      if (b.contains(xi) && !a.contains(xi)) {
        if (item.violations++ == 0) {
          std::ostringstream os;
          os << "G(" << b.n << "," << b.u1 << "," << b.u2 << ") not inside G(" << a.n << "," << a.u1 << ","
             << a.u2 << ")";
          item.detail = os.str();
        }
      }
    }
    item.pass = item.violations == 0;
    rep.items.push_back(item);
  }

  {
    AuditItem item{.name = "coupling_identities", .exact = true, .detail = {}};
    std::vector<std::size_t> bad(cfg.n_coupling), checks(cfg.n_coupling);
    const Time T = cfg.params.horizon;
    const Time times[] = {T / 4, T / 2, 3 * T / 4, T};
    parallel_for(cfg.n_coupling, cfg.threads, [&](std::size_t r) {
      auto h = sample_harris(w, rates, run_seed(cfg.seed ^ 0xC0u, r), opts);
      Engine rng(run_seed(~cfg.seed ^ 0xC0u, r));
      std::vector<State> z(w.num_sites());
      for (auto& s : z) s = uniform01(rng) < 0.3 ? 1 : 0;
      Configuration zeta(w, z);
      auto a = sites_where(zeta, [](State v) { return v == 1; });
      auto sel = evolve_one_type(zeta, h, OneTypeRate::lambda1_with_selective, T);
      auto plain = evolve_one_type(zeta, h, OneTypeRate::lambda2_only, T);
      auto full = evolve(Configuration::filled(w, 1), h, T);
      ForwardReach sip(h, PathMode::sip, a, 0.0);
      ForwardReach bip(h, PathMode::bip, a, 0.0);
      auto level = ForwardReach::level(h, PathMode::sip, 0.0);
      for (Time t : times) {
        sip.advance_to(t);
        bip.advance_to(t);
        level.advance_to(t);
        for (std::size_t s = 0; s < w.num_sites(); ++s) {
          auto x = static_cast<SiteIndex>(s);
          checks[r] += 3;
          bad[r] += (sel.state_at(x, t) == 1) != sip.contains(x);
          bad[r] += (plain.state_at(x, t) == 1) != bip.contains(x);
          bad[r] += (full.state_at(x, t) == 1) != level.contains(x);
        }
      }
    });
    for (std::size_t r = 0; r < cfg.n_coupling; ++r) {
      item.checks += checks[r];
      item.violations += bad[r];
      if (bad[r] && item.detail.empty()) item.detail = "mismatch on system " + std::to_string(r);
    }
    item.pass = item.violations == 0;
    rep.items.push_back(item);
  }

  if (cfg.n_block > 0) {
    AuditItem item{.name = "block_trend", .exact = false, .detail = {}};
    std::vector<std::size_t> k, n;
    std::vector<double> scores;
    std::ostringstream os;
    for (std::size_t i = 0; i < cfg.block_sizes.size(); ++i) {
      InitialCondition init;
      init.kind = InitialCondition::Kind::block;
      init.block_radius = cfg.block_sizes[i];
      auto e = estimate_survival(cfg.block_params, init, cfg.n_block, run_seed(cfg.seed ^ 0xB10Cu, i), cfg.threads);
      k.push_back(e.s1_end.hits);
      n.push_back(e.s1_end.n);
      scores.push_back(cfg.block_sizes[i]);
      os << "m=" << cfg.block_sizes[i] << ": " << e.s1_end.hits << "/" << e.s1_end.n << "; ";
    }
    auto trend = stats::cochran_armitage(k, n, scores);
    os << "p_increasing=" << trend.p_increasing;
    item.checks = k.size();
    item.pass = trend.p_increasing < 0.05;
    item.violations = item.pass ? 0 : 1;
    item.detail = os.str();
    rep.items.push_back(item);
  }
  return rep;
}

}  // namespace mtcp::est
