#include <algorithm>
#include <sstream>

#include "mtcp/ancestor.hpp"
#include "mtcp/estimators.hpp"
#include "mtcp/parallel.hpp"
#include "mtcp/rng.hpp"

namespace mtcp::est {

namespace {

struct Sample {
  bool surviving = false;
  bool found = false;
  double x = 0.0;
};

// Runs in index order until n_surviving conditioned runs are collected, so the
// result does not depend on the thread count.
DriftResult collect(const DriftConfig& cfg, bool planted) {
  if (cfg.L < 1) throw std::invalid_argument("drift: L must be >= 1");
  if (cfg.radius < 2 * cfg.L + 2) throw std::invalid_argument("drift: window too small for L");
  const LatticeWindow w(1, cfg.radius, 1, cfg.horizon);
  const Rates rates{cfg.lambda1, cfg.lambda2};
  const std::size_t max_runs = cfg.max_runs ? cfg.max_runs : 20 * cfg.n_surviving;
  const std::size_t batch = 1024;
  const SiteIndex o = w.origin();

  DriftResult res;
  res.L = cfg.L;
  std::vector<Sample> buf;
  for (std::size_t start = 0; start < max_runs && res.surviving < cfg.n_surviving; start += batch) {
    std::size_t len = std::min(batch, max_runs - start);
    buf.assign(len, {});
    parallel_for(len, cfg.threads, [&](std::size_t i) {
      std::size_t r = start + i;
      auto h = sample_harris(w, rates, run_seed(cfg.seed, r));
      if (planted) h = plant_bifurcation(h, cfg.L, o, 0.0, run_seed(~cfg.seed, r));
      if (!reaches_level(h, o, 0.0, cfg.horizon)) return;
      buf[i].surviving = true;
      auto rp = build_renewal_point(h, cfg.L);
      if (rp.found) {
        buf[i].found = true;
        buf[i].x = rp.x[0];
      }
    });
    for (std::size_t i = 0; i < len && res.surviving < cfg.n_surviving; ++i) {
      ++res.runs;
      if (!buf[i].surviving) continue;
      ++res.surviving;
      if (buf[i].found) {
        ++res.found;
        res.x.push_back(buf[i].x);
      }
    }
  }
  if (res.x.size() >= 2) res.mean = stats::mean_ci(res.x, cfg.conf);
  bool complete = res.surviving == cfg.n_surviving && res.found == res.surviving;
  res.pass = complete && res.mean.ci.lo > 0;
  std::ostringstream os;
  if (res.surviving < cfg.n_surviving)
    os << "only " << res.surviving << " conditioned runs in " << res.runs << "; ";
  if (res.found < res.surviving)
    os << res.surviving - res.found << " conditioned runs have no renewal point before the horizon; ";
  if (res.x.size() < 2) os << "too few renewal points for an interval";
  res.note = os.str();
  return res;
}

}  // namespace

DriftResult drift_run(const DriftConfig& cfg) { return collect(cfg, false); }

DriftResult planted_drift(const DriftConfig& cfg) { return collect(cfg, true); }

LScan l_scan(const DriftConfig& cfg, const std::vector<int>& Ls, std::size_t n_runs) {
  LScan scan;
  const LatticeWindow w(1, cfg.radius, 1, cfg.horizon);
  const Rates rates{cfg.lambda1, cfg.lambda2};
  for (int L : Ls) {
    if (L < 1 || L + 1 > cfg.radius) throw std::invalid_argument("l_scan: L outside the window");
    std::vector<char> cond(n_runs, 0), found(n_runs, 0);
    std::vector<double> z(n_runs, 0.0);
    parallel_for(n_runs, cfg.threads, [&](std::size_t r) {
      auto h = sample_harris(w, rates, run_seed(cfg.seed, r));
      auto p = w.step(w.origin(), 0, L), m = w.step(w.origin(), 0, -L);
      if (!reaches_level(h, *p, 0.0, cfg.horizon) && !reaches_level(h, *m, 0.0, cfg.horizon)) return;
      cond[r] = 1;
      auto ing = build_ingredient2(h, L, Orientation::plus);
      if (ing.found) {
        found[r] = 1;
        z[r] = ing.z[0];
      }
    });
    LScanPoint pt;
    pt.L = L;
    std::vector<double> xs;
    for (std::size_t r = 0; r < n_runs; ++r) {
      pt.conditioned += static_cast<std::size_t>(cond[r]);
      if (found[r]) xs.push_back(z[r]);
    }
    pt.found = xs.size();
    if (xs.size() >= 2) pt.mean = stats::mean_ci(xs, cfg.conf);
    if (!scan.chosen && xs.size() >= 2 && pt.mean.ci.lo > 0) scan.chosen = L;
    scan.points.push_back(pt);
  }
  return scan;
}

}  // namespace mtcp::est
