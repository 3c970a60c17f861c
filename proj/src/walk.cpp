#include "mtcp/walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "mtcp/parallel.hpp"

namespace mtcp::walk {

namespace {

template <class T>
std::vector<double> normalize(std::vector<std::pair<T, double>>& v, const char* what) {
  if (v.empty()) throw std::invalid_argument(std::string(what) + ": empty support");
  double total = 0.0;
  for (auto& [x, w] : v) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument(std::string(what) + ": weights must be positive");
    total += w;
  }
  std::vector<double> cdf;
  double acc = 0.0;
  for (auto& [x, w] : v) {
    w /= total;
    acc += w;
    cdf.push_back(acc);
  }
  cdf.back() = 1.0;
  return cdf;
}

std::size_t pick(const std::vector<double>& cdf, Engine& rng) {
  double u = uniform01(rng);
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

// Per-run frequency over a seed ladder.
template <class Fn>
Frequency count_runs(std::size_t n_runs, std::uint64_t seed, int threads, Fn&& trial) {
  std::vector<char> ok(n_runs, 0);
  parallel_for(n_runs, threads, [&](std::size_t r) {
    Engine rng(run_seed(seed, r));
    ok[r] = trial(rng) ? 1 : 0;
  });
  Frequency f;
  f.n = n_runs;
  for (char c : ok) f.hits += static_cast<std::size_t>(c);
  return f;
}

const char* track_name(Track t) {
  switch (t) {
    case Track::S: return "S";
    case Track::S_plus: return "S+";
    case Track::T: return "T";
  }
  return "?";
}

}  // namespace

StepDistribution::StepDistribution(std::vector<std::pair<int, double>> x,
                                   std::vector<std::pair<double, double>> tau)
    : x_(std::move(x)), tau_(std::move(tau)) {
  x_cdf_ = normalize(x_, "X law");
  tau_cdf_ = normalize(tau_, "tau law");
  for (auto& [v, w] : tau_)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("tau law: values must be positive and finite");
  for (auto& [v, w] : x_) mu_ += v * w;
  for (auto& [v, w] : tau_) nu_ += v * w;
  if (!(mu_ > 0.0)) throw std::invalid_argument("X law: E[X] must be positive");
}

int StepDistribution::min_x() const {
  int m = x_.front().first;
  for (auto& p : x_) m = std::min(m, p.first);
  return m;
}

int StepDistribution::max_x() const {
  int m = x_.front().first;
  for (auto& p : x_) m = std::max(m, p.first);
  return m;
}

double StepDistribution::prob_x_at_least(int i) const {
  double p = 0.0;
  for (auto& [v, w] : x_)
    if (v >= i) p += w;
  return p;
}

int StepDistribution::sample_x(Engine& rng) const {
  if (x_.size() == 1) return x_[0].first;
  return x_[pick(x_cdf_, rng)].first;
}

double StepDistribution::sample_tau(Engine& rng) const {
  if (tau_.size() == 1) return tau_[0].first;
  return tau_[pick(tau_cdf_, rng)].first;
}

void Region::validate() const {
  if (std::isnan(lo) || std::isnan(hi)) throw std::invalid_argument("region: NaN end");
  if (lo > hi) throw std::invalid_argument("region: lower end above upper end");
  if (lo == hi && (lo_open || hi_open)) throw std::invalid_argument("region: empty");
  if ((std::isinf(lo) && !lo_open) || (std::isinf(hi) && !hi_open))
    throw std::invalid_argument("region: infinite end must be open");
}

Hit WalkRun::record(Track which, const Region& a) {
  Hit h = hitting_time(*this, which, a);
  hits.push_back({which, a, h});
  return h;
}

WalkRun simulate_walk(const StepDistribution& d, int x0, double t0,
                      std::size_t n_steps, std::uint64_t seed) {
  Engine rng(seed);
  WalkRun r;
  r.x0 = x0;
  r.t0 = t0;
  r.S.reserve(n_steps + 1);
  r.S_plus.reserve(n_steps + 1);
  r.T.reserve(n_steps + 1);
  r.X.reserve(n_steps);
  r.S.push_back(x0);
  r.S_plus.push_back(x0);
  r.T.push_back(t0);
  for (std::size_t n = 0; n < n_steps; ++n) {
    int x = d.sample_x(rng);
    double tau = d.sample_tau(rng);
    r.X.push_back(x);
    r.S.push_back(steer(r.S.back(), x));
    r.S_plus.push_back(r.S_plus.back() + x);
    r.T.push_back(r.T.back() + tau);
  }
  return r;
}

Hit hitting_time(const WalkRun& run, Track which, const Region& a) {
  a.validate();
  std::size_t len = run.S.size();
  for (std::size_t n = 0; n < len; ++n) {
    double v = which == Track::S        ? run.S[n]
               : which == Track::S_plus ? run.S_plus[n]
                                        : run.T[n];
    if (a.contains(v)) return {n, false};
  }
  return {len, true};
}

RenewalSum visits_to_zero(const StepDistribution& d, double tol) {
  RenewalSum out;
  const int lo = d.min_x(), hi = d.max_x();
  // Chernoff: P[Z_n = 0] <= P[Z_n <= 0] <= M(theta)^n, M(theta) = E[exp(-theta X)].
  auto log_m = [&](double th) {
    double s = 0.0;
    for (auto& [v, w] : d.x_support()) s += w * std::exp(-th * v);
    return std::log(s);
  };
  if (lo > 0) {
    out.partial = 1.0;
    out.terms = 0;
    return out;
  }
  if (lo == 0) {
    out.rho = d.prob_x_at_least(0) - d.prob_x_at_least(1);  // P[X = 0]
  } else {
    // log M is convex; bracket its minimum, then golden-section search.
    double b = 1.0;
    while (log_m(b) < log_m(b / 2)) b *= 2;
    double a = 0.0;
    const double g = (std::sqrt(5.0) - 1) / 2;
    double c1 = b - g * (b - a), c2 = a + g * (b - a);
    for (int it = 0; it < 200; ++it) {
      if (log_m(c1) < log_m(c2)) {
        b = c2;
        c2 = c1;
        c1 = b - g * (b - a);
      } else {
        a = c1;
        c1 = c2;
        c2 = a + g * (b - a);
      }
    }
    out.rho = std::exp(log_m((a + b) / 2));
  }
  if (!(out.rho < 1.0)) throw std::invalid_argument("visits_to_zero: no drift");

  // DP over Z_n on [n lo, n hi].
  std::vector<double> p{1.0};
  long offset = 0;  // index i holds Z = i + offset
  out.partial = 1.0;
  std::size_t n = 0;
  for (;;) {
    double env = std::pow(out.rho, static_cast<double>(n + 1)) / (1.0 - out.rho);
    if (env < tol) {
      out.tail_bound = env;
      break;
    }
    std::vector<double> q(p.size() + static_cast<std::size_t>(hi - lo), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 0.0) continue;
      for (auto& [v, w] : d.x_support()) q[i + static_cast<std::size_t>(v - lo)] += p[i] * w;
    }
    p.swap(q);
    offset += lo;
    ++n;
    long zero = -offset;
    if (zero >= 0 && zero < static_cast<long>(p.size())) out.partial += p[static_cast<std::size_t>(zero)];
  }
  out.terms = n;
  return out;
}

double overshoot_tail_sum(const StepDistribution& d, int x) {
  // sum_{i > x} P[X >= i] = E[(X - x)^+]
  double s = 0.0;
  for (auto& [v, w] : d.x_support())
    if (v > x) s += w * (v - x);
  return s;
}

OvershootCheck overshoot_bound_check(const StepDistribution& d, int ell, int x,
                                     std::size_t n_runs, std::uint64_t seed,
                                     int threads, std::size_t max_steps) {
  if (ell <= 0) throw std::invalid_argument("overshoot: l must be positive");
  if (x <= 0) throw std::invalid_argument("overshoot: x must be positive");
  if (n_runs == 0) throw std::invalid_argument("overshoot: n_runs must be positive");
  OvershootCheck out;
  out.n_runs = n_runs;
  out.visits = visits_to_zero(d);
  out.tail_sum = overshoot_tail_sum(d, x);
  out.rhs = out.visits.upper() * out.tail_sum;

  std::vector<signed char> res(n_runs, 0);
  parallel_for(n_runs, threads, [&](std::size_t r) {
    Engine rng(run_seed(seed, r));
    long z = 0;
    for (std::size_t n = 0; n < max_steps; ++n) {
      z += d.sample_x(rng);
      if (z >= ell) {
        res[r] = z - ell >= x ? 1 : 0;
        return;
      }
    }
    res[r] = -1;
  });
  for (auto v : res) {
    if (v == 1) ++out.events;
    if (v == -1) ++out.censored;
  }
  double p = static_cast<double>(out.events) / static_cast<double>(n_runs);
  out.lhs = p;
  out.lhs_se = std::sqrt(p * (1 - p) / static_cast<double>(n_runs));
  out.pass = out.lhs <= out.rhs + 3 * out.lhs_se;
  return out;
}

ConeResult cone_experiment(const StepDistribution& d, double beta, double ell,
                           double t, std::size_t n_runs, int x0,
                           std::uint64_t seed, int threads) {
  if (!(beta < d.beta_bar())) throw std::invalid_argument("cone: beta must be below mu/nu");
  if (!(ell > 0) || !(t >= 0)) throw std::invalid_argument("cone: need l > 0 and t >= 0");
  ConeResult out;
  out.start_in_cone = std::abs(x0) <= beta * t;
  out.box = count_runs(n_runs, seed, threads, [&](Engine& rng) {
    int s = x0;
    double tt = 0.0;
    while (tt < t) {
      s = steer(s, d.sample_x(rng));
      tt += d.sample_tau(rng);
    }
    return std::abs(s) <= ell && tt <= t + ell;
  });
  return out;
}

BoxChain box_chain(double ell, double t) {
  if (!(ell > 0) || !(t > 0)) throw std::invalid_argument("box_chain: need l, t > 0");
  BoxChain c;
  c.s.push_back(t);
  for (int i = 0; c.s.back() > 0; ++i) c.s.push_back(c.s.back() - std::pow(ell + i, 4));
  c.k = static_cast<int>(c.s.size()) - 2;
  c.times.push_back(0.0);
  for (int i = 1; i <= c.k + 1; ++i) c.times.push_back(c.s[static_cast<std::size_t>(c.k + 1 - i)]);
  for (int i = 1; i <= c.k + 1; ++i)
    c.boxes.push_back({ell + c.k + 1 - i, c.times[static_cast<std::size_t>(i)]});
  return c;
}

Frequency inside_interval(const StepDistribution& d, int m, int x0,
                          std::size_t n_runs, std::uint64_t seed, int threads) {
  if (m <= 0 || std::abs(x0) > m) throw std::invalid_argument("inside_interval: need |x0| <= m");
  const double horizon = std::pow(static_cast<double>(m), 6);
  const auto n_max = static_cast<std::size_t>(horizon);
  return count_runs(n_runs, seed, threads, [&](Engine& rng) {
    int s = x0;
    for (std::size_t n = 0; n < n_max; ++n) {
      s = steer(s, d.sample_x(rng));
      if (std::abs(s) > 2 * m) return false;
    }
    return true;
  });
}

Frequency here_to_there(const StepDistribution& d, int m, double t, int x0,
                        std::size_t n_runs, std::uint64_t seed, int threads) {
  if (m <= 0 || std::abs(x0) > m) throw std::invalid_argument("here_to_there: need |x0| <= m");
  if (!(t >= 0)) throw std::invalid_argument("here_to_there: need t >= 0");
  return count_runs(n_runs, seed, threads, [&](Engine& rng) {
    int s = x0;
    double tt = 0.0;
    while (tt < t) {
      s = steer(s, d.sample_x(rng));
      tt += d.sample_tau(rng);
    }
    return 2 * std::abs(s) <= m && tt <= t + m;
  });
}

Frequency right_line(const StepDistribution& d, double beta, double ell,
                     std::size_t n_max, std::size_t n_runs, std::uint64_t seed,
                     int threads) {
  if (!(beta < d.beta_bar())) throw std::invalid_argument("right_line: beta must be below mu/nu");
  return count_runs(n_runs, seed, threads, [&](Engine& rng) {
    long s = 0;
    double tt = 0.0;
    for (std::size_t n = 0; n < n_max; ++n) {
      s += d.sample_x(rng);
      tt += d.sample_tau(rng);
      if (static_cast<double>(s) < beta * tt - ell) return false;
    }
    return true;
  });
}

Concentration concentration(const StepDistribution& d, double eps,
                            const std::vector<std::size_t>& ns,
                            std::size_t n_runs, std::uint64_t seed, int threads) {
  if (ns.empty() || !std::is_sorted(ns.begin(), ns.end()))
    throw std::invalid_argument("concentration: n grid must be sorted and nonempty");
  const double rho = d.mean_x();
  std::vector<std::vector<char>> out(ns.size(), std::vector<char>(n_runs, 0));
  parallel_for(n_runs, threads, [&](std::size_t r) {
    Engine rng(run_seed(seed, r));
    long z = 0;
    std::size_t n = 0;
    for (std::size_t j = 0; j < ns.size(); ++j) {
      for (; n < ns[j]; ++n) z += d.sample_x(rng);
      double nn = static_cast<double>(n);
      double zz = static_cast<double>(z);
      out[j][r] = (zz < (rho - eps) * nn || zz > (rho + eps) * nn) ? 1 : 0;
    }
  });
  Concentration c;
  std::vector<double> xs;
  std::vector<std::size_t> ks, ntot;
  for (std::size_t j = 0; j < ns.size(); ++j) {
    ConcentrationPoint p;
    p.n = ns[j];
    p.outside.n = n_runs;
    for (char v : out[j]) p.outside.hits += static_cast<std::size_t>(v);
    c.points.push_back(p);
    xs.push_back(static_cast<double>(ns[j]));
    ks.push_back(p.outside.hits);
    ntot.push_back(n_runs);
  }
  c.fit = stats::log_linear_fit(xs, ks, ntot);
  return c;
}

std::string to_json(const WalkRun& run, int indent) {
  nlohmann::ordered_json j;
  j["x0"] = run.x0;
  j["t0"] = run.t0;
  j["S"] = run.S;
  j["S_plus"] = run.S_plus;
  j["T"] = run.T;
  j["X"] = run.X;
  auto& h = j["hits"] = nlohmann::ordered_json::array();
  for (const auto& rec : run.hits) {
    nlohmann::ordered_json e;
    e["track"] = track_name(rec.track);
    e["lo"] = std::isinf(rec.region.lo) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(rec.region.lo);
    e["hi"] = std::isinf(rec.region.hi) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(rec.region.hi);
    e["lo_open"] = rec.region.lo_open;
    e["hi_open"] = rec.region.hi_open;
    e["index"] = rec.hit.index;
    e["censored"] = rec.hit.censored;
    h.push_back(e);
  }
  return j.dump(indent);
}

}  // namespace mtcp::walk
