#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mtcp/rng.hpp"
#include "mtcp/stats.hpp"

namespace mtcp::walk {

// Finite-support law of the step pair (X, tau), X and tau independent.
// Weights are normalized on construction.
class StepDistribution {
 public:
  StepDistribution(std::vector<std::pair<int, double>> x,
                   std::vector<std::pair<double, double>> tau);

  static StepDistribution deterministic(int x, double tau = 1.0) {
    return StepDistribution({{x, 1.0}}, {{tau, 1.0}});
  }

  const std::vector<std::pair<int, double>>& x_support() const { return x_; }
  const std::vector<std::pair<double, double>>& tau_support() const { return tau_; }

  double mean_x() const { return mu_; }
  double mean_tau() const { return nu_; }
  double beta_bar() const { return mu_ / nu_; }
  int min_x() const;
  int max_x() const;

  double prob_x_at_least(int i) const;

  int sample_x(Engine& rng) const;
  double sample_tau(Engine& rng) const;

 private:
  std::vector<std::pair<int, double>> x_;
  std::vector<std::pair<double, double>> tau_;
  std::vector<double> x_cdf_, tau_cdf_;
  double mu_ = 0.0, nu_ = 0.0;
};

enum class Track { S, S_plus, T };

// Interval or half-line with open/closed ends. Infinite ends are always open.
struct Region {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = true;
  bool hi_open = true;

  static Region closed(double a, double b) { return {a, b, false, false}; }
  static Region at_least(double a) { return {a, std::numeric_limits<double>::infinity(), false, true}; }
  static Region above(double a) { return {a, std::numeric_limits<double>::infinity(), true, true}; }
  static Region at_most(double b) { return {-std::numeric_limits<double>::infinity(), b, true, false}; }
  static Region below(double b) { return {-std::numeric_limits<double>::infinity(), b, true, true}; }

  bool contains(double v) const {
    return (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
  }
  // Throws std::invalid_argument for NaN ends, lo > hi, or an empty open
  // interval.
  void validate() const;
};

struct Hit {
  std::size_t index = 0;  // run length when censored
  bool censored = false;
};

struct HitRecord {
  Track track;
  Region region;
  Hit hit;
};

struct WalkRun {
  int x0 = 0;
  double t0 = 0.0;
  std::vector<int> S, S_plus, X;
  std::vector<double> T;
  std::vector<HitRecord> hits;

  std::size_t steps() const { return S.size() - 1; }
  // Computes the hitting time and stores it in hits.
  Hit record(Track which, const Region& a);
};

// n_steps steps from (x0, t0); S and S+ use the same X draws.
WalkRun simulate_walk(const StepDistribution& d, int x0, double t0,
                      std::size_t n_steps, std::uint64_t seed);

Hit hitting_time(const WalkRun& run, Track which, const Region& a);

// Reflected walk step: +x when s <= 0, -x otherwise.
inline int steer(int s, int x) { return s <= 0 ? s + x : s - x; }

struct RenewalSum {
  double partial = 0.0;     // sum of P[Z_n = 0] for n <= terms
  double tail_bound = 0.0;  // bound on the remainder
  double rho = 0.0;         // Chernoff rate inf_theta E[exp(-theta Y)]
  std::size_t terms = 0;
  double upper() const { return partial + tail_bound; }
};

// Exact DP for sum_n P[Z_n = 0] with Z the unreflected walk from 0, cut when
// the geometric envelope rho^(N+1)/(1-rho) drops below tol.
RenewalSum visits_to_zero(const StepDistribution& d, double tol = 1e-12);

// sum_{i > x} P[X >= i].
double overshoot_tail_sum(const StepDistribution& d, int x);

struct OvershootCheck {
  double lhs = 0.0;  // Monte Carlo frequency
  double lhs_se = 0.0;
  double rhs = 0.0;
  RenewalSum visits;
  double tail_sum = 0.0;
  std::size_t n_runs = 0;
  std::size_t events = 0;
  std::size_t censored = 0;  // runs that never reached l within max_steps
  bool pass = false;
};

// P[h_[l,inf) < inf, Z_h - l >= x] for the walk S+ from 0 against the
// renewal-sum bound.
OvershootCheck overshoot_bound_check(const StepDistribution& d, int ell, int x,
                                     std::size_t n_runs, std::uint64_t seed,
                                     int threads = 0,
                                     std::size_t max_steps = 100000000);

struct Frequency {
  std::size_t hits = 0;
  std::size_t n = 0;
  double value() const { return n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n); }
  stats::Interval wilson(double conf = 0.95) const { return stats::wilson(hits, n, conf); }
};

struct ConeResult {
  Frequency box;
  bool start_in_cone = true;  // |x0| <= beta t
};

// Frequency of (S, T) at h^T_[t,inf) lying in [-l, l] x [t, t + l], start
// (x0, 0). Rejects beta >= beta_bar.
ConeResult cone_experiment(const StepDistribution& d, double beta, double ell,
                           double t, std::size_t n_runs, int x0,
                           std::uint64_t seed, int threads = 0);

struct Box {
  double half_width = 0.0;  // space [-w, w], time [t, t + w]
  double t = 0.0;
};

struct BoxChain {
  std::vector<double> s;      // s_0 = t, ..., s_{k+1} <= 0
  int k = 0;
  std::vector<double> times;  // t_0 = 0 < t_1 < ... < t_{k+1} = t
  std::vector<Box> boxes;     // B_1 .. B_{k+1}; the last is the target box
};

BoxChain box_chain(double ell, double t);

// |S_0| <= m: frequency of |S_n| <= 2m for all n <= m^6.
Frequency inside_interval(const StepDistribution& d, int m, int x0,
                          std::size_t n_runs, std::uint64_t seed, int threads = 0);

// S_0 = x0 in [-m, m], T_0 = 0: frequency of landing in
// [-m/2, m/2] x [t, t + m] at h^T_[t,inf).
Frequency here_to_there(const StepDistribution& d, int m, double t, int x0,
                        std::size_t n_runs, std::uint64_t seed, int threads = 0);

// From 0: frequency of S+_n >= beta T_n - l for all n <= n_max.
Frequency right_line(const StepDistribution& d, double beta, double ell,
                     std::size_t n_max, std::size_t n_runs, std::uint64_t seed,
                     int threads = 0);

struct ConcentrationPoint {
  std::size_t n = 0;
  Frequency outside;  // Z_n outside [(rho-eps) n, (rho+eps) n]
};

struct Concentration {
  std::vector<ConcentrationPoint> points;
  stats::LinearFit fit;  // log P[outside] against n
};

Concentration concentration(const StepDistribution& d, double eps,
                            const std::vector<std::size_t>& ns,
                            std::size_t n_runs, std::uint64_t seed,
                            int threads = 0);

std::string to_json(const WalkRun& run, int indent = -1);

}  // namespace mtcp::walk
