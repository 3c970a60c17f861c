#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtcp/process.hpp"
#include "mtcp/stats.hpp"
#include "mtcp/walk.hpp"

namespace mtcp::est {

using walk::Frequency;

// ---------------------------------------------------------------------------
// One-type contact processes driven by a single event stream for a whole grid
// of rates: an arrow carries a uniform mark u and is used at rate lambda iff
// u < lambda / max(grid). Only sites occupied for some rate generate events,
// which is exact because events elsewhere cannot change any configuration.

struct CoupledOneTypeRun {
  std::vector<Time> death_time;  // per rate; the horizon when censored
  std::vector<char> censored;
  std::vector<char> boundary;    // reached the outer shell of the window
  // first_reach[j][r]: first time a site of norm >= r was occupied (infinity
  // if never); filled only when requested.
  std::vector<std::vector<Time>> first_reach;
};

CoupledOneTypeRun run_one_type_coupled(const LatticeWindow& w,
                                       std::span<const double> lambdas,
                                       std::span<const SiteIndex> start,
                                       std::uint64_t seed,
                                       bool track_reach = false);

struct LambdaCGridPoint {
  double lambda = 0.0;
  Frequency half;  // survival to horizon / 2
  Frequency full;  // survival to horizon
};

struct LambdaCEstimate {
  int dim = 1, range = 1, radius = 0;
  double horizon = 0.0;
  double threshold = 0.0;
  std::size_t n_runs = 0;
  std::vector<LambdaCGridPoint> curve;
  // Threshold crossings after bisection, one per horizon.
  double cross_half_lo = 0.0, cross_half_hi = 0.0;
  double cross_full_lo = 0.0, cross_full_hi = 0.0;
  double lo = 0.0, hi = 0.0;  // reported bracket
  std::string label = "finite-size, finite-time surrogate";
};

struct LambdaCConfig {
  int dim = 1, range = 1, radius = 100;
  double horizon = 200.0;
  std::vector<double> grid;
  std::size_t n_runs = 1000;
  double threshold = 0.3;
  int bisection_steps = 4;
  std::uint64_t seed = 0;
  int threads = 0;
};

// Throws std::runtime_error when the curve is not monotone beyond its
// confidence intervals (increase n_runs).
LambdaCEstimate estimate_lambda_c(const LambdaCConfig& cfg);

// ---------------------------------------------------------------------------
// Multitype ensembles.

struct InitialCondition {
  enum class Kind { all_zero, all_one, all_two, single_one_in_twos, single_one_in_empty, block, random };
  Kind kind = Kind::single_one_in_twos;
  int block_radius = 0;  // block
  State inner = 1, outer = 2;
  double p1 = 1.0 / 3, p2 = 1.0 / 3;  // random, i.i.d. per site

  Configuration build(const LatticeWindow& w, std::uint64_t seed) const;
  std::string describe() const;
};

InitialCondition parse_initial(const std::string& text);

struct MultitypeParams {
  int dim = 1, radius = 50, range = 1;
  double lambda1 = 3.0, lambda2 = 2.0;
  double horizon = 100.0;
  bool allow_equal_rates = false;
  // When set, lambda1 must exceed it (the upper end of a lambda_c bracket).
  std::optional<double> lambda_c_hi;

  LatticeWindow window() const { return LatticeWindow(dim, radius, range, horizon); }
  void validate() const;
};

struct ObservationSpec {
  bool cone = false;
  double cone_from = -1.0;  // negative: horizon / 2
  std::vector<SiteIndex> window_sites;  // histogram cell at the horizon
};

struct RunObservation {
  bool ones_half = false, ones_end = false;
  bool twos_half = false, twos_end = false;
  bool boundary = false;  // a 1 was placed on the outer shell
  double cone_slope = 0.0;
  std::uint32_t cell = 0;
};

// One run with the event stream of sample_harris(window, rates, seed); the
// final configuration equals evolve(...) on that system.
RunObservation observe_multitype(const MultitypeParams& p, const Configuration& xi0,
                                 std::uint64_t seed, const ObservationSpec& spec,
                                 Configuration* final_state = nullptr);

std::vector<RunObservation> run_ensemble(const MultitypeParams& p,
                                         const InitialCondition& init,
                                         std::size_t n_runs, std::uint64_t seed,
                                         const ObservationSpec& spec,
                                         int threads = 0);

struct SurvivalEstimate {
  MultitypeParams params;
  std::string initial;
  std::size_t n_runs = 0;
  Frequency s1_half, s1_end;  // 1's present at horizon / 2 and horizon
  Frequency s2_half, s2_end;
  stats::Interval s1_half_ci, s1_end_ci;
  // Paired difference s1(horizon / 2) - s1(horizon) on the same runs.
  stats::Interval s1_drift;
  std::size_t boundary_runs = 0;
};

SurvivalEstimate summarize_survival(const MultitypeParams& p, const InitialCondition& init,
                                    const std::vector<RunObservation>& obs);
SurvivalEstimate estimate_survival(const MultitypeParams& p, const InitialCondition& init,
                                   std::size_t n_runs, std::uint64_t seed, int threads = 0);

struct ConeEstimate {
  std::size_t survivors = 0;
  Frequency positive;  // survivors with a positive slope
  double alpha_hat = 0.0;  // low quantile of the slopes
  double quantile = 0.05;
  std::vector<double> slopes;
};

// Throws std::runtime_error when no run survives.
ConeEstimate summarize_cone(const std::vector<RunObservation>& obs, double quantile = 0.05);
ConeEstimate estimate_cone(const MultitypeParams& p, std::size_t n_runs, std::uint64_t seed,
                           int threads = 0, double quantile = 0.05);

struct ConvergenceReport {
  std::vector<SiteIndex> window_sites;
  Time t = 0.0;
  std::size_t n_runs = 0, n_reference = 0;
  std::vector<double> empirical, mu1, mu2, mixture;
  double w1 = 0.0, w2 = 0.0, w0 = 0.0;
  double tv = 0.0;
};

struct ConvergenceConfig {
  MultitypeParams params;  // horizon = t
  InitialCondition init;
  std::vector<Coord> window;  // at most 4 sites
  std::size_t n_runs = 10000;
  std::size_t n_reference = 10000;
  std::uint64_t seed = 0;
  int threads = 0;
};

ConvergenceReport complete_convergence_check(const ConvergenceConfig& cfg);

// ---------------------------------------------------------------------------
// Bound fits: the sign of a fitted exponent, never its size.

enum class Bound {
  spread_distance,       // P[reach norm > x by time t] against x (slope < 0)
  spread_time,           // the same against t (slope > 0)
  late_extinction,       // P[t < T < horizon] against t (slope < 0)
  large_set_extinction,  // P[T < horizon] against the size of the start set
  coupling_failure,      // P[x survives, level reaches y, x does not] against t
};

const char* to_string(Bound b);
Bound parse_bound(const std::string& s);

struct BoundPoint {
  double x = 0.0;
  std::size_t k = 0, n = 0;
};

struct BoundFit {
  Bound which = Bound::spread_distance;
  std::vector<BoundPoint> points;
  stats::LinearFit fit;
  bool expect_negative = true;
  double p_value = 1.0;  // one-sided, for the expected sign
  bool sign_ok = false;  // at 95%
};

struct BoundConfig {
  int dim = 1, range = 1, radius = 40;
  double lambda = 3.0;
  double horizon = 60.0;
  double fixed = 10.0;     // t for spread_distance, x for spread_time
  std::vector<double> grid;
  std::size_t n_runs = 4000;
  std::uint64_t seed = 0;
  int threads = 0;
};

BoundFit bound_fit(Bound which, const BoundConfig& cfg);

// ---------------------------------------------------------------------------
// Pathwise audit.

struct GSet {
  std::size_t n = 0;
  double u1 = 0.0, u2 = 0.0;
  // No 2 on the ball of radius u2, more than n 1's on the ball of radius u1.
  bool contains(const Configuration& xi) const;
};

struct AuditItem {
  std::string name;
  bool exact = true;
  std::size_t checks = 0;
  std::size_t violations = 0;
  bool pass = true;
  std::string detail;  // counterexample or test statistic
};

struct AuditConfig {
  MultitypeParams params{.dim = 1, .radius = 20, .range = 1, .lambda1 = 2.5, .lambda2 = 1.5, .horizon = 20.0, .lambda_c_hi = {}};
  std::size_t n_trajectories = 1000;
  std::size_t n_gset = 10000;
  std::size_t n_coupling = 200;
  std::size_t n_block = 800;        // per block size; 0 skips the trend
  std::vector<int> block_sizes{1, 2, 4, 8};
  MultitypeParams block_params{.dim = 1, .radius = 40, .range = 1, .lambda1 = 3.0, .lambda2 = 2.4, .horizon = 60.0, .lambda_c_hi = {}};
  std::uint64_t seed = 0;
  int threads = 0;
};

struct AuditReport {
  std::vector<AuditItem> items;
  bool pass() const;
  std::size_t exact_violations() const;
};

AuditReport invariant_audit(const AuditConfig& cfg);

// Inclusion checks on one trajectory after every event; returns the number
// of (time, site) violations and writes the first into detail.
std::size_t audit_trajectory(const AugmentedHarrisSystem& h, const Configuration& xi0,
                             std::size_t& checks, std::string* detail);

// ---------------------------------------------------------------------------
// Renewal drift experiments.

struct DriftConfig {
  int radius = 40;
  double lambda1 = 3.0, lambda2 = 2.4;
  double horizon = 40.0;
  int L = 2;
  std::size_t n_surviving = 10000;
  std::size_t max_runs = 0;  // 0: 20 * n_surviving
  double conf = 0.99;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct DriftResult {
  int L = 0;
  std::size_t runs = 0, surviving = 0, found = 0;
  std::vector<double> x;  // X . e1 of the found renewal points
  stats::MeanCi mean;
  bool pass = false;
  std::string note;
};

// Unplanted systems conditioned on the origin reaching the horizon.
DriftResult drift_run(const DriftConfig& cfg);
// Same, with a bifurcation pattern planted at the origin on [0, 3].
DriftResult planted_drift(const DriftConfig& cfg);

struct LScanPoint {
  int L = 0;
  std::size_t conditioned = 0;  // runs where +L e1 or -L e1 reaches the horizon
  std::size_t found = 0;
  stats::MeanCi mean;           // Z* . e1
};

struct LScan {
  std::vector<LScanPoint> points;
  std::optional<int> chosen;  // smallest L whose interval lies above 0
};

LScan l_scan(const DriftConfig& cfg, const std::vector<int>& Ls, std::size_t n_runs);

// ---------------------------------------------------------------------------

std::string to_json(const LambdaCEstimate& e, int indent = -1);
std::string to_json(const SurvivalEstimate& e, int indent = -1);
std::string to_json(const ConeEstimate& e, int indent = -1);
std::string to_json(const ConvergenceReport& r, int indent = -1);
std::string to_json(const BoundFit& f, int indent = -1);
std::string to_json(const AuditReport& r, int indent = -1);
std::string to_json(const DriftResult& r, int indent = -1);
std::string to_json(const LScan& s, int indent = -1);

}  // namespace mtcp::est
