#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mtcp/paths.hpp"

namespace mtcp {

// Space-time origin for ancestor computations; renewal constructions on a
// shifted system are evaluated in place by moving the origin instead of
// materializing the shift.
struct Origin {
  SiteIndex site = -1;  // negative: the lattice origin of the window
  Time time = 0.0;
};

Origin resolve(const LatticeWindow& w, Origin o);

// eta^{(x,s)}_t, or nullopt for the cemetery state.
std::optional<SiteIndex> ancestor_at(const AugmentedHarrisSystem& h,
                                     SiteIndex x, Time s, Time t);

struct AncestorTrack {
  Origin origin;
  std::vector<Time> times;
  std::vector<std::optional<SiteIndex>> values;
};

AncestorTrack ancestor_track(const AugmentedHarrisSystem& h, Origin o,
                             std::span<const Time> times);

struct Bifurcation {
  Time time = 0.0;   // t, absolute
  SiteIndex pivot = 0;  // y = eta_{t-3}
  Time t_minus = 0.0;   // arrow y -> y - e1
  Time t_plus = 0.0;    // arrow y -> y + e1
};

// The seven local conditions in order, then "eta_{t-3} = y and the origin
// reaches level t". Conditions whose geometry leaves the window are false.
using BifurcationChecks = std::array<bool, 8>;

BifurcationChecks check_bifurcation(const AugmentedHarrisSystem& h, int L,
                                    Origin o, SiteIndex y, Time t);

// Bifurcation times of the ancestor of the origin at or after t_min (times
// relative to the origin must be >= 3). One record per local pattern: the
// smallest qualifying candidate time inside it. With first_only the scan
// stops at the earliest one.
std::vector<Bifurcation> find_bifurcations(const AugmentedHarrisSystem& h,
                                           int L, Origin o = {},
                                           Time t_min = 0.0,
                                           bool first_only = false);
std::optional<Bifurcation> first_bifurcation(const AugmentedHarrisSystem& h,
                                             int L, Origin o, Time t_min);

struct LadderStep {
  Time u = 0.0;
  SiteIndex y = 0;
  Time v = 0.0;
  bool v_censored = false;  // the pair survived to the horizon
};

struct Ingredient1 {
  bool found = false;
  Time u_star = 0.0;
  SiteIndex y_star = 0;
  Bifurcation bifurcation;
  std::vector<LadderStep> ladder;
  std::string reason;  // why nothing was found
};

Ingredient1 build_ingredient1(const AugmentedHarrisSystem& h, int L,
                              Origin o = {});

enum class Orientation { plus, minus };

struct PairStep {
  SiteIndex z = 0;  // absolute site
  Time w = 0.0;     // absolute time
};

struct Ingredient2 {
  bool found = false;
  SiteIndex z_site = 0;  // absolute site of Z*
  Time w_time = 0.0;     // absolute time of W*
  Coord z;               // Z* relative to the origin
  Time w = 0.0;          // W* relative to the origin
  std::vector<PairStep> ladder;  // (Z_k, W_k), k >= 1
  std::string reason;
};

// (Z*, W*) for the system seen from origin o; the minus orientation swaps
// the roles of +L e1 and -L e1 and is reported in the original coordinates.
Ingredient2 build_ingredient2(const AugmentedHarrisSystem& h, int L,
                              Orientation orient, Origin o = {});

struct RenewalPoint {
  bool found = false;
  std::string reason;
  SiteIndex x_site = 0;  // absolute
  Time t_abs = 0.0;
  Coord x;   // X relative to the origin
  Time t = 0.0;  // T relative to the origin
  int case_tag = 0;
  bool selective_event = false;  // E
  std::optional<Time> t_plus_sel;
  Ingredient1 ing1;
  Ingredient2 ing2;
  Orientation orientation = Orientation::plus;
  std::optional<InfectionPath> witness;
};

RenewalPoint build_renewal_point(const AugmentedHarrisSystem& h, int L,
                                 Origin o = {});

// (X^{i,kappa}, T^{i,kappa}) seen from origin o, mapped back to the
// coordinates of h.
RenewalPoint reflected_renewal_point(const AugmentedHarrisSystem& h, int L,
                                     Origin o, int i, int kappa);

struct SteeredStep {
  SiteIndex site = 0;
  Time time = 0.0;
  Coord s;
  std::vector<int> kappa;       // used to move from this step to the next
  std::vector<int> case_tags;   // one per coordinate move
};

struct SteeredSequence {
  std::vector<SteeredStep> steps;  // steps[0] is (x, 0)
  InfectionPath witness;           // RFSIP from (x, 0) to the last step
  bool truncated = false;
  std::string reason;
};

SteeredSequence steered_sequence(const AugmentedHarrisSystem& h, int L,
                                 SiteIndex x, int depth);

// Overwrites the events near `center` in [t0, t0 + 3] with a bifurcation
// pattern for the given L; arrow times, deaths and path timings are drawn
// from rng. Used by the planted-bifurcation diagnostics.
AugmentedHarrisSystem plant_bifurcation(const AugmentedHarrisSystem& h, int L,
                                        SiteIndex center, Time t0,
                                        std::uint64_t seed);

std::string renewal_to_json(const AugmentedHarrisSystem& h, int L,
                            const RenewalPoint& r);
std::string steered_to_json(const AugmentedHarrisSystem& h, int L,
                            const SteeredSequence& s);

}  // namespace mtcp
