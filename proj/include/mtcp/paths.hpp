#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtcp/harris.hpp"

namespace mtcp {

enum class PathMode { bip, sip };

struct Jump {
  Time time;
  SiteIndex from;
  SiteIndex to;
  bool operator==(const Jump&) const = default;
};

// Piecewise-constant path on [t1, t2], right-continuous. Jump times lie in
// (t1, t2]; reversal additionally needs them below t2.
struct InfectionPath {
  Time t1 = 0.0;
  Time t2 = 0.0;
  SiteIndex start = 0;
  std::vector<Jump> jumps;

  SiteIndex end() const { return jumps.empty() ? start : jumps.back().to; }
  SiteIndex at(Time t) const;
  SiteIndex before(Time t) const;  // gamma(t-)
  bool operator==(const InfectionPath&) const = default;
};

InfectionPath constant_path(SiteIndex x, Time t1, Time t2);

// Throws std::invalid_argument for a malformed path.
void validate_path(const LatticeWindow& w, const InfectionPath& p);

struct PathClass {
  bool is_bip = false;
  bool is_sip = false;
  bool is_fbip = false;
  bool is_fsip = false;
  bool is_rfbip = false;
  bool is_rfsip = false;
  Time epoch = 0.0;  // reference level for the free condition
  Time top = 0.0;    // reference level for the reverse-free condition
  bool operator==(const PathClass&) const = default;
};

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Forward sweep of the set reachable from sources x {s}. Deaths at s apply,
// arrows at s do not (a path cannot jump at its start time); with
// open_start, every event at s is ignored, i.e. the sources sit at s+.
class ForwardReach {
 public:
  ForwardReach(const AugmentedHarrisSystem& h, PathMode mode,
               std::span<const SiteIndex> sources, Time s,
               bool open_start = false, bool track = false);
  static ForwardReach level(const AugmentedHarrisSystem& h, PathMode mode,
                            Time s, bool track = false);

  void advance_to(Time t);      // events with time <= t
  void advance_before(Time t);  // events with time < t
  bool contains(SiteIndex x) const { return in_[static_cast<std::size_t>(x)]; }
  std::size_t size() const { return size_; }
  std::span<const char> members() const { return in_; }
  Time start_time() const { return s_; }
  std::size_t next_event() const { return next_; }
  // Smallest source index from which x is currently reachable (-1 if x is
  // not reachable).
  SiteIndex min_source(SiteIndex x) const {
    return in_[static_cast<std::size_t>(x)] ? label_[static_cast<std::size_t>(x)]
                                            : -1;
  }
  // Path from a source to (x, t) where t is the sweep position given by the
  // caller; requires track.
  InfectionPath witness(SiteIndex x, Time t) const;

 private:
  void apply(const Event& ev);

  struct Entry {
    Time time;
    SiteIndex from;
    std::int64_t parent;
  };
  const AugmentedHarrisSystem* h_;
  PathMode mode_;
  Time s_;
  bool track_;
  std::size_t next_ = 0;
  std::vector<char> in_;
  std::vector<SiteIndex> label_;
  std::size_t size_ = 0;
  std::vector<Entry> entries_;
  std::vector<std::int64_t> cur_;  // -1: present since the start
};

// Backward sweep of {x : (x, tau) ~> Z^d x {top}}, starting with every site
// at top and moving down in time.
class BackwardReach {
 public:
  BackwardReach(const AugmentedHarrisSystem& h, PathMode mode, Time top,
                bool track = false);

  // Processes every event with time > s. contains(x) then answers
  // (x, s+) ~> top; contains_closed(x, s) answers (x, s) ~> top.
  void retreat_after(Time s);
  bool contains(SiteIndex x) const { return in_[static_cast<std::size_t>(x)]; }
  bool contains_closed(SiteIndex x, Time s) const;
  std::size_t size() const { return size_; }
  Time top() const { return top_; }
  // The unique reverse-free path from (x, s) to the top level, where s is
  // the last retreat position; requires track and contains(x).
  InfectionPath witness(SiteIndex x, Time s) const;

 private:
  struct Entry {
    Time time;
    SiteIndex to;
    std::int64_t parent;
  };
  const AugmentedHarrisSystem* h_;
  PathMode mode_;
  Time top_;
  bool track_;
  std::size_t next_;  // one past the next event to process (moving down)
  std::vector<char> in_;
  std::size_t size_ = 0;
  std::vector<Entry> entries_;
  std::vector<std::int64_t> cur_;
};

struct Reachability {
  bool reachable = false;
  std::optional<InfectionPath> witness;
};

Reachability reachable(const AugmentedHarrisSystem& h,
                       std::span<const SiteIndex> sources, Time s,
                       std::span<const SiteIndex> targets, Time t,
                       PathMode mode);
Reachability reachable(const AugmentedHarrisSystem& h, SiteIndex x, Time s,
                       SiteIndex y, Time t, PathMode mode);
// (x, s) ~> Z^d x {t}
bool reaches_level(const AugmentedHarrisSystem& h, SiteIndex x, Time s, Time t,
                   PathMode mode = PathMode::bip);

struct DeathTime {
  Time value = 0.0;       // sup of reachable levels, or the horizon
  bool censored = false;  // still reachable at the horizon
};

// T^Lambda for the set lambda started at level s (default 0).
DeathTime death_time(const AugmentedHarrisSystem& h,
                     std::span<const SiteIndex> lambda, Time s = 0.0);

PathClass classify(const AugmentedHarrisSystem& h, const InfectionPath& p,
                   Time epoch);
PathClass classify(const AugmentedHarrisSystem& h, const InfectionPath& p,
                   Time epoch, Time top);

// classify(h, p, epoch, top) for many paths on one system: the two BIP sweeps
// run once here, each call is then O(jumps log events). Construction costs
// O(events x sites). Calls reuse the per-jump checks of the previous path
// where the two share leading or trailing jumps, so enumeration order is
// cheap; one instance must not be shared between threads.
class PathClassifier {
 public:
  PathClassifier(const AugmentedHarrisSystem& h, Time epoch, Time top);
  PathClass operator()(const InfectionPath& p) const;

 private:
  struct Change {
    Time time;
    char in;
  };
  // BIP-reachable from the epoch level just before s.
  bool forward_before(SiteIndex x, Time s) const;
  // (x, s+) reaches the top level by a BIP.
  bool backward_after(SiteIndex x, Time s) const;
  PathClass slow(const InfectionPath& p) const;
  struct Unit {
    bool ok, basic, free, rfree;
  };
  bool unit(const InfectionPath& p, std::size_t i, Unit& u) const;
  std::size_t first_not_before(Time t) const;

  const AugmentedHarrisSystem* h_;
  Time epoch_, top_;
  std::vector<char> fwd0_;
  std::vector<std::vector<Change>> fwd_, bwd_;
  // Per event of the stream; fwd and bwd answer the two queries for a jump
  // along that arrow.
  struct EventFlags {
    EventKind kind;
    SiteIndex from, to;
    char fwd, bwd;
  };
  std::vector<Time> times_;
  std::vector<EventFlags> flags_;
  mutable InfectionPath last_path_{};
  mutable std::vector<Unit> units_, spare_;
  mutable bool last_ok_ = false;
};

struct RepairTrace {
  int iterations = 0;
  std::vector<Time> violation_times;
};

// Unique FBIP from Z^d x {s} to (x, t) by the repair loop.
std::optional<InfectionPath> find_fbip(const AugmentedHarrisSystem& h, Time s,
                                       SiteIndex x, Time t,
                                       RepairTrace* trace = nullptr);
// Same path read off the level sweep's first-entry pointers.
std::optional<InfectionPath> fbip_direct(const AugmentedHarrisSystem& h,
                                         Time s, SiteIndex x, Time t);

// Unique RFBIP from (x, t1) to Z^d x {t2} by the reversed repair loop.
std::optional<InfectionPath> find_rfbip(const AugmentedHarrisSystem& h,
                                        SiteIndex x, Time t1, Time t2,
                                        RepairTrace* trace = nullptr);
std::optional<InfectionPath> rfbip_direct(const AugmentedHarrisSystem& h,
                                          SiteIndex x, Time t1, Time t2);
// find_fbip on reverse(h, t2), reflected back in time.
std::optional<InfectionPath> rfbip_via_reversal(const AugmentedHarrisSystem& h,
                                                SiteIndex x, Time t1, Time t2);

// gamma*(t) = gamma(u - t), with the jump convention kept right-continuous.
InfectionPath reverse_path(const InfectionPath& p, Time u);
// Same, into out (reuses its storage).
void reverse_path(const InfectionPath& p, Time u, InfectionPath& out);

InfectionPath concatenate(const InfectionPath& a, const InfectionPath& b);
// a ends at (y, r), b starts at (z, r) with y != z: the junction becomes a
// jump at time r.
InfectionPath join_by_jump(const InfectionPath& a, const InfectionPath& b);
InfectionPath translate_path(const LatticeWindow& w, const InfectionPath& p,
                             std::span<const int> dx, Time dt);
InfectionPath map_sites(const InfectionPath& p,
                        const std::vector<SiteIndex>& site_map);

inline constexpr std::size_t kDefaultEventCap = 60;
inline constexpr std::size_t kMaxEnumeratedPaths = 2000000;

// All distinct paths from sources x {s} to targets x {t}. Throws CapExceeded
// when the window [s, t] holds more than cap events.
std::vector<InfectionPath> enumerate_paths(const AugmentedHarrisSystem& h,
                                           std::span<const SiteIndex> sources,
                                           Time s,
                                           std::span<const SiteIndex> targets,
                                           Time t, PathMode mode,
                                           std::size_t cap = kDefaultEventCap);

// Calls visit on every path enumerate_paths would return, without storing
// them and without the search-tree limit. The path passed to visit is only
// valid during the call.
void for_each_path(const AugmentedHarrisSystem& h,
                   std::span<const SiteIndex> sources, Time s,
                   std::span<const SiteIndex> targets, Time t, PathMode mode,
                   std::size_t cap,
                   const std::function<void(const InfectionPath&)>& visit);

// At most `limit` paths from (x, s) to the level t, in enumeration order. No
// event cap; throws CapExceeded if the search tree grows past
// kMaxEnumeratedPaths nodes.
std::vector<InfectionPath> paths_to_level(const AugmentedHarrisSystem& h,
                                          SiteIndex x, Time s, Time t,
                                          PathMode mode, std::size_t limit);

std::vector<SiteIndex> all_sites(const LatticeWindow& w);

// Free selective reachability from sources at level s, kept alongside the
// basic reachable set from Z^d x {s}: F holds the endpoints of FSIPs.
class FreeSipSweep {
 public:
  FreeSipSweep(const AugmentedHarrisSystem& h,
               std::span<const SiteIndex> sources, Time s);
  void advance_to(Time t);
  bool in_free(SiteIndex x) const { return free_[static_cast<std::size_t>(x)]; }
  bool in_basic(SiteIndex x) const {
    return basic_[static_cast<std::size_t>(x)];
  }

 private:
  const AugmentedHarrisSystem* h_;
  std::size_t next_;
  std::vector<char> free_;
  std::vector<char> basic_;
};

std::string path_to_json(const LatticeWindow& w, const InfectionPath& p);
InfectionPath path_from_json(const LatticeWindow& w, std::string_view text);

}  // namespace mtcp
