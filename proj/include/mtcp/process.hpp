#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mtcp/harris.hpp"

namespace mtcp {

using State = std::uint8_t;  // 0 empty, 1 or 2 occupied by that type

class Configuration {
 public:
  explicit Configuration(LatticeWindow window);
  Configuration(LatticeWindow window, std::vector<State> states);

  static Configuration filled(const LatticeWindow& w, State v);
  // One site in state `center`, every other site in state `rest`.
  static Configuration single(const LatticeWindow& w, SiteIndex s, State center,
                              State rest);
  // State `inner` on the ball B_0(m), `outer` elsewhere.
  static Configuration block(const LatticeWindow& w, int m, State inner,
                             State outer);

  const LatticeWindow& window() const { return window_; }
  State at(SiteIndex s) const { return states_[static_cast<std::size_t>(s)]; }
  State at(std::span<const int> x) const { return at(window_.index(x)); }
  void set(SiteIndex s, State v);
  std::span<const State> states() const { return states_; }
  std::size_t count(State v) const;

  bool in_a1() const { return count(2) == 0; }
  bool in_a2() const { return count(1) == 0; }
  bool operator==(const Configuration& other) const {
    return states_ == other.states_;
  }

 private:
  LatticeWindow window_;
  std::vector<State> states_;
};

struct Transition {
  Time time;
  SiteIndex site;
  State old_state;
  State new_state;
  EventKind cause;
};

enum class Dynamics {
  multitype,         // rules with deaths, arrows and selective arrows
  one_type_lambda2,  // deaths + arrows
  one_type_lambda1,  // deaths + arrows + selective arrows
};

// Incremental sweep over the event stream. The state after advance_to(t)
// includes every event at times <= t.
class Evolver {
 public:
  Evolver(const AugmentedHarrisSystem& h, Configuration xi0,
          Dynamics dynamics = Dynamics::multitype);

  void advance_to(Time t) {
    advance_to(t, [](const Transition&) {});
  }
  template <class F>
  void advance_to(Time t, F&& on_change);
  // Applies only events strictly before t.
  template <class F>
  void advance_before(Time t, F&& on_change);

  const Configuration& state() const { return state_; }
  Time time() const { return time_; }
  std::size_t count(State v) const { return counts_[v]; }
  bool boundary_contact() const { return boundary_; }
  std::size_t next_event() const { return next_; }

 private:
  bool apply(const Event& ev, Transition& tr);

  const AugmentedHarrisSystem* h_;
  Configuration state_;
  Dynamics dynamics_;
  std::size_t next_ = 0;
  Time time_ = 0.0;
  std::size_t counts_[3] = {0, 0, 0};
  bool boundary_ = false;
};

class Trajectory {
 public:
  Trajectory(Configuration initial, std::vector<Transition> log, Time end,
             Configuration final_state, bool boundary_contact);

  const Configuration& initial() const { return initial_; }
  const Configuration& final_configuration() const { return final_; }
  std::span<const Transition> log() const { return log_; }
  Time end_time() const { return end_; }
  bool boundary_contact() const { return boundary_; }

  // xi_t(x); with before = true, xi_{t-}(x).
  State state_at(SiteIndex x, Time t, bool before = false) const;
  State state_at(std::span<const int> x, Time t, bool before = false) const;
  Configuration configuration_at(Time t, bool before = false) const;

 private:
  Configuration initial_;
  std::vector<Transition> log_;
  std::vector<std::vector<std::uint32_t>> by_site_;
  Time end_;
  Configuration final_;
  bool boundary_;
};

Trajectory evolve(const Configuration& xi0, const AugmentedHarrisSystem& h,
                  Time t_end);

enum class OneTypeRate { lambda2_only, lambda1_with_selective };

Trajectory evolve_one_type(const Configuration& zeta0,
                           const AugmentedHarrisSystem& h, OneTypeRate rate,
                           Time t_end);

// CSV exports (RFC 4180). Site coordinates occupy columns x1..xd.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_snapshots_csv(std::ostream& os, const Trajectory& traj,
                         std::span<const Time> times);

// ---- template implementation ----

template <class F>
void Evolver::advance_to(Time t, F&& on_change) {
  auto ev = h_->events();
  Transition tr{};
  while (next_ < ev.size() && ev[next_].time <= t) {
    if (apply(ev[next_], tr)) on_change(tr);
    ++next_;
  }
  if (t > time_) time_ = t;
}

template <class F>
void Evolver::advance_before(Time t, F&& on_change) {
  auto ev = h_->events();
  Transition tr{};
  while (next_ < ev.size() && ev[next_].time < t) {
    if (apply(ev[next_], tr)) on_change(tr);
    ++next_;
  }
}

}  // namespace mtcp
