#include "mtcp/process.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace mtcp {

Configuration::Configuration(LatticeWindow window)
    : window_(std::move(window)), states_(window_.num_sites(), 0) {}

Configuration::Configuration(LatticeWindow window, std::vector<State> states)
    : window_(std::move(window)), states_(std::move(states)) {
  if (states_.size() != window_.num_sites())
    throw std::invalid_argument("configuration size does not match window");
  for (State v : states_)
    if (v > 2) throw std::invalid_argument("states must be 0, 1 or 2");
}

Configuration Configuration::filled(const LatticeWindow& w, State v) {
  return Configuration(w, std::vector<State>(w.num_sites(), v));
}

Configuration Configuration::single(const LatticeWindow& w, SiteIndex s,
                                    State center, State rest) {
  std::vector<State> v(w.num_sites(), rest);
  v.at(static_cast<std::size_t>(s)) = center;
  return Configuration(w, std::move(v));
}

Configuration Configuration::block(const LatticeWindow& w, int m, State inner,
                                   State outer) {
  std::vector<State> v(w.num_sites(), outer);
  for (std::size_t s = 0; s < v.size(); ++s)
    if (w.norm(static_cast<SiteIndex>(s)) <= m) v[s] = inner;
  return Configuration(w, std::move(v));
}

void Configuration::set(SiteIndex s, State v) {
  if (v > 2) throw std::invalid_argument("states must be 0, 1 or 2");
  states_.at(static_cast<std::size_t>(s)) = v;
}

std::size_t Configuration::count(State v) const {
  return static_cast<std::size_t>(std::count(states_.begin(), states_.end(), v));
}

Evolver::Evolver(const AugmentedHarrisSystem& h, Configuration xi0,
                 Dynamics dynamics)
    : h_(&h), state_(std::move(xi0)), dynamics_(dynamics) {
  const auto& w = h.window();
  if (!state_.window().same_geometry(w))
    throw std::invalid_argument("configuration window differs from system");
  for (std::size_t s = 0; s < w.num_sites(); ++s) {
    State v = state_.at(static_cast<SiteIndex>(s));
    if (dynamics_ != Dynamics::multitype && v > 1)
      throw std::invalid_argument("one-type dynamics needs a 0/1 configuration");
    ++counts_[v];
    if (v != 0 && w.near_boundary(static_cast<SiteIndex>(s))) boundary_ = true;
  }
}

bool Evolver::apply(const Event& ev, Transition& tr) {
  const auto& w = h_->window();
  SiteIndex target;
  State value;
  if (ev.kind == EventKind::death) {
    target = ev.index;
    if (state_.at(target) == 0) return false;
    value = 0;
  } else {
    if (ev.kind == EventKind::selective && dynamics_ == Dynamics::one_type_lambda2)
      return false;
    SiteIndex x = w.edge_from(ev.index);
    target = w.edge_to(ev.index);
    State sx = state_.at(x);
    if (sx == 0 || state_.at(target) != 0) return false;
    if (ev.kind == EventKind::selective && sx != 1) return false;
    value = sx;
  }
  State old = state_.at(target);
  state_.set(target, value);
  --counts_[old];
  ++counts_[value];
  if (value != 0 && w.near_boundary(target)) boundary_ = true;
  tr = {ev.time, target, old, value, ev.kind};
  return true;
}

Trajectory::Trajectory(Configuration initial, std::vector<Transition> log,
                       Time end, Configuration final_state,
                       bool boundary_contact)
    : initial_(std::move(initial)),
      log_(std::move(log)),
      by_site_(initial_.window().num_sites()),
      end_(end),
      final_(std::move(final_state)),
      boundary_(boundary_contact) {
  for (std::size_t k = 0; k < log_.size(); ++k)
    by_site_[static_cast<std::size_t>(log_[k].site)].push_back(
        static_cast<std::uint32_t>(k));
}

State Trajectory::state_at(SiteIndex x, Time t, bool before) const {
  if (x < 0 || static_cast<std::size_t>(x) >= by_site_.size())
    throw std::out_of_range("state_at: site outside window");
  if (t > end_) throw std::out_of_range("state_at: time after trajectory end");
  const auto& idx = by_site_[static_cast<std::size_t>(x)];
  // Last transition at a time <= t (or < t when before).
  auto it = std::partition_point(idx.begin(), idx.end(), [&](std::uint32_t k) {
    return before ? log_[k].time < t : log_[k].time <= t;
  });
  if (it == idx.begin()) return initial_.at(x);
  return log_[*(it - 1)].new_state;
}

State Trajectory::state_at(std::span<const int> x, Time t, bool before) const {
  auto s = initial_.window().find(x);
  if (!s) throw std::out_of_range("state_at: site outside window");
  return state_at(*s, t, before);
}

Configuration Trajectory::configuration_at(Time t, bool before) const {
  Configuration c = initial_;
  for (const Transition& tr : log_) {
    if (before ? tr.time >= t : tr.time > t) break;
    c.set(tr.site, tr.new_state);
  }
  return c;
}

namespace {

Trajectory run(const Configuration& xi0, const AugmentedHarrisSystem& h,
               Dynamics dyn, Time t_end) {
  if (!(t_end <= h.horizon()))
    throw std::invalid_argument("evolve: t_end exceeds the horizon");
  if (!(t_end >= 0.0)) throw std::invalid_argument("evolve: t_end < 0");
  Evolver ev(h, xi0, dyn);
  std::vector<Transition> log;
  ev.advance_to(t_end, [&log](const Transition& tr) { log.push_back(tr); });
  return Trajectory(xi0, std::move(log), t_end, ev.state(),
                    ev.boundary_contact());
}

void write_coords(fmt::memory_buffer& buf, std::span<const int> c) {
  for (int v : c) fmt::format_to(std::back_inserter(buf), ",{}", v);
}

}  // namespace

Trajectory evolve(const Configuration& xi0, const AugmentedHarrisSystem& h,
                  Time t_end) {
  return run(xi0, h, Dynamics::multitype, t_end);
}

Trajectory evolve_one_type(const Configuration& zeta0,
                           const AugmentedHarrisSystem& h, OneTypeRate rate,
                           Time t_end) {
  return run(zeta0, h,
             rate == OneTypeRate::lambda2_only ? Dynamics::one_type_lambda2
                                               : Dynamics::one_type_lambda1,
             t_end);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto& w = traj.initial().window();
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "time");
  for (int k = 1; k <= w.dim(); ++k)
    fmt::format_to(std::back_inserter(buf), ",x{}", k);
  fmt::format_to(std::back_inserter(buf), ",old,new,cause\r\n");
  for (const Transition& tr : traj.log()) {
    fmt::format_to(std::back_inserter(buf), "{}", tr.time);
    write_coords(buf, w.coord(tr.site));
    fmt::format_to(std::back_inserter(buf), ",{},{},{}\r\n", int(tr.old_state),
                   int(tr.new_state), to_string(tr.cause));
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_snapshots_csv(std::ostream& os, const Trajectory& traj,
                         std::span<const Time> times) {
  const auto& w = traj.initial().window();
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "time");
  for (int k = 1; k <= w.dim(); ++k)
    fmt::format_to(std::back_inserter(buf), ",x{}", k);
  fmt::format_to(std::back_inserter(buf), ",state\r\n");
  for (Time t : times) {
    Configuration c = traj.configuration_at(t);
    for (std::size_t s = 0; s < w.num_sites(); ++s) {
      fmt::format_to(std::back_inserter(buf), "{}", t);
      write_coords(buf, w.coord(static_cast<SiteIndex>(s)));
      fmt::format_to(std::back_inserter(buf), ",{}\r\n",
                     int(c.at(static_cast<SiteIndex>(s))));
    }
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace mtcp
