#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mtcp/lattice.hpp"
#include "mtcp/rng.hpp"

namespace mtcp {

// Sampled event times live on a dyadic grid so that u - t, t - t0 and similar
// transformations are exact in double precision (see README).
inline constexpr double kTimeTick = 0x1.0p-32;
inline constexpr double kMaxHorizon = 1048576.0;  // 2^20

struct Rates {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

enum class EventKind : std::uint8_t { death = 0, arrow = 1, selective = 2 };

const char* to_string(EventKind kind);

struct Event {
  Time time;
  std::int32_t index;  // site for deaths, edge for arrows
  EventKind kind;
};

struct SampleOptions {
  // Permit lambda1 == lambda2 (no selective arrows). Only the symmetric
  // contrast experiments use this.
  bool allow_equal_rates = false;
};

class AugmentedHarrisSystem {
 public:
  using TimeList = std::vector<Time>;

  AugmentedHarrisSystem(LatticeWindow window, Rates rates, std::uint64_t seed,
                        std::vector<TimeList> deaths,
                        std::vector<TimeList> arrows,
                        std::vector<TimeList> selective,
                        bool truncated = false);
  // Builds a system from one time-ordered event stream (strictly increasing
  // times); linear time, used by the sampler and the transforms.
  static AugmentedHarrisSystem from_events(LatticeWindow window, Rates rates,
                                           std::uint64_t seed, bool truncated,
                                           std::vector<Event> stream);

  const LatticeWindow& window() const { return window_; }
  Time horizon() const { return window_.horizon(); }
  Rates rates() const { return rates_; }
  std::uint64_t seed() const { return seed_; }
  // Set when a shift clipped part of the window away.
  bool truncated() const { return truncated_; }

  std::span<const Time> deaths(SiteIndex s) const;
  std::span<const Time> arrows(EdgeIndex e) const;
  std::span<const Time> selective(EdgeIndex e) const;
  std::span<const Time> list(EventKind kind, std::int32_t index) const;

  // Every event, strictly increasing in time.
  std::span<const Event> events() const { return stream_; }
  std::size_t first_at_or_after(Time t) const;
  std::size_t first_after(Time t) const;
  std::size_t count(EventKind kind) const;

  bool has_event_at(EventKind kind, std::int32_t index, Time t) const;
  // Any death of s in the closed interval [a, b].
  bool death_in(SiteIndex s, Time a, Time b) const;

  bool operator==(const AugmentedHarrisSystem& other) const;

 private:
  AugmentedHarrisSystem(LatticeWindow window, Rates rates, std::uint64_t seed,
                        bool truncated);

  LatticeWindow window_;
  Rates rates_;
  std::uint64_t seed_;
  bool truncated_;
  std::vector<TimeList> deaths_;
  std::vector<TimeList> arrows_;
  std::vector<TimeList> selective_;
  std::vector<Event> stream_;
};

// The event stream of sample_harris, produced one event at a time and in
// the same order, so long runs need not hold the whole system.
class HarrisStream {
 public:
  HarrisStream(const LatticeWindow& window, Rates rates, std::uint64_t seed,
               SampleOptions options = {});
  bool next(Event& out);
  double total_rate() const { return total_; }

 private:
  Engine rng_;
  Time t_ = 0.0;
  Time horizon_ = 0.0;
  double n_sites_ = 0, n_edges_ = 0, lambda2_ = 0, sel_rate_ = 0;
  double r_death_ = 0, r_arrow_ = 0, total_ = 0;
  bool done_ = false;
};

AugmentedHarrisSystem sample_harris(const LatticeWindow& window, Rates rates,
                                    std::uint64_t seed,
                                    SampleOptions options = {});

AugmentedHarrisSystem restrict_to(const AugmentedHarrisSystem& h, Time a,
                                  Time b, bool rebase = false);
AugmentedHarrisSystem shift(const AugmentedHarrisSystem& h,
                            std::span<const int> x0, Time t0);
AugmentedHarrisSystem reverse(const AugmentedHarrisSystem& h, Time u);
// i is 1-based, kappa in {-1, +1}.
AugmentedHarrisSystem reflect_psi(const AugmentedHarrisSystem& h, int i,
                                  int kappa);
Coord psi(std::span<const int> x, int i, int kappa);
SiteIndex psi_site(const LatticeWindow& w, SiteIndex s, int i, int kappa);

// Keeps each selective arrow independently with probability keep; used to
// couple systems with a common lambda2 and different lambda1.
AugmentedHarrisSystem thin_selective(const AugmentedHarrisSystem& h,
                                     double keep, std::uint64_t seed);

std::vector<Time> events_in(const AugmentedHarrisSystem& h,
                            std::span<const int> site, Time a, Time b);
std::vector<Time> events_in(const AugmentedHarrisSystem& h,
                            std::span<const int> from, std::span<const int> to,
                            EventKind kind, Time a, Time b);

std::string to_json(const AugmentedHarrisSystem& h, int indent = -1);
AugmentedHarrisSystem harris_from_json(std::string_view text);

class HarrisBuilder {
 public:
  HarrisBuilder(LatticeWindow window, Rates rates = {2.0, 1.0},
                std::uint64_t seed = 0);

  HarrisBuilder& death(std::span<const int> x, Time t);
  HarrisBuilder& arrow(std::span<const int> x, std::span<const int> y, Time t);
  HarrisBuilder& selective(std::span<const int> x, std::span<const int> y,
                           Time t);
  HarrisBuilder& death(std::initializer_list<int> x, Time t) {
    return death(std::span<const int>(x.begin(), x.size()), t);
  }
  HarrisBuilder& arrow(std::initializer_list<int> x, std::initializer_list<int> y,
                       Time t) {
    return arrow(std::span<const int>(x.begin(), x.size()),
                 std::span<const int>(y.begin(), y.size()), t);
  }
  HarrisBuilder& selective(std::initializer_list<int> x,
                           std::initializer_list<int> y, Time t) {
    return selective(std::span<const int>(x.begin(), x.size()),
                     std::span<const int>(y.begin(), y.size()), t);
  }
  // Removes every event of the given kind and index in [a, b].
  HarrisBuilder& erase(EventKind kind, std::int32_t index, Time a, Time b);

  const LatticeWindow& window() const { return window_; }
  AugmentedHarrisSystem build() const;

  static HarrisBuilder from(const AugmentedHarrisSystem& h);

 private:
  EdgeIndex edge(std::span<const int> x, std::span<const int> y) const;

  LatticeWindow window_;
  Rates rates_;
  std::uint64_t seed_;
  std::vector<AugmentedHarrisSystem::TimeList> deaths_;
  std::vector<AugmentedHarrisSystem::TimeList> arrows_;
  std::vector<AugmentedHarrisSystem::TimeList> selective_;
};

}  // namespace mtcp
