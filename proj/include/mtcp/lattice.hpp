#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace mtcp {

using Time = double;
using SiteIndex = std::int32_t;
using EdgeIndex = std::int32_t;
using Coord = std::vector<int>;

// Finite space-time window: sites of Z^d with l1-norm <= M, directed edges
// between sites at distance in (0, R], and the horizon T_h.
class LatticeWindow {
 public:
  LatticeWindow(int dim, int radius, int range, Time horizon);

  int dim() const;
  int radius() const;
  int range() const;
  Time horizon() const { return horizon_; }
  LatticeWindow with_horizon(Time horizon) const;

  std::size_t num_sites() const;
  std::size_t num_edges() const;

  std::optional<SiteIndex> find(std::span<const int> x) const;
  // Throws std::out_of_range for sites outside the window.
  SiteIndex index(std::span<const int> x) const;
  SiteIndex index(std::initializer_list<int> x) const {
    return index(std::span<const int>(x.begin(), x.size()));
  }
  std::span<const int> coord(SiteIndex s) const;
  Coord coord_vec(SiteIndex s) const;
  int norm(SiteIndex s) const;
  SiteIndex origin() const;
  bool near_boundary(SiteIndex s) const;

  std::optional<EdgeIndex> find_edge(SiteIndex from, SiteIndex to) const;
  SiteIndex edge_from(EdgeIndex e) const;
  SiteIndex edge_to(EdgeIndex e) const;
  std::span<const EdgeIndex> out_edges(SiteIndex s) const;
  std::span<const EdgeIndex> in_edges(SiteIndex s) const;

  std::optional<SiteIndex> translate(SiteIndex s,
                                     std::span<const int> offset) const;
  // s + amount * e_axis, axis counted from 0.
  std::optional<SiteIndex> step(SiteIndex s, int axis, int amount) const;

  bool same_geometry(const LatticeWindow& other) const;
  bool operator==(const LatticeWindow& other) const;

 private:
  struct Geometry;
  std::shared_ptr<const Geometry> geo_;
  Time horizon_;
};

int l1_distance(std::span<const int> a, std::span<const int> b);

}  // namespace mtcp
