#include "mtcp/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mtcp {

struct LatticeWindow::Geometry {
  int dim = 1;
  int radius = 1;
  int range = 1;
  std::vector<int> coords;        // num_sites * dim
  std::vector<SiteIndex> lookup;  // dense box (2M+1)^d, -1 outside the ball
  std::vector<SiteIndex> edge_from;
  std::vector<SiteIndex> edge_to;
  std::vector<std::size_t> out_start;  // CSR over edges, grouped by source
  std::vector<std::size_t> in_start;
  std::vector<EdgeIndex> in_list;
  std::vector<EdgeIndex> out_list;  // identity: edges are grouped by source

  std::size_t box_offset(std::span<const int> x) const {
    std::size_t side = 2 * static_cast<std::size_t>(radius) + 1;
    std::size_t off = 0;
    for (int v : x) off = off * side + static_cast<std::size_t>(v + radius);
    return off;
  }
};

namespace {

void enumerate_offsets(int dim, int range, std::vector<int>& cur,
                       std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == dim) {
    int n = 0;
    for (int v : cur) n += std::abs(v);
    if (n > 0 && n <= range) out.push_back(cur);
    return;
  }
  for (int v = -range; v <= range; ++v) {
    cur.push_back(v);
    enumerate_offsets(dim, range, cur, out);
    cur.pop_back();
  }
}

}  // namespace

LatticeWindow::LatticeWindow(int dim, int radius, int range, Time horizon)
    : horizon_(horizon) {
  if (dim < 1) throw std::invalid_argument("window: dimension must be >= 1");
  if (range < 1) throw std::invalid_argument("window: range must be >= 1");
  // radius 0 is the single-site window without edges.
  if (radius != 0 && radius < range)
    throw std::invalid_argument("window: radius must be 0 or >= range");
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("window: horizon must be finite and >= 0");
  double box = std::pow(2.0 * radius + 1.0, dim);
  if (box > 5.0e7) throw std::invalid_argument("window: too many sites");

  auto geo = std::make_shared<Geometry>();
  geo->dim = dim;
  geo->radius = radius;
  geo->range = range;
  geo->lookup.assign(static_cast<std::size_t>(box), -1);

  // Lexicographic sweep of the bounding box, keeping the l1 ball.
  std::vector<int> x(dim, -radius);
  SiteIndex next = 0;
  while (true) {
    int n = 0;
    for (int v : x) n += std::abs(v);
    if (n <= radius) {
      geo->lookup[geo->box_offset(x)] = next++;
      geo->coords.insert(geo->coords.end(), x.begin(), x.end());
    }
    int k = dim - 1;
    while (k >= 0 && x[k] == radius) x[k--] = -radius;
    if (k < 0) break;
    ++x[k];
  }

  std::vector<std::vector<int>> offsets;
  std::vector<int> cur;
  enumerate_offsets(dim, range, cur, offsets);

  const std::size_t n_sites = static_cast<std::size_t>(next);
  geo->out_start.assign(n_sites + 1, 0);
  std::vector<int> y(dim);
  for (std::size_t s = 0; s < n_sites; ++s) {
    geo->out_start[s] = geo->edge_from.size();
    const int* c = &geo->coords[s * dim];
    for (const auto& off : offsets) {
      int n = 0;
      for (int k = 0; k < dim; ++k) {
        y[k] = c[k] + off[k];
        n += std::abs(y[k]);
      }
      if (n > radius) continue;
      geo->edge_from.push_back(static_cast<SiteIndex>(s));
      geo->edge_to.push_back(geo->lookup[geo->box_offset(y)]);
    }
  }
  geo->out_start[n_sites] = geo->edge_from.size();

  geo->out_list.resize(geo->edge_from.size());
  for (std::size_t e = 0; e < geo->out_list.size(); ++e)
    geo->out_list[e] = static_cast<EdgeIndex>(e);

  std::vector<std::size_t> count(n_sites + 1, 0);
  for (SiteIndex t : geo->edge_to) ++count[static_cast<std::size_t>(t) + 1];
  for (std::size_t s = 0; s < n_sites; ++s) count[s + 1] += count[s];
  geo->in_start = count;
  geo->in_list.assign(geo->edge_to.size(), 0);
  for (std::size_t e = 0; e < geo->edge_to.size(); ++e) {
    auto t = static_cast<std::size_t>(geo->edge_to[e]);
    geo->in_list[count[t]++] = static_cast<EdgeIndex>(e);
  }
  geo_ = std::move(geo);
}

int LatticeWindow::dim() const { return geo_->dim; }
int LatticeWindow::radius() const { return geo_->radius; }
int LatticeWindow::range() const { return geo_->range; }

LatticeWindow LatticeWindow::with_horizon(Time horizon) const {
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("window: horizon must be finite and >= 0");
  LatticeWindow w = *this;
  w.horizon_ = horizon;
  return w;
}

std::size_t LatticeWindow::num_sites() const {
  return geo_->coords.size() / static_cast<std::size_t>(geo_->dim);
}

std::size_t LatticeWindow::num_edges() const { return geo_->edge_from.size(); }

std::optional<SiteIndex> LatticeWindow::find(std::span<const int> x) const {
  if (static_cast<int>(x.size()) != geo_->dim) return std::nullopt;
  int n = 0;
  for (int v : x) n += std::abs(v);
  if (n > geo_->radius) return std::nullopt;
  return geo_->lookup[geo_->box_offset(x)];
}

SiteIndex LatticeWindow::index(std::span<const int> x) const {
  auto s = find(x);
  if (!s) throw std::out_of_range("site outside the lattice window");
  return *s;
}

std::span<const int> LatticeWindow::coord(SiteIndex s) const {
  if (s < 0 || static_cast<std::size_t>(s) >= num_sites())
    throw std::out_of_range("site index out of range");
  return {&geo_->coords[static_cast<std::size_t>(s) * geo_->dim],
          static_cast<std::size_t>(geo_->dim)};
}

Coord LatticeWindow::coord_vec(SiteIndex s) const {
  auto c = coord(s);
  return Coord(c.begin(), c.end());
}

int LatticeWindow::norm(SiteIndex s) const {
  int n = 0;
  for (int v : coord(s)) n += std::abs(v);
  return n;
}

SiteIndex LatticeWindow::origin() const {
  std::vector<int> zero(geo_->dim, 0);
  return index(zero);
}

bool LatticeWindow::near_boundary(SiteIndex s) const {
  return norm(s) >= geo_->radius - geo_->range;
}

std::optional<EdgeIndex> LatticeWindow::find_edge(SiteIndex from,
                                                  SiteIndex to) const {
  for (EdgeIndex e : out_edges(from))
    if (geo_->edge_to[static_cast<std::size_t>(e)] == to) return e;
  return std::nullopt;
}

SiteIndex LatticeWindow::edge_from(EdgeIndex e) const {
  return geo_->edge_from.at(static_cast<std::size_t>(e));
}

SiteIndex LatticeWindow::edge_to(EdgeIndex e) const {
  return geo_->edge_to.at(static_cast<std::size_t>(e));
}

std::span<const EdgeIndex> LatticeWindow::out_edges(SiteIndex s) const {
  auto b = geo_->out_start.at(static_cast<std::size_t>(s));
  auto e = geo_->out_start.at(static_cast<std::size_t>(s) + 1);
  return {geo_->out_list.data() + b, e - b};
}

std::span<const EdgeIndex> LatticeWindow::in_edges(SiteIndex s) const {
  auto b = geo_->in_start.at(static_cast<std::size_t>(s));
  auto e = geo_->in_start.at(static_cast<std::size_t>(s) + 1);
  return {geo_->in_list.data() + b, e - b};
}

std::optional<SiteIndex> LatticeWindow::translate(
    SiteIndex s, std::span<const int> offset) const {
  if (static_cast<int>(offset.size()) != geo_->dim)
    throw std::invalid_argument("offset dimension mismatch");
  auto c = coord(s);
  std::vector<int> y(c.begin(), c.end());
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += offset[k];
  return find(y);
}

std::optional<SiteIndex> LatticeWindow::step(SiteIndex s, int axis,
                                             int amount) const {
  if (axis < 0 || axis >= geo_->dim)
    throw std::out_of_range("axis out of range");
  auto c = coord(s);
  std::vector<int> y(c.begin(), c.end());
  y[static_cast<std::size_t>(axis)] += amount;
  return find(y);
}

bool LatticeWindow::same_geometry(const LatticeWindow& other) const {
  return geo_->dim == other.geo_->dim && geo_->radius == other.geo_->radius &&
         geo_->range == other.geo_->range;
}

bool LatticeWindow::operator==(const LatticeWindow& other) const {
  return same_geometry(other) && horizon_ == other.horizon_;
}

int l1_distance(std::span<const int> a, std::span<const int> b) {
  int n = 0;
  for (std::size_t k = 0; k < a.size() && k < b.size(); ++k)
    n += std::abs(a[k] - b[k]);
  return n;
}

}  // namespace mtcp
