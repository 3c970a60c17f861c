#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mtcp/ancestor.hpp"
#include "mtcp/process.hpp"

namespace mtcp {

enum class Layer { deaths, arrows, selective, trajectory, paths, ancestor, boxes, bifurcation };

const char* to_string(Layer l);
Layer parse_layer(const std::string& s);

// Sites are columns (first coordinate, the other coordinates fixed at 0),
// time runs upward. Layers are drawn in the listed order.
struct DiagramSpec {
  Time t_lo = 0.0;
  Time t_hi = -1.0;  // negative: the horizon
  int x_lo = 0, x_hi = 0;  // equal: the whole window
  std::vector<Layer> layers{Layer::deaths, Layer::arrows, Layer::selective};
  double site_px = 28.0;
  double time_px = 60.0;
};

struct StyledPath {
  InfectionPath path;
  bool dashed = false;  // free selective paths
  std::string label;
};

struct SpaceTimeBox {
  double x_lo = 0, x_hi = 0;
  Time t_lo = 0, t_hi = 0;
  std::string label;
};

struct DiagramData {
  const AugmentedHarrisSystem* system = nullptr;
  const Trajectory* trajectory = nullptr;
  std::vector<StyledPath> paths;
  std::optional<Origin> ancestor;
  std::vector<SpaceTimeBox> boxes;
  std::vector<Bifurcation> bifurcations;
  int L = 2;
};

// Throws std::invalid_argument when the ranges leave the window or a layer
// lacks its input.
std::string render_svg(const DiagramSpec& spec, const DiagramData& data);

// Heat map of a configuration on the plane of the first two coordinates.
std::string render_snapshot_svg(const Configuration& xi, double cell_px = 12.0);

}  // namespace mtcp
