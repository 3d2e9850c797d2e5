#pragma once

#include <cstddef>
#include <optional>

#include "ricci/graph.hpp"

namespace ricci {

struct Disk {
  Vec2 center;
  double radius = 0.0;
};

// Synthetic channel-flow mesh: a structured triangulated grid, an optional
// circular obstacle, and optional one-level refinement around it.
struct MeshSpec {
  int nx = 2;
  int ny = 2;
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  std::optional<Disk> obstacle;
  // Triangles with a vertex within this distance of the obstacle surface are
  // split into four. Ignored without an obstacle.
  std::optional<double> refine_radius;
  double inflow_speed = 1.0;
  int frames = 1;
  double time_step = 0.01;

  // Throws InvalidInput naming the offending field.
  void validate() const;
};

// Potential flow past the obstacle at free-stream speed `speed`
// (uniform (speed, 0) without one).
Vec2 potential_flow_velocity(Vec2 p, const std::optional<Disk>& obstacle, double speed);

// Free-stream speed of frame k: U (1 + 0.1 sin(2 pi k / frames)).
double frame_speed(const MeshSpec& spec, int k);

// Static-mesh trajectory with analytic velocity and Bernoulli pressure
// (unit density). Obstacle-ring nodes sit exactly on the obstacle circle.
Trajectory generate(const MeshSpec& spec);

}  // namespace ricci
