#include "ricci/meshgen.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ricci/errors.hpp"

namespace ricci {

namespace {

struct Draft {
  std::vector<Vec2> pos;
  std::vector<char> on_obstacle;
  std::vector<Cell> cells;
};

Vec2 project_to_circle(Vec2 p, const Disk& d) {
  const Vec2 off = p - d.center;
  const double r = norm(off);
  if (r == 0.0) return {d.center.x + d.radius, d.center.y};
  return d.center + (d.radius / r) * off;
}

Draft structured_grid(const MeshSpec& s) {
  Draft d;
  const double hx = (s.x_max - s.x_min) / s.nx;
  const double hy = (s.y_max - s.y_min) / s.ny;
  auto id = [&](int i, int j) { return static_cast<NodeId>(j * (s.nx + 1) + i); };
  for (int j = 0; j <= s.ny; ++j) {
    for (int i = 0; i <= s.nx; ++i) {
      const double x = i == s.nx ? s.x_max : s.x_min + i * hx;
      const double y = j == s.ny ? s.y_max : s.y_min + j * hy;
      d.pos.push_back({x, y});
    }
  }
  d.on_obstacle.assign(d.pos.size(), 0);
  // Diagonal direction flips every row, which keeps every interior vertex at degree 6.
  for (int j = 0; j < s.ny; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      const NodeId a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), e = id(i, j + 1);
      if (j % 2 == 0) {
        d.cells.push_back({a, b, c});
        d.cells.push_back({a, c, e});
      } else {
        d.cells.push_back({a, b, e});
        d.cells.push_back({b, c, e});
      }
    }
  }
  return d;
}

void cut_obstacle(Draft& d, const Disk& disk) {
  std::vector<char> inside(d.pos.size(), 0);
  for (std::size_t i = 0; i < d.pos.size(); ++i) inside[i] = norm(d.pos[i] - disk.center) < disk.radius;
  std::vector<Cell> kept;
  for (const Cell& c : d.cells) {
    if (inside[c[0]] || inside[c[1]] || inside[c[2]]) {
      for (NodeId v : c) {
        if (!inside[v]) d.on_obstacle[v] = 1;
      }
    } else {
      kept.push_back(c);
    }
  }
  d.cells = std::move(kept);
  for (std::size_t i = 0; i < d.pos.size(); ++i) {
    if (d.on_obstacle[i]) d.pos[i] = project_to_circle(d.pos[i], disk);
  }
}

// Red refinement of marked triangles; neighbours with hanging midpoints are
// split conformingly (one midpoint: bisection to the opposite vertex, two:
// three triangles, three: regular split).
void refine_near(Draft& d, const Disk& disk, double radius) {
  auto near = [&](NodeId v) { return norm(d.pos[v] - disk.center) - disk.radius <= radius; };
  std::vector<char> red(d.cells.size(), 0);
  for (std::size_t k = 0; k < d.cells.size(); ++k) {
    const Cell& c = d.cells[k];
    red[k] = near(c[0]) || near(c[1]) || near(c[2]);
  }

  std::map<Edge, NodeId> midpoint;
  auto split = [&](NodeId a, NodeId b) {
    const Edge e = make_edge(a, b);
    auto it = midpoint.find(e);
    if (it != midpoint.end()) return it->second;
    Vec2 m = 0.5 * (d.pos[e.u] + d.pos[e.v]);
    const bool boundary = d.on_obstacle[e.u] && d.on_obstacle[e.v];
    if (boundary) m = project_to_circle(m, disk);
    const auto id = static_cast<NodeId>(d.pos.size());
    d.pos.push_back(m);
    d.on_obstacle.push_back(boundary ? 1 : 0);
    midpoint.emplace(e, id);
    return id;
  };
  for (std::size_t k = 0; k < d.cells.size(); ++k) {
    if (!red[k]) continue;
    const Cell& c = d.cells[k];
    split(c[0], c[1]);
    split(c[1], c[2]);
    split(c[2], c[0]);
  }

  auto hanging = [&](NodeId a, NodeId b) -> std::optional<NodeId> {
    auto it = midpoint.find(make_edge(a, b));
    if (it == midpoint.end()) return std::nullopt;
    return it->second;
  };

  std::vector<Cell> out;
  out.reserve(d.cells.size() * 2);
  for (std::size_t k = 0; k < d.cells.size(); ++k) {
    const Cell& c = d.cells[k];
    // Sides are (c0 c1), (c1 c2), (c2 c0) with midpoints m[0], m[1], m[2].
    std::array<std::optional<NodeId>, 3> m = {hanging(c[0], c[1]), hanging(c[1], c[2]),
                                              hanging(c[2], c[0])};
    const int count = (m[0] ? 1 : 0) + (m[1] ? 1 : 0) + (m[2] ? 1 : 0);
    if (count == 0) {
      out.push_back(c);
    } else if (count == 3) {
      out.push_back({c[0], *m[0], *m[2]});
      out.push_back({*m[0], c[1], *m[1]});
      out.push_back({*m[2], *m[1], c[2]});
      out.push_back({*m[0], *m[1], *m[2]});
    } else if (count == 1) {
      int s = m[0] ? 0 : (m[1] ? 1 : 2);
      const NodeId a = c[s], b = c[(s + 1) % 3], opp = c[(s + 2) % 3];
      out.push_back({a, *m[s], opp});
      out.push_back({*m[s], b, opp});
    } else {
      // Two split sides; the unsplit side is (c[f], c[f+1]).
      int f = !m[0] ? 0 : (!m[1] ? 1 : 2);
      const NodeId a = c[f], b = c[(f + 1) % 3], apex = c[(f + 2) % 3];
      const NodeId mb = *m[(f + 1) % 3];  // on (b, apex)
      const NodeId ma = *m[(f + 2) % 3];  // on (apex, a)
      out.push_back({ma, mb, apex});
      out.push_back({a, b, mb});
      out.push_back({a, mb, ma});
    }
  }
  d.cells = std::move(out);
}

}  // namespace

void MeshSpec::validate() const {
  if (nx < 2) throw InvalidInput("nx must be >= 2");
  if (ny < 2) throw InvalidInput("ny must be >= 2");
  if (!(x_max > x_min)) throw InvalidInput("domain: x_max must exceed x_min");
  if (!(y_max > y_min)) throw InvalidInput("domain: y_max must exceed y_min");
  if (obstacle) {
    const Disk& d = *obstacle;
    if (!(d.radius > 0.0)) throw InvalidInput("obstacle radius must be > 0");
    if (d.center.x - d.radius <= x_min || d.center.x + d.radius >= x_max ||
        d.center.y - d.radius <= y_min || d.center.y + d.radius >= y_max) {
      throw InvalidInput("obstacle does not fit inside the domain");
    }
  }
  if (refine_radius && !(*refine_radius >= 0.0)) throw InvalidInput("refine radius must be >= 0");
  if (!std::isfinite(inflow_speed)) throw InvalidInput("inflow speed must be finite");
  if (frames < 1) throw InvalidInput("frames must be >= 1");
  if (!(time_step > 0.0)) throw InvalidInput("time step must be > 0");
}

Vec2 potential_flow_velocity(Vec2 p, const std::optional<Disk>& obstacle, double speed) {
  if (!obstacle) return {speed, 0.0};
  const double x = p.x - obstacle->center.x;
  const double y = p.y - obstacle->center.y;
  const double r2 = x * x + y * y;
  if (r2 == 0.0) return {0.0, 0.0};
  const double a2 = obstacle->radius * obstacle->radius;
  const double r4 = r2 * r2;
  return {speed * (1.0 - a2 * (x * x - y * y) / r4), -2.0 * speed * a2 * x * y / r4};
}

double frame_speed(const MeshSpec& spec, int k) {
  return spec.inflow_speed * (1.0 + 0.1 * std::sin(2.0 * std::numbers::pi * k / spec.frames));
}

Trajectory generate(const MeshSpec& spec) {
  spec.validate();
  Draft d = structured_grid(spec);
  if (spec.obstacle) {
    cut_obstacle(d, *spec.obstacle);
    if (spec.refine_radius) refine_near(d, *spec.obstacle, *spec.refine_radius);
  }

  // Drop nodes no cell references and renumber densely.
  std::vector<NodeId> remap(d.pos.size(), 0);
  std::vector<char> used(d.pos.size(), 0);
  for (const Cell& c : d.cells) {
    for (NodeId v : c) used[v] = 1;
  }
  NodeFields base;
  std::vector<char> obstacle_ring;
  for (std::size_t i = 0; i < d.pos.size(); ++i) {
    if (!used[i]) continue;
    remap[i] = static_cast<NodeId>(base.positions.size());
    base.positions.push_back(d.pos[i]);
    obstacle_ring.push_back(d.on_obstacle[i]);
  }
  if (base.positions.size() < 3) throw InvalidInput("mesh has fewer than 3 nodes");
  for (Cell& c : d.cells) {
    for (NodeId& v : c) v = remap[v];
  }

  base.node_type.reserve(base.positions.size());
  for (std::size_t i = 0; i < base.positions.size(); ++i) {
    const Vec2 p = base.positions[i];
    int tag = node_type::interior;
    if (obstacle_ring[i]) {
      tag = node_type::obstacle;
    } else if (p.y == spec.y_min || p.y == spec.y_max) {
      tag = node_type::wall;
    } else if (p.x == spec.x_min) {
      tag = node_type::inlet;
    } else if (p.x == spec.x_max) {
      tag = node_type::outlet;
    }
    base.node_type.push_back(tag);
  }

  const MeshGraph topology = [&] {
    NodeFields f = base;
    f.velocity.assign(f.positions.size(), Vec2{});
    return MeshGraph::from_cells(std::move(f), d.cells);
  }();

  Trajectory t;
  t.static_mesh = true;
  for (int k = 0; k < spec.frames; ++k) {
    const double speed = frame_speed(spec, k);
    NodeFields f = base;
    std::vector<double> pressure;
    f.velocity.reserve(f.positions.size());
    for (const Vec2& p : f.positions) {
      const Vec2 w = potential_flow_velocity(p, spec.obstacle, speed);
      f.velocity.push_back(w);
      pressure.push_back(0.5 * speed * speed - 0.5 * (w.x * w.x + w.y * w.y));
    }
    f.pressure = std::move(pressure);
    t.frames.push_back(topology.with_fields(std::move(f)));
  }
  return t;
}

}  // namespace ricci
