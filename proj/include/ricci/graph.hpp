#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace ricci {

using NodeId = std::uint32_t;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

double norm(Vec2 v);

// Undirected edge; stored canonically with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

using Cell = std::array<NodeId, 3>;

// Boundary-condition class tags, numbered as in the public MeshGraphNets datasets.
namespace node_type {
inline constexpr int interior = 0;
inline constexpr int obstacle = 1;
inline constexpr int inlet = 4;
inline constexpr int outlet = 5;
inline constexpr int wall = 6;
}  // namespace node_type

// Per-node geometry and physics. Every present array has length node_count.
struct NodeFields {
  std::vector<Vec2> positions;
  std::vector<Vec2> velocity;
  std::vector<int> node_type;
  std::optional<std::vector<double>> pressure;
  std::optional<std::vector<double>> density;

  std::size_t node_count() const { return positions.size(); }
  friend bool operator==(const NodeFields&, const NodeFields&) = default;
};

// Immutable simple undirected graph over mesh nodes. Edges are kept sorted
// lexicographically and adjacency lists sorted ascending, so every traversal
// order is deterministic.
class MeshGraph {
 public:
  MeshGraph() = default;

  // Edge set is the deduplicated union of the cell sides.
  static MeshGraph from_cells(NodeFields fields, std::vector<Cell> cells);

  // Explicit edge set. Cells, if given, must have all their sides in `edges`.
  static MeshGraph from_edges(NodeFields fields, std::vector<Edge> edges,
                              std::vector<Cell> cells = {});

  // Topology-only graph with zero positions and velocities, all nodes interior.
  static MeshGraph from_edges(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const { return fields_.node_count(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::span<const Edge> edges() const { return edges_; }
  std::span<const Cell> cells() const { return cells_; }
  const NodeFields& fields() const { return fields_; }

  std::span<const NodeId> neighbors(NodeId i) const {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }
  std::size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
  std::size_t max_degree() const;
  bool has_edge(NodeId a, NodeId b) const;

  // Returns a new graph. Self-pairs and pairs already present are skipped.
  MeshGraph add_edges(std::span<const Edge> pairs) const;

  // Returns a new graph without the given edges (absent pairs ignored).
  // Cells that lose a side are dropped so the cell invariant keeps holding.
  MeshGraph remove_edges(std::span<const Edge> pairs) const;

  // Same topology, replaced fields (node count must match).
  MeshGraph with_fields(NodeFields fields) const;

  // True when the edge set is exactly the set of cell sides.
  bool edges_match_cells() const;

  friend bool operator==(const MeshGraph& a, const MeshGraph& b) {
    return a.fields_ == b.fields_ && a.edges_ == b.edges_ && a.cells_ == b.cells_;
  }

 private:
  void validate_fields() const;
  void build_adjacency();

  NodeFields fields_;
  std::vector<Edge> edges_;
  std::vector<Cell> cells_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> adjacency_;
};

inline std::size_t degree(const MeshGraph& g, NodeId i) { return g.degree(i); }

// Sorted, deduplicated sides of the given cells.
std::vector<Edge> cell_edges(std::span<const Cell> cells);

// Reusable breadth-first search truncated at a hop radius. Scratch arrays are
// stamped rather than cleared, so repeated searches cost only what they visit.
class BoundedBfs {
 public:
  explicit BoundedBfs(const MeshGraph& g);

  // Runs a search from `source`; afterwards distance() answers for any node.
  // If `targets` is non-empty the search stops once all of them are reached.
  void run(NodeId source, int radius, std::span<const NodeId> targets = {});

  // Hop distance from the last source, or -1 if beyond the radius.
  int distance(NodeId node) const { return stamp_[node] == epoch_ ? dist_[node] : -1; }

  std::span<const NodeId> visited() const { return queue_; }

 private:
  const MeshGraph* graph_;
  std::vector<std::uint32_t> stamp_;
  std::vector<int> dist_;
  std::vector<NodeId> queue_;
  std::uint32_t epoch_ = 0;
};

std::map<NodeId, int> bounded_bfs_distances(const MeshGraph& g, NodeId source, int radius);

struct Components {
  std::vector<NodeId> label;  // component index per node, numbered by lowest member
  std::size_t count = 0;
};

Components connected_components(const MeshGraph& g);
bool is_connected(const MeshGraph& g);

// Sequence of frames; a static trajectory shares one topology across frames.
struct Trajectory {
  std::vector<MeshGraph> frames;
  bool static_mesh = true;

  // Throws InvalidInput when frames is empty or a static trajectory has
  // frames with differing topology or positions.
  void validate() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

}  // namespace ricci
