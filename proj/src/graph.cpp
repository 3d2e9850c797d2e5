#include "ricci/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ricci/errors.hpp"

namespace ricci {

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

namespace {

void check_index(NodeId i, std::size_t n, const char* what) {
  if (i >= n) {
    throw InvalidInput(std::string(what) + ": node index " + std::to_string(i) +
                       " out of range (node count " + std::to_string(n) + ")");
  }
}

void sort_unique(std::vector<Edge>& edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

}  // namespace

std::vector<Edge> cell_edges(std::span<const Cell> cells) {
  std::vector<Edge> edges;
  edges.reserve(cells.size() * 3);
  for (const Cell& c : cells) {
    edges.push_back(make_edge(c[0], c[1]));
    edges.push_back(make_edge(c[1], c[2]));
    edges.push_back(make_edge(c[0], c[2]));
  }
  sort_unique(edges);
  return edges;
}

MeshGraph MeshGraph::from_cells(NodeFields fields, std::vector<Cell> cells) {
  MeshGraph g;
  g.fields_ = std::move(fields);
  g.validate_fields();
  const std::size_t n = g.node_count();
  for (const Cell& c : cells) {
    for (NodeId v : c) check_index(v, n, "cell");
    if (c[0] == c[1] || c[1] == c[2] || c[0] == c[2]) {
      throw InvalidInput("degenerate cell (" + std::to_string(c[0]) + ", " + std::to_string(c[1]) +
                         ", " + std::to_string(c[2]) + "): repeated vertex");
    }
  }
  g.edges_ = cell_edges(cells);
  g.cells_ = std::move(cells);
  g.build_adjacency();
  return g;
}

MeshGraph MeshGraph::from_edges(NodeFields fields, std::vector<Edge> edges, std::vector<Cell> cells) {
  MeshGraph g;
  g.fields_ = std::move(fields);
  g.validate_fields();
  const std::size_t n = g.node_count();
  for (Edge& e : edges) {
    check_index(e.u, n, "edge");
    check_index(e.v, n, "edge");
    if (e.u == e.v) throw InvalidInput("self-loop on node " + std::to_string(e.u));
    e = make_edge(e.u, e.v);
  }
  sort_unique(edges);
  g.edges_ = std::move(edges);
  for (const Cell& c : cells) {
    for (NodeId v : c) check_index(v, n, "cell");
  }
  for (const Edge& e : cell_edges(cells)) {
    if (e.u == e.v || !std::binary_search(g.edges_.begin(), g.edges_.end(), e)) {
      throw InvalidInput("cell side (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                         ") missing from edge set");
    }
  }
  g.cells_ = std::move(cells);
  g.build_adjacency();
  return g;
}

MeshGraph MeshGraph::from_edges(std::size_t node_count, std::vector<Edge> edges) {
  NodeFields f;
  f.positions.assign(node_count, Vec2{});
  f.velocity.assign(node_count, Vec2{});
  f.node_type.assign(node_count, node_type::interior);
  return from_edges(std::move(f), std::move(edges));
}

void MeshGraph::validate_fields() const {
  const std::size_t n = fields_.positions.size();
  if (n > std::numeric_limits<NodeId>::max()) throw InvalidInput("too many nodes");
  if (fields_.velocity.size() != n) throw InvalidInput("velocity length differs from node count");
  if (fields_.node_type.size() != n) throw InvalidInput("node_type length differs from node count");
  if (fields_.pressure && fields_.pressure->size() != n) {
    throw InvalidInput("pressure length differs from node count");
  }
  if (fields_.density && fields_.density->size() != n) {
    throw InvalidInput("density length differs from node count");
  }
}

void MeshGraph::build_adjacency() {
  const std::size_t n = node_count();
  std::vector<std::size_t> deg(n, 0);
  for (const Edge& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  adjacency_.assign(offsets_[n], 0);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges_) adjacency_[cursor[e.u]++] = e.v;
  for (const Edge& e : edges_) adjacency_[cursor[e.v]++] = e.u;
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
  }
}

std::size_t MeshGraph::max_degree() const {
  std::size_t best = 0;
  for (std::size_t i = 0; i < node_count(); ++i) best = std::max(best, degree(static_cast<NodeId>(i)));
  return best;
}

bool MeshGraph::has_edge(NodeId a, NodeId b) const {
  if (a >= node_count() || b >= node_count()) return false;
  auto nb = neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

MeshGraph MeshGraph::add_edges(std::span<const Edge> pairs) const {
  const std::size_t n = node_count();
  std::vector<Edge> merged = edges_;
  for (const Edge& p : pairs) {
    check_index(p.u, n, "add_edges");
    check_index(p.v, n, "add_edges");
    if (p.u != p.v) merged.push_back(make_edge(p.u, p.v));
  }
  sort_unique(merged);
  MeshGraph g;
  g.fields_ = fields_;
  g.edges_ = std::move(merged);
  g.cells_ = cells_;
  g.build_adjacency();
  return g;
}

MeshGraph MeshGraph::remove_edges(std::span<const Edge> pairs) const {
  std::vector<Edge> drop;
  drop.reserve(pairs.size());
  for (const Edge& p : pairs) {
    if (p.u != p.v) drop.push_back(make_edge(p.u, p.v));
  }
  sort_unique(drop);
  auto dropped = [&](Edge e) { return std::binary_search(drop.begin(), drop.end(), e); };

  MeshGraph g;
  g.fields_ = fields_;
  g.edges_.reserve(edges_.size());
  for (const Edge& e : edges_) {
    if (!dropped(e)) g.edges_.push_back(e);
  }
  for (const Cell& c : cells_) {
    if (!dropped(make_edge(c[0], c[1])) && !dropped(make_edge(c[1], c[2])) &&
        !dropped(make_edge(c[0], c[2]))) {
      g.cells_.push_back(c);
    }
  }
  g.build_adjacency();
  return g;
}

MeshGraph MeshGraph::with_fields(NodeFields fields) const {
  if (fields.node_count() != node_count()) throw InvalidInput("with_fields: node count mismatch");
  MeshGraph g = *this;
  g.fields_ = std::move(fields);
  g.validate_fields();
  return g;
}

bool MeshGraph::edges_match_cells() const { return cell_edges(cells_) == edges_; }

BoundedBfs::BoundedBfs(const MeshGraph& g)
    : graph_(&g), stamp_(g.node_count(), 0), dist_(g.node_count(), 0) {
  queue_.reserve(64);
}

void BoundedBfs::run(NodeId source, int radius, std::span<const NodeId> targets) {
  if (source >= graph_->node_count()) throw InvalidInput("bfs: source out of range");
  if (radius < 0) throw InvalidInput("bfs: negative radius");
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  queue_.clear();
  queue_.push_back(source);
  stamp_[source] = epoch_;
  dist_[source] = 0;

  std::size_t remaining = 0;
  for (NodeId t : targets) {
    if (t != source) ++remaining;
  }
  const bool stop_early = !targets.empty();
  auto is_target = [&](NodeId v) { return std::find(targets.begin(), targets.end(), v) != targets.end(); };
  if (stop_early && remaining == 0) return;

  for (std::size_t head = 0; head < queue_.size(); ++head) {
    const NodeId u = queue_[head];
    const int du = dist_[u];
    if (du == radius) continue;
    for (NodeId w : graph_->neighbors(u)) {
      if (stamp_[w] == epoch_) continue;
      stamp_[w] = epoch_;
      dist_[w] = du + 1;
      queue_.push_back(w);
      if (stop_early && is_target(w) && --remaining == 0) return;
    }
  }
}

std::map<NodeId, int> bounded_bfs_distances(const MeshGraph& g, NodeId source, int radius) {
  BoundedBfs bfs(g);
  bfs.run(source, radius);
  std::map<NodeId, int> out;
  for (NodeId v : bfs.visited()) out.emplace(v, bfs.distance(v));
  return out;
}

Components connected_components(const MeshGraph& g) {
  const std::size_t n = g.node_count();
  constexpr NodeId unset = std::numeric_limits<NodeId>::max();
  Components c;
  c.label.assign(n, unset);
  std::vector<NodeId> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (c.label[s] != unset) continue;
    const auto id = static_cast<NodeId>(c.count++);
    c.label[s] = id;
    stack.push_back(static_cast<NodeId>(s));
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId w : g.neighbors(u)) {
        if (c.label[w] == unset) {
          c.label[w] = id;
          stack.push_back(w);
        }
      }
    }
  }
  return c;
}

bool is_connected(const MeshGraph& g) { return connected_components(g).count <= 1; }

void Trajectory::validate() const {
  if (frames.empty()) throw InvalidInput("trajectory has no frames");
  if (!static_mesh) return;
  const MeshGraph& first = frames.front();
  for (std::size_t k = 1; k < frames.size(); ++k) {
    const MeshGraph& f = frames[k];
    if (f.node_count() != first.node_count() || !std::ranges::equal(f.edges(), first.edges()) ||
        f.fields().positions != first.fields().positions) {
      throw InvalidInput("static trajectory: frame " + std::to_string(k) +
                         " differs in topology or positions from frame 0");
    }
  }
}

}  // namespace ricci
