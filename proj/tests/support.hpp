// Independent reference implementations and fixtures shared by the tests.
// Nothing here calls into the library's solvers; oracles work from first
// principles (enumeration, Floyd-Warshall, dense pseudoinverses).
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "ricci/graph.hpp"
#include "ricci/meshgen.hpp"

namespace oracle {

using ricci::Edge;
using ricci::MeshGraph;
using ricci::NodeId;

inline constexpr double inf = std::numeric_limits<double>::infinity();

// ---- graphs ----------------------------------------------------------------

inline MeshGraph path(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return MeshGraph::from_edges(n, e);
}

inline MeshGraph cycle(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i < n; ++i) e.push_back(ricci::make_edge(i, static_cast<NodeId>((i + 1) % n)));
  return MeshGraph::from_edges(n, e);
}

inline MeshGraph complete(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) e.push_back({i, j});
  return MeshGraph::from_edges(n, e);
}

inline MeshGraph star(std::size_t leaves) {
  std::vector<Edge> e;
  for (NodeId i = 1; i <= leaves; ++i) e.push_back({0, i});
  return MeshGraph::from_edges(leaves + 1, e);
}

// Triangles {0,1,2} and {3,4,5} joined by the bridge (2,3).
inline MeshGraph barbell() {
  return MeshGraph::from_edges(6, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {3, 5}, {4, 5}});
}

// Random spanning tree plus extra random edges.
inline MeshGraph random_connected(std::mt19937_64& rng, std::size_t n, std::size_t extra) {
  std::set<Edge> edges;
  for (NodeId i = 1; i < n; ++i) {
    const auto parent = static_cast<NodeId>(std::uniform_int_distribution<std::size_t>(0, i - 1)(rng));
    edges.insert(ricci::make_edge(parent, i));
  }
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  for (std::size_t k = 0; k < extra; ++k) {
    const NodeId a = pick(rng), b = pick(rng);
    if (a != b) edges.insert(ricci::make_edge(a, b));
  }
  return MeshGraph::from_edges(n, std::vector<Edge>(edges.begin(), edges.end()));
}

inline MeshGraph random_tree(std::mt19937_64& rng, std::size_t n) { return random_connected(rng, n, 0); }

// Any pair not adjacent, or false when the graph is complete.
inline bool random_non_edge(std::mt19937_64& rng, const MeshGraph& g, Edge& out) {
  std::vector<Edge> candidates;
  for (NodeId a = 0; a < g.node_count(); ++a)
    for (NodeId b = a + 1; b < g.node_count(); ++b)
      if (!g.has_edge(a, b)) candidates.push_back({a, b});
  if (candidates.empty()) return false;
  out = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
  return true;
}

// All-pairs hop distances; inf when unreachable.
inline std::vector<std::vector<double>> floyd_warshall(const MeshGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (const Edge& e : g.edges()) d[e.u][e.v] = d[e.v][e.u] = 1.0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

// ---- transport -------------------------------------------------------------

// Minimum transport cost by enumerating every basic solution: each basis is
// a spanning tree of the bipartite supply/demand graph with rows + cols - 1
// cells, whose flow is fixed by peeling leaves. Feasible bases are vertices
// of the transportation polytope, and the optimum is attained at one.
inline double enumerate_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                                  const std::vector<double>& cost) {
  const std::size_t m = supply.size(), n = demand.size(), cells = m * n, k = m + n - 1;
  double best = inf;
  std::vector<int> choose(cells, 0);
  std::fill(choose.end() - static_cast<std::ptrdiff_t>(k), choose.end(), 1);
  do {
    std::vector<std::size_t> basis;
    for (std::size_t c = 0; c < cells; ++c)
      if (choose[c]) basis.push_back(c);
    // Peel leaves: a row or column touching exactly one open cell fixes it.
    std::vector<double> rs = supply, cs = demand, flow(cells, 0.0);
    std::vector<char> open(cells, 0);
    for (std::size_t c : basis) open[c] = 1;
    std::size_t remaining = basis.size();
    bool ok = true;
    while (remaining > 0 && ok) {
      bool progressed = false;
      for (std::size_t line = 0; line < m + n && remaining > 0; ++line) {
        std::size_t only = cells, count = 0;
        for (std::size_t c : basis) {
          if (!open[c]) continue;
          const bool touches = line < m ? c / n == line : c % n == line - m;
          if (touches) {
            ++count;
            only = c;
          }
        }
        if (count != 1) continue;
        const std::size_t r = only / n, col = only % n;
        const double f = line < m ? rs[r] : cs[col];
        flow[only] = f;
        rs[r] -= f;
        cs[col] -= f;
        open[only] = 0;
        --remaining;
        progressed = true;
      }
      if (!progressed) ok = false;  // a cycle: not a tree
    }
    if (!ok) continue;
    for (double r : rs) ok = ok && std::abs(r) <= 1e-12;
    for (double c : cs) ok = ok && std::abs(c) <= 1e-12;
    for (std::size_t c : basis) ok = ok && flow[c] >= -1e-12;
    if (!ok) continue;
    double total = 0.0;
    for (std::size_t c : basis) total += flow[c] * cost[c];
    best = std::min(best, total);
  } while (std::next_permutation(choose.begin(), choose.end()));
  return best;
}

// Random rational masses summing to one: positive integers over their total.
inline std::vector<double> random_masses(std::mt19937_64& rng, std::size_t size) {
  std::uniform_int_distribution<int> w(1, 12);
  std::vector<int> raw(size);
  for (int& r : raw) r = w(rng);
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  std::vector<double> out;
  for (int r : raw) out.push_back(r / total);
  return out;
}

// ---- curvature -------------------------------------------------------------

// Ollivier-Ricci curvature of an edge from first principles: non-lazy
// random-walk measures, all-pairs hop metric, enumerated transport.
inline double orc(const MeshGraph& g, NodeId i, NodeId j) {
  const auto d = floyd_warshall(g);
  auto measure = [&](NodeId x) {
    std::vector<NodeId> s;
    for (NodeId y = 0; y < g.node_count(); ++y)
      if (g.has_edge(x, y)) s.push_back(y);
    return s;
  };
  const auto a = measure(i), b = measure(j);
  std::vector<double> sa(a.size(), 1.0 / a.size()), sb(b.size(), 1.0 / b.size()), cost;
  for (NodeId p : a)
    for (NodeId q : b) cost.push_back(d[p][q]);
  return 1.0 - enumerate_transport(sa, sb, cost) / d[i][j];
}

// ---- resistance ------------------------------------------------------------

inline Eigen::MatrixXd laplacian(const MeshGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    l(e.u, e.u) += 1.0;
    l(e.v, e.v) += 1.0;
    l(e.u, e.v) -= 1.0;
    l(e.v, e.u) -= 1.0;
  }
  return l;
}

inline Eigen::MatrixXd pseudoinverse(const MeshGraph& g) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(laplacian(g));
  cod.setThreshold(1e-10);
  return cod.pseudoInverse();
}

inline double resistance(const Eigen::MatrixXd& lp, NodeId u, NodeId v) {
  return lp(u, u) + lp(v, v) - 2.0 * lp(u, v);
}

// Explicit sum over unordered pairs.
inline double total_resistance(const MeshGraph& g) {
  const Eigen::MatrixXd lp = pseudoinverse(g);
  double total = 0.0;
  for (NodeId u = 0; u < g.node_count(); ++u)
    for (NodeId v = u + 1; v < g.node_count(); ++v) total += resistance(lp, u, v);
  return total;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle

namespace fixture {

// Cylinder-in-channel mesh with refinement around the cylinder; about 2,000
// nodes, the size of a typical CylinderFlow frame.
inline ricci::MeshSpec refined_mesh_spec() {
  ricci::MeshSpec s;
  s.nx = 72;
  s.ny = 18;
  s.x_min = 0.0;
  s.x_max = 1.6;
  s.y_min = 0.0;
  s.y_max = 0.4;
  s.obstacle = ricci::Disk{{0.4, 0.2}, 0.06};
  s.refine_radius = 0.12;
  return s;
}

// Same channel without refinement.
inline ricci::MeshSpec unrefined_mesh_spec() {
  ricci::MeshSpec s = refined_mesh_spec();
  s.refine_radius.reset();
  return s;
}

}  // namespace fixture
