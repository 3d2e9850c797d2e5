#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ricci/graph.hpp"
#include "ricci/transport.hpp"

namespace ricci {

// Probability measure with finite support on graph nodes.
struct LocalMeasure {
  std::vector<NodeId> support;
  std::vector<double> mass;

  // Throws InvalidInput unless masses are >= 0, sum to 1 (1e-12), and the
  // support is duplicate-free and aligned with the masses.
  void validate() const;
};

// Uniform mass 1/deg(i) on each neighbour of i, nothing on i itself.
// Throws InvalidInput for an isolated node.
LocalMeasure random_walk_measure(const MeshGraph& g, NodeId i);

// Ground distance between two nodes; +infinity when unreachable.
using GroundDistance = std::function<double(NodeId, NodeId)>;

// Optimal coupling between mu (rows) and nu (columns).
// Throws TransportError ("infinite transport cost") if any support pair is
// unreachable under `ground`.
TransportPlan optimal_coupling(const LocalMeasure& mu, const LocalMeasure& nu,
                               const GroundDistance& ground);

double wasserstein1(const LocalMeasure& mu, const LocalMeasure& nu, const GroundDistance& ground);

// Additive constant on velocity-difference edge lengths in weighted mode.
inline constexpr double weighted_length_epsilon = 1e-9;

// Length of edge (u, v) in weighted mode: |w_u - w_v| + epsilon.
double weighted_edge_length(const MeshGraph& g, NodeId u, NodeId v);

// Everything computed for one edge's curvature, including the transport plan
// between the two random-walk measures (rows: mu of e.u, columns: mu of e.v).
struct EdgeCurvatureDetail {
  Edge edge;
  double kappa = 0.0;
  double distance = 1.0;  // d(u, v)
  LocalMeasure source;
  LocalMeasure target;
  TransportPlan plan;
};

// Ollivier-Ricci curvature 1 - W1(m_i, m_j) / d(i, j) of an existing edge.
// Unweighted: hop metric from radius-3 BFS. Weighted: shortest paths with
// velocity-difference edge lengths. Throws InvalidInput if the edge is absent.
double edge_orc(const MeshGraph& g, NodeId i, NodeId j, bool weighted = false);
EdgeCurvatureDetail edge_orc_detail(const MeshGraph& g, NodeId i, NodeId j, bool weighted = false);

// Mean curvature over the node's incident edges. Throws for isolated nodes.
double node_orc(const MeshGraph& g, NodeId i, bool weighted = false);

struct CurvatureReport {
  std::vector<Edge> edges;                           // lexicographic, same as the graph
  std::vector<double> edge_curvature;                // aligned with edges
  std::vector<std::optional<double>> node_curvature;  // empty for isolated nodes
  bool weighted = false;

  // Curvature of an edge of the analysed graph; throws if absent.
  double kappa(NodeId i, NodeId j) const;
};

// Curvature of every edge and every non-isolated node. Edges are evaluated
// independently on up to `threads` workers (0 = RICCI_THREADS / auto); the
// result does not depend on the worker count.
CurvatureReport full_report(const MeshGraph& g, bool weighted = false, std::size_t threads = 0);

// Number of full_report calls made by this process so far.
std::uint64_t full_report_invocations();

// Unweighted, non-augmented Forman curvature 4 - deg(i) - deg(j).
double forman_curvature(const MeshGraph& g, NodeId i, NodeId j);

}  // namespace ricci
