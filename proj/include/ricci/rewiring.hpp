#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ricci/graph.hpp"

namespace ricci {

enum class Method { piorf, digl, sdrf, fosr, borf };
enum class FormerSelector { orc, degree, random };
enum class LatterSelector { velocity, pressure, random };
enum class Action { add, remove, both };
enum class Direction { bidirectional, to_senders, to_receivers };
enum class TrajectoryMode { per_frame, first_frame };

std::string_view to_string(Method m);
std::string_view to_string(FormerSelector f);
std::string_view to_string(LatterSelector l);
std::string_view to_string(Action a);
std::string_view to_string(Direction d);
std::string_view to_string(TrajectoryMode m);

// Inverse of to_string; throw InvalidInput on unknown names.
Method parse_method(std::string_view s);
FormerSelector parse_former(std::string_view s);
LatterSelector parse_latter(std::string_view s);
Action parse_action(std::string_view s);
Direction parse_direction(std::string_view s);
TrajectoryMode parse_mode(std::string_view s);

// Knobs of the baseline methods. Defaults are the settings the baselines are
// usually compared at (DIGL alpha 0.01 / eps 0.4, SDRF 10 iterations, FoSR
// 5 initial power rounds / 20 iterations, BORF 10 batches of +4 / -2).
struct MethodParams {
  double digl_alpha = 0.01;
  double digl_eps = 0.4;
  std::size_t sdrf_iterations = 10;
  std::size_t fosr_initial_power = 5;
  std::size_t fosr_iterations = 20;
  std::size_t borf_batches = 10;
  std::size_t borf_add_per_batch = 4;
  std::size_t borf_remove_per_batch = 2;
  double budget_seconds = 0.0;  // wall-time budget for iterative methods; 0 = none

  friend bool operator==(const MethodParams&, const MethodParams&) = default;
};

struct RewireConfig {
  Method method = Method::piorf;
  double pooling_ratio = 0.03;
  FormerSelector former = FormerSelector::orc;
  LatterSelector latter = LatterSelector::velocity;
  Action action = Action::add;
  Direction direction = Direction::bidirectional;
  bool weighted = false;
  std::uint64_t seed = 0;
  MethodParams params;
  std::size_t threads = 0;  // curvature workers; 0 = RICCI_THREADS / auto

  friend bool operator==(const RewireConfig&, const RewireConfig&) = default;
};

// Throws InvalidInput on out-of-range parameters.
void validate(const RewireConfig& cfg);

// One inserted pair. The undirected graph always gains {source, target};
// the tag says which message direction a consumer should keep:
// to_senders keeps target -> source, to_receivers keeps source -> target.
struct AddedEdge {
  NodeId source = 0;
  NodeId target = 0;
  Direction direction = Direction::bidirectional;

  friend bool operator==(const AddedEdge&, const AddedEdge&) = default;
};

struct RewireStats {
  std::size_t added = 0;
  std::size_t removed = 0;
  double seconds = 0.0;
  bool timed_out = false;
  std::size_t curvature_computations = 0;  // full-graph curvature passes
  // SDRF: (kappa before, kappa after) of the targeted edge for each addition.
  std::vector<std::pair<double, double>> improvements;
  std::string note;  // named deviation from the method's original formulation, if any

  // Equality ignores wall time.
  friend bool operator==(const RewireStats& a, const RewireStats& b) {
    return a.added == b.added && a.removed == b.removed && a.timed_out == b.timed_out &&
           a.curvature_computations == b.curvature_computations &&
           a.improvements == b.improvements && a.note == b.note;
  }
};

struct RewireResult {
  MeshGraph graph;
  std::vector<AddedEdge> added;
  std::vector<Edge> removed;
  RewireStats stats;

  friend bool operator==(const RewireResult&, const RewireResult&) = default;
};

// (g + added) - removed, as undirected pairs. This is how every method
// assembles its output graph, and how an edit log is replayed.
MeshGraph apply_edits(const MeshGraph& g, std::span<const AddedEdge> added,
                      std::span<const Edge> removed);

// Physics-informed Ollivier-Ricci flow with the configurable ablation grid:
// sources are the floor(delta |V|) lowest node curvatures (or highest
// degrees, or a seeded random draw); each source is joined to the node whose
// velocity (or pressure) differs most from its own (or a seeded random node).
// Curvature is computed once, on the input graph.
// Throws MissingField when the selected field is absent, InvalidInput when
// delta is outside (0, 1) or selects no node.
RewireResult piorf(const MeshGraph& g, const RewireConfig& cfg);

// Personalized-PageRank diffusion alpha (I - (1 - alpha) T)^-1 with T the
// self-looped symmetric normalized adjacency; every non-edge whose diffusion
// weight exceeds eps is added. Mesh edges are kept.
// Throws Disconnected for disconnected graphs.
RewireResult digl(const MeshGraph& g, double alpha, double eps);

// Curvature-guided greedy addition around the most negatively curved edge,
// using Ollivier-Ricci curvature and a deterministic argmax. No removals.
RewireResult sdrf(const MeshGraph& g, std::size_t max_iterations, double budget_seconds = 0.0,
                  std::size_t threads = 0);

// First-order spectral rewiring: adds the non-edge minimizing
// x_u x_v / sqrt((1 + d_u)(1 + d_v)) where x tracks the second eigenvector
// of the self-looped normalized adjacency. Throws Disconnected.
RewireResult fosr(const MeshGraph& g, std::size_t initial_power, std::size_t max_iterations,
                  std::uint64_t seed = 0, double budget_seconds = 0.0);

// Batch Ollivier-Ricci flow: per batch one curvature pass, then for each of
// the add_per_batch most negative edges the heaviest non-adjacent pair of
// its optimal coupling is joined, and the remove_per_batch most positive
// edges are deleted.
RewireResult borf(const MeshGraph& g, std::size_t batches, std::size_t add_per_batch,
                  std::size_t remove_per_batch, double budget_seconds = 0.0,
                  std::size_t threads = 0);

// Dispatches on cfg.method.
RewireResult rewire(const MeshGraph& g, const RewireConfig& cfg);

// per_frame: each frame rewired on its own fields and topology.
// first_frame: edits computed on frame 0 and applied to every frame; only
// valid for static trajectories (InvalidInput otherwise).
std::vector<RewireResult> rewire_trajectory(const Trajectory& t, const RewireConfig& cfg,
                                            TrajectoryMode mode);

// FoSR internals, exposed for verification.
namespace fosr_detail {

// Unit vector after `rounds` deflated power iterations from a seeded start.
std::vector<double> initial_vector(const MeshGraph& g, std::size_t rounds, std::uint64_t seed);

// One deflated power-iteration round of (I + T) on g.
void power_round(const MeshGraph& g, std::vector<double>& x);

// argmin over non-edges of x_u x_v / sqrt((1 + d_u)(1 + d_v)); false if none.
bool select_pair(const MeshGraph& g, std::span<const double> x, Edge& out);

}  // namespace fosr_detail

}  // namespace ricci
