#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ricci/graph.hpp"

namespace ricci {

enum class ResistanceMethod { automatic, dense, sparse };

// Above this node count the automatic method switches from a dense
// eigendecomposition of the Laplacian to sparse grounded solves.
inline constexpr std::size_t dense_resistance_limit = 4000;

// Effective resistance between node pairs with unit-resistor edges,
// R(u, v) = L+_uu + L+_vv - 2 L+_uv. Construction does the heavy lifting
// (eigendecomposition or per-component sparse factorization); queries are cheap.
class ResistanceCalculator {
 public:
  explicit ResistanceCalculator(const MeshGraph& g, ResistanceMethod method = ResistanceMethod::automatic);
  ~ResistanceCalculator();
  ResistanceCalculator(ResistanceCalculator&&) noexcept;
  ResistanceCalculator& operator=(ResistanceCalculator&&) noexcept;

  // Throws Disconnected ("infinite resistance") across components.
  double operator()(NodeId u, NodeId v) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double effective_resistance(const MeshGraph& g, NodeId u, NodeId v);

// Sum of R(u, v) over unordered pairs, evaluated as |V| trace(L+).
// Throws Disconnected for disconnected graphs.
double total_effective_resistance(const MeshGraph& g, ResistanceMethod method = ResistanceMethod::automatic);

// Unnormalized shortest-path betweenness, each unordered pair counted once.
std::vector<double> betweenness_centrality(const MeshGraph& g);

struct Histogram {
  std::vector<double> bin_edges;  // bins + 1 boundaries
  std::vector<std::size_t> counts;

  friend bool operator==(const Histogram&, const Histogram&) = default;
};

inline constexpr double curvature_histogram_min = -2.0;
inline constexpr double curvature_histogram_max = 1.0;
inline constexpr std::size_t curvature_histogram_bins = 64;

// Uniform bins over [lo, hi]; values outside are counted in the end bins.
Histogram make_histogram(std::span<const double> values, double lo = curvature_histogram_min,
                         double hi = curvature_histogram_max, std::size_t bins = curvature_histogram_bins);

// Linear-interpolation percentile (q in [0, 100]) of unsorted values.
double percentile(std::span<const double> values, double q);

// Pearson correlation; NaN when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

struct DiagnosticsOptions {
  bool resistance = true;
  bool weighted = false;
  std::size_t threads = 0;
};

struct DiagnosticsReport {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  bool connected = true;
  std::size_t component_count = 0;
  // Absent when not requested; +infinity when the graph is disconnected.
  std::optional<double> total_effective_resistance;
  Histogram curvature_histogram;
  std::map<std::size_t, std::size_t> degree_histogram;
  double orc_degree_pearson = 0.0;
  double min_edge_curvature = 0.0;
  double p01_edge_curvature = 0.0;
  double mean_edge_curvature = 0.0;
};

DiagnosticsReport diagnose(const MeshGraph& g, const DiagnosticsOptions& opts = {});

// Signed after - before for every scalar of the report.
struct DiagnosticsDelta {
  std::optional<double> total_effective_resistance;
  double orc_degree_pearson = 0.0;
  double min_edge_curvature = 0.0;
  double p01_edge_curvature = 0.0;
  double mean_edge_curvature = 0.0;
  long long edge_count = 0;
  long long component_count = 0;
};

struct Comparison {
  DiagnosticsReport before;
  DiagnosticsReport after;
  DiagnosticsDelta delta;
};

// Throws InvalidInput when node counts differ. Both curvature histograms use
// the same bin edges.
Comparison compare(const MeshGraph& before, const MeshGraph& after, const DiagnosticsOptions& opts = {});

}  // namespace ricci
