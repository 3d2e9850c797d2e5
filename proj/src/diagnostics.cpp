#include "ricci/diagnostics.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ricci/curvature.hpp"
#include "ricci/errors.hpp"

namespace ricci {

namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();

Eigen::MatrixXd dense_laplacian(const MeshGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    lap(e.u, e.u) += 1.0;
    lap(e.v, e.v) += 1.0;
    lap(e.u, e.v) -= 1.0;
    lap(e.v, e.u) -= 1.0;
  }
  return lap;
}

double eigen_cutoff(const Eigen::VectorXd& values) {
  const double top = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
  return 1e-10 * std::max(1.0, top);
}

// Reduced Laplacian of one component with its lowest node grounded.
struct GroundedComponent {
  std::vector<NodeId> nodes;             // sorted; nodes[0] is the ground
  std::vector<Eigen::Index> local;       // global -> reduced index, -1 for ground/outside
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
};

void factor_component(const MeshGraph& g, const std::vector<NodeId>& label, NodeId id,
                      GroundedComponent& gc) {
  gc.local.assign(g.node_count(), -1);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (label[i] == id) gc.nodes.push_back(static_cast<NodeId>(i));
  }
  Eigen::Index next = 0;
  for (std::size_t k = 1; k < gc.nodes.size(); ++k) gc.local[gc.nodes[k]] = next++;
  if (next == 0) return;
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t k = 1; k < gc.nodes.size(); ++k) {
    const NodeId u = gc.nodes[k];
    trip.emplace_back(gc.local[u], gc.local[u], static_cast<double>(g.degree(u)));
    for (NodeId w : g.neighbors(u)) {
      if (gc.local[w] >= 0) trip.emplace_back(gc.local[u], gc.local[w], -1.0);
    }
  }
  Eigen::SparseMatrix<double> m(next, next);
  m.setFromTriplets(trip.begin(), trip.end());
  gc.solver.compute(m);
  if (gc.solver.info() != Eigen::Success) throw Error("resistance: grounded Laplacian factorization failed");
}

}  // namespace

struct ResistanceCalculator::Impl {
  Components components;
  bool dense = true;
  Eigen::MatrixXd pinv;
  std::vector<std::unique_ptr<GroundedComponent>> grounded;
};

ResistanceCalculator::ResistanceCalculator(const MeshGraph& g, ResistanceMethod method)
    : impl_(std::make_unique<Impl>()) {
  impl_->components = connected_components(g);
  impl_->dense = method == ResistanceMethod::dense ||
                 (method == ResistanceMethod::automatic && g.node_count() <= dense_resistance_limit);
  if (impl_->dense) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_laplacian(g));
    const Eigen::VectorXd& lambda = es.eigenvalues();
    const double cut = eigen_cutoff(lambda);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      if (lambda[k] > cut) inv[k] = 1.0 / lambda[k];
    }
    impl_->pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  } else {
    impl_->grounded.resize(impl_->components.count);
    for (std::size_t c = 0; c < impl_->components.count; ++c) {
      impl_->grounded[c] = std::make_unique<GroundedComponent>();
      factor_component(g, impl_->components.label, static_cast<NodeId>(c), *impl_->grounded[c]);
    }
  }
}

ResistanceCalculator::~ResistanceCalculator() = default;
ResistanceCalculator::ResistanceCalculator(ResistanceCalculator&&) noexcept = default;
ResistanceCalculator& ResistanceCalculator::operator=(ResistanceCalculator&&) noexcept = default;

double ResistanceCalculator::operator()(NodeId u, NodeId v) const {
  const auto& label = impl_->components.label;
  if (u >= label.size() || v >= label.size()) throw InvalidInput("resistance: node out of range");
  if (u == v) return 0.0;
  if (label[u] != label[v]) {
    throw Disconnected("infinite resistance between nodes " + std::to_string(u) + " and " +
                       std::to_string(v));
  }
  if (impl_->dense) {
    const auto& p = impl_->pinv;
    return p(u, u) + p(v, v) - 2.0 * p(u, v);
  }
  GroundedComponent& gc = *impl_->grounded[label[u]];
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(gc.nodes.size() - 1));
  if (gc.local[u] >= 0) rhs[gc.local[u]] += 1.0;
  if (gc.local[v] >= 0) rhs[gc.local[v]] -= 1.0;
  const Eigen::VectorXd x = gc.solver.solve(rhs);
  double r = 0.0;
  if (gc.local[u] >= 0) r += x[gc.local[u]];
  if (gc.local[v] >= 0) r -= x[gc.local[v]];
  return r;
}

double effective_resistance(const MeshGraph& g, NodeId u, NodeId v) {
  if (u >= g.node_count() || v >= g.node_count()) throw InvalidInput("resistance: node out of range");
  if (u == v) return 0.0;
  return ResistanceCalculator(g)(u, v);
}

double total_effective_resistance(const MeshGraph& g, ResistanceMethod method) {
  const std::size_t n = g.node_count();
  if (n <= 1) return 0.0;
  const Components comp = connected_components(g);
  if (comp.count > 1) throw Disconnected("total effective resistance is infinite: graph is disconnected");

  const bool dense = method == ResistanceMethod::dense ||
                     (method == ResistanceMethod::automatic && n <= dense_resistance_limit);
  if (dense) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_laplacian(g), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& lambda = es.eigenvalues();
    const double cut = eigen_cutoff(lambda);
    double trace = 0.0;
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      if (lambda[k] > cut) trace += 1.0 / lambda[k];
    }
    return static_cast<double>(n) * trace;
  }

  // Grounded inverse G: sum_{u<v} R(u, v) = n tr(G) - 1' G 1.
  GroundedComponent gc;
  factor_component(g, comp.label, 0, gc);
  const auto m = static_cast<Eigen::Index>(n - 1);
  double trace = 0.0;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    e[k] = 1.0;
    trace += gc.solver.solve(e)[k];
    e[k] = 0.0;
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
  const double mass = ones.dot(gc.solver.solve(ones));
  return static_cast<double>(n) * trace - mass;
}

std::vector<double> betweenness_centrality(const MeshGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<double> bc(n, 0.0);
  std::vector<double> sigma(n);
  std::vector<double> delta(n);
  std::vector<int> dist(n);
  std::vector<NodeId> order;
  order.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    order.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    order.push_back(static_cast<NodeId>(s));
    for (std::size_t head = 0; head < order.size(); ++head) {
      const NodeId u = order[head];
      for (NodeId w : g.neighbors(u)) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          order.push_back(w);
        }
        if (dist[w] == dist[u] + 1) sigma[w] += sigma[u];
      }
    }
    for (std::size_t k = order.size(); k-- > 1;) {
      const NodeId w = order[k];
      for (NodeId u : g.neighbors(w)) {
        if (dist[u] == dist[w] - 1) delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w]);
      }
      bc[w] += delta[w];
    }
  }
  for (double& b : bc) b *= 0.5;
  return bc;
}

Histogram make_histogram(std::span<const double> values, double lo, double hi, std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw InvalidInput("histogram: invalid range or bin count");
  Histogram h;
  h.bin_edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t k = 0; k <= bins; ++k) h.bin_edges[k] = lo + width * static_cast<double>(k);
  h.bin_edges[bins] = hi;
  h.counts.assign(bins, 0);
  for (double v : values) {
    double pos = std::floor((v - lo) / width);
    pos = std::clamp(pos, 0.0, static_cast<double>(bins - 1));
    ++h.counts[static_cast<std::size_t>(pos)];
  }
  return h;
}

double percentile(std::span<const double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] + (s[hi] - s[lo]) * frac;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidInput("pearson: length mismatch");
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

DiagnosticsReport diagnose(const MeshGraph& g, const DiagnosticsOptions& opts) {
  DiagnosticsReport r;
  r.node_count = g.node_count();
  r.edge_count = g.edge_count();
  const Components comp = connected_components(g);
  r.component_count = comp.count;
  r.connected = comp.count <= 1;
  if (opts.resistance) {
    r.total_effective_resistance = r.connected ? total_effective_resistance(g) : infinity;
  }

  for (std::size_t i = 0; i < g.node_count(); ++i) ++r.degree_histogram[g.degree(static_cast<NodeId>(i))];

  const CurvatureReport curv = full_report(g, opts.weighted, opts.threads);
  r.curvature_histogram = make_histogram(curv.edge_curvature);
  if (!curv.edge_curvature.empty()) {
    r.min_edge_curvature = *std::min_element(curv.edge_curvature.begin(), curv.edge_curvature.end());
    r.p01_edge_curvature = percentile(curv.edge_curvature, 1.0);
    r.mean_edge_curvature = std::accumulate(curv.edge_curvature.begin(), curv.edge_curvature.end(), 0.0) /
                            static_cast<double>(curv.edge_curvature.size());
  }
  std::vector<double> gamma;
  std::vector<double> deg;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (!curv.node_curvature[i]) continue;
    gamma.push_back(*curv.node_curvature[i]);
    deg.push_back(static_cast<double>(g.degree(static_cast<NodeId>(i))));
  }
  r.orc_degree_pearson = pearson(gamma, deg);
  return r;
}

Comparison compare(const MeshGraph& before, const MeshGraph& after, const DiagnosticsOptions& opts) {
  if (before.node_count() != after.node_count()) {
    throw InvalidInput("compare: node counts differ (" + std::to_string(before.node_count()) + " vs " +
                       std::to_string(after.node_count()) + ")");
  }
  Comparison c;
  c.before = diagnose(before, opts);
  c.after = diagnose(after, opts);
  if (c.before.total_effective_resistance && c.after.total_effective_resistance) {
    const double a = *c.after.total_effective_resistance;
    const double b = *c.before.total_effective_resistance;
    // inf - inf stays undefined; report it as absent.
    if (std::isfinite(a) || std::isfinite(b)) c.delta.total_effective_resistance = a - b;
  }
  c.delta.orc_degree_pearson = c.after.orc_degree_pearson - c.before.orc_degree_pearson;
  c.delta.min_edge_curvature = c.after.min_edge_curvature - c.before.min_edge_curvature;
  c.delta.p01_edge_curvature = c.after.p01_edge_curvature - c.before.p01_edge_curvature;
  c.delta.mean_edge_curvature = c.after.mean_edge_curvature - c.before.mean_edge_curvature;
  c.delta.edge_count = static_cast<long long>(c.after.edge_count) - static_cast<long long>(c.before.edge_count);
  c.delta.component_count =
      static_cast<long long>(c.after.component_count) - static_cast<long long>(c.before.component_count);
  return c;
}

}  // namespace ricci
