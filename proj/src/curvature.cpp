#include "ricci/curvature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "ricci/errors.hpp"
#include "ricci/parallel.hpp"

namespace ricci {

namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();
constexpr int hop_radius = 3;

std::atomic<std::uint64_t> g_full_reports{0};

std::string edge_name(NodeId i, NodeId j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

// Dijkstra with velocity-difference edge lengths, truncated at a distance bound.
class WeightedSearch {
 public:
  explicit WeightedSearch(const MeshGraph& g)
      : g_(g), stamp_(g.node_count(), 0), dist_(g.node_count(), infinity), done_(g.node_count(), 0) {}

  // Distances from `source` to each target; +inf for targets beyond `bound`.
  void run(NodeId source, std::span<const NodeId> targets, double bound, std::vector<double>& out) {
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
    auto dist = [&](NodeId v) { return stamp_[v] == epoch_ ? dist_[v] : infinity; };
    auto relax = [&](NodeId v, double d) {
      if (stamp_[v] != epoch_) {
        stamp_[v] = epoch_;
        done_[v] = 0;
        dist_[v] = d;
      } else if (d < dist_[v]) {
        dist_[v] = d;
      } else {
        return false;
      }
      return true;
    };

    std::size_t remaining = targets.size();
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    relax(source, 0.0);
    heap.emplace(0.0, source);
    while (!heap.empty() && remaining > 0) {
      auto [d, u] = heap.top();
      heap.pop();
      if (done_[u] || d > dist_[u]) continue;
      if (d > bound) break;
      done_[u] = 1;
      if (std::find(targets.begin(), targets.end(), u) != targets.end()) --remaining;
      for (NodeId w : g_.neighbors(u)) {
        const double nd = d + weighted_edge_length(g_, u, w);
        if (nd <= bound && relax(w, nd)) heap.emplace(nd, w);
      }
    }
    out.clear();
    for (NodeId t : targets) out.push_back(dist(t));
  }

 private:
  const MeshGraph& g_;
  std::vector<std::uint32_t> stamp_;
  std::vector<double> dist_;
  std::vector<char> done_;
  std::uint32_t epoch_ = 0;
};

// Per-thread curvature evaluator holding reusable search scratch.
class OrcEvaluator {
 public:
  OrcEvaluator(const MeshGraph& g, bool weighted) : g_(g), weighted_(weighted), bfs_(g) {
    if (weighted) search_.emplace(g);
  }

  EdgeCurvatureDetail evaluate(NodeId i, NodeId j) {
    const Edge e = make_edge(i, j);
    if (!g_.has_edge(e.u, e.v)) throw InvalidInput("edge " + edge_name(i, j) + " not in graph");

    EdgeCurvatureDetail out;
    out.edge = e;
    out.source = random_walk_measure(g_, e.u);
    out.target = random_walk_measure(g_, e.v);
    const auto& rows = out.source.support;
    const auto& cols = out.target.support;

    cost_.assign(rows.size() * cols.size(), 0.0);
    if (!weighted_) {
      out.distance = 1.0;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        bfs_.run(rows[r], hop_radius, cols);
        for (std::size_t c = 0; c < cols.size(); ++c) {
          const int d = bfs_.distance(cols[c]);
          if (d < 0) throw TransportError("infinite transport cost on edge " + edge_name(e.u, e.v));
          cost_[r * cols.size() + c] = d;
        }
      }
    } else {
      const double direct = weighted_edge_length(g_, e.u, e.v);
      const NodeId tv[1] = {e.v};
      search_->run(e.u, tv, direct * (1 + 1e-12), dists_);
      out.distance = std::min(direct, dists_[0]);
      double reach = 0.0;
      for (NodeId q : cols) reach = std::max(reach, weighted_edge_length(g_, e.v, q));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const double bound = (weighted_edge_length(g_, rows[r], e.u) + direct + reach) * (1 + 1e-12);
        search_->run(rows[r], cols, bound, dists_);
        for (std::size_t c = 0; c < cols.size(); ++c) {
          if (!std::isfinite(dists_[c])) {
            throw TransportError("infinite transport cost on edge " + edge_name(e.u, e.v));
          }
          cost_[r * cols.size() + c] = dists_[c];
        }
      }
    }
    out.plan = solve_transport(out.source.mass, out.target.mass, cost_);
    out.kappa = 1.0 - out.plan.cost / out.distance;
    return out;
  }

 private:
  const MeshGraph& g_;
  bool weighted_;
  BoundedBfs bfs_;
  std::optional<WeightedSearch> search_;
  std::vector<double> cost_;
  std::vector<double> dists_;
};

}  // namespace

void LocalMeasure::validate() const {
  if (support.size() != mass.size()) throw InvalidInput("measure: support and mass differ in length");
  double total = 0.0;
  for (double m : mass) {
    if (!(m >= 0.0)) throw InvalidInput("measure: negative mass");
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("measure: masses do not sum to 1");
  std::vector<NodeId> s = support;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
    throw InvalidInput("measure: repeated support node");
  }
}

LocalMeasure random_walk_measure(const MeshGraph& g, NodeId i) {
  if (i >= g.node_count()) throw InvalidInput("random_walk_measure: node out of range");
  const auto nb = g.neighbors(i);
  if (nb.empty()) throw InvalidInput("no measure for isolated node " + std::to_string(i));
  LocalMeasure m;
  m.support.assign(nb.begin(), nb.end());
  m.mass.assign(nb.size(), 1.0 / static_cast<double>(nb.size()));
  return m;
}

TransportPlan optimal_coupling(const LocalMeasure& mu, const LocalMeasure& nu,
                               const GroundDistance& ground) {
  mu.validate();
  nu.validate();
  std::vector<double> cost(mu.support.size() * nu.support.size());
  for (std::size_t r = 0; r < mu.support.size(); ++r) {
    for (std::size_t c = 0; c < nu.support.size(); ++c) {
      const double d = ground(mu.support[r], nu.support[c]);
      if (!std::isfinite(d)) throw TransportError("infinite transport cost");
      if (d < 0.0) throw InvalidInput("ground distance is negative");
      cost[r * nu.support.size() + c] = d;
    }
  }
  return solve_transport(mu.mass, nu.mass, cost);
}

double wasserstein1(const LocalMeasure& mu, const LocalMeasure& nu, const GroundDistance& ground) {
  return optimal_coupling(mu, nu, ground).cost;
}

double weighted_edge_length(const MeshGraph& g, NodeId u, NodeId v) {
  const auto& w = g.fields().velocity;
  return norm(w[u] - w[v]) + weighted_length_epsilon;
}

EdgeCurvatureDetail edge_orc_detail(const MeshGraph& g, NodeId i, NodeId j, bool weighted) {
  OrcEvaluator eval(g, weighted);
  return eval.evaluate(i, j);
}

double edge_orc(const MeshGraph& g, NodeId i, NodeId j, bool weighted) {
  return edge_orc_detail(g, i, j, weighted).kappa;
}

double node_orc(const MeshGraph& g, NodeId i, bool weighted) {
  if (i >= g.node_count()) throw InvalidInput("node_orc: node out of range");
  const auto nb = g.neighbors(i);
  if (nb.empty()) throw InvalidInput("no curvature for isolated node " + std::to_string(i));
  OrcEvaluator eval(g, weighted);
  double sum = 0.0;
  for (NodeId j : nb) sum += eval.evaluate(i, j).kappa;
  return sum / static_cast<double>(nb.size());
}

double CurvatureReport::kappa(NodeId i, NodeId j) const {
  const Edge e = make_edge(i, j);
  auto it = std::lower_bound(edges.begin(), edges.end(), e);
  if (it == edges.end() || *it != e) throw InvalidInput("edge " + edge_name(i, j) + " not in report");
  return edge_curvature[static_cast<std::size_t>(it - edges.begin())];
}

CurvatureReport full_report(const MeshGraph& g, bool weighted, std::size_t threads) {
  g_full_reports.fetch_add(1, std::memory_order_relaxed);
  CurvatureReport report;
  report.weighted = weighted;
  report.edges.assign(g.edges().begin(), g.edges().end());
  report.edge_curvature.assign(report.edges.size(), 0.0);

  parallel_for(report.edges.size(), threads, [&](std::size_t begin, std::size_t end) {
    OrcEvaluator eval(g, weighted);
    for (std::size_t k = begin; k < end; ++k) {
      report.edge_curvature[k] = eval.evaluate(report.edges[k].u, report.edges[k].v).kappa;
    }
  });

  report.node_curvature.assign(g.node_count(), std::nullopt);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto nb = g.neighbors(static_cast<NodeId>(i));
    if (nb.empty()) continue;
    double sum = 0.0;
    for (NodeId j : nb) sum += report.kappa(static_cast<NodeId>(i), j);
    report.node_curvature[i] = sum / static_cast<double>(nb.size());
  }
  return report;
}

std::uint64_t full_report_invocations() { return g_full_reports.load(std::memory_order_relaxed); }

double forman_curvature(const MeshGraph& g, NodeId i, NodeId j) {
  if (!g.has_edge(i, j)) throw InvalidInput("edge " + edge_name(i, j) + " not in graph");
  return 4.0 - static_cast<double>(g.degree(i)) - static_cast<double>(g.degree(j));
}

}  // namespace ricci
