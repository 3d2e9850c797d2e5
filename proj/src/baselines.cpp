#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "ricci/curvature.hpp"
#include "ricci/errors.hpp"
#include "ricci/rewiring.hpp"

namespace ricci {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool over_budget(Clock::time_point t0, double budget) { return budget > 0.0 && elapsed(t0) > budget; }

void finish(RewireResult& r, const MeshGraph& g, Clock::time_point t0) {
  r.graph = apply_edits(g, r.added, r.removed);
  r.stats.added = r.added.size();
  r.stats.removed = r.removed.size();
  r.stats.seconds = elapsed(t0);
}

std::size_t lowest_curvature_edge(const CurvatureReport& report) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < report.edge_curvature.size(); ++k) {
    if (report.edge_curvature[k] < report.edge_curvature[best]) best = k;
  }
  return best;
}

}  // namespace

RewireResult digl(const MeshGraph& g, double alpha, double eps) {
  const auto t0 = Clock::now();
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("digl alpha must be in (0, 1]");
  if (!(eps >= 0.0)) throw InvalidInput("digl eps must be >= 0");
  if (!is_connected(g)) throw Disconnected("digl requires a connected graph");

  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::VectorXd inv_sqrt_deg(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(g.degree(static_cast<NodeId>(i)) + 1));
  }
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    system(i, i) -= (1.0 - alpha) * inv_sqrt_deg[i] * inv_sqrt_deg[i];
  }
  for (const Edge& e : g.edges()) {
    const double t = (1.0 - alpha) * inv_sqrt_deg[e.u] * inv_sqrt_deg[e.v];
    system(e.u, e.v) -= t;
    system(e.v, e.u) -= t;
  }
  // I - (1 - alpha) T is symmetric positive definite for alpha > 0.
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success) throw Error("digl: diffusion system is singular");
  const Eigen::MatrixXd diffusion = alpha * llt.solve(Eigen::MatrixXd::Identity(n, n));

  RewireResult r;
  r.stats.note = "mesh edges preserved; supra-threshold diffusion pairs added only";
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = u + 1; v < n; ++v) {
      const double s = 0.5 * (diffusion(u, v) + diffusion(v, u));
      if (s > eps && !g.has_edge(static_cast<NodeId>(u), static_cast<NodeId>(v))) {
        r.added.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), Direction::bidirectional});
      }
    }
  }
  finish(r, g, t0);
  return r;
}

RewireResult sdrf(const MeshGraph& g, std::size_t max_iterations, double budget_seconds,
                  std::size_t threads) {
  const auto t0 = Clock::now();
  if (max_iterations < 1) throw InvalidInput("sdrf iterations must be >= 1");
  RewireResult r;
  r.stats.note = "ORC in place of balanced Forman curvature; deterministic argmax in place of softmax";
  MeshGraph current = g;

  for (std::size_t it = 0; it < max_iterations && current.edge_count() > 0; ++it) {
    if (over_budget(t0, budget_seconds)) {
      r.stats.timed_out = true;
      break;
    }
    const CurvatureReport report = full_report(current, false, threads);
    ++r.stats.curvature_computations;
    const std::size_t worst = lowest_curvature_edge(report);
    const Edge target = report.edges[worst];
    const double before = report.edge_curvature[worst];

    std::set<Edge> candidates;
    auto side = [&](NodeId x) {
      std::vector<NodeId> s(current.neighbors(x).begin(), current.neighbors(x).end());
      s.push_back(x);
      return s;
    };
    for (NodeId p : side(target.u)) {
      for (NodeId q : side(target.v)) {
        if (p != q && !current.has_edge(p, q)) candidates.insert(make_edge(p, q));
      }
    }

    Edge best{};
    double best_kappa = -std::numeric_limits<double>::infinity();
    for (const Edge& c : candidates) {
      const Edge one[1] = {c};
      const double k = edge_orc(current.add_edges(one), target.u, target.v);
      if (k > best_kappa) {
        best_kappa = k;
        best = c;
      }
    }
    if (candidates.empty() || !(best_kappa > before + 1e-12)) break;

    r.added.push_back({best.u, best.v, Direction::bidirectional});
    r.stats.improvements.emplace_back(before, best_kappa);
    const Edge one[1] = {best};
    current = current.add_edges(one);
  }
  finish(r, g, t0);
  return r;
}

namespace fosr_detail {

void power_round(const MeshGraph& g, std::vector<double>& x) {
  const std::size_t n = g.node_count();
  std::vector<double> root(n);
  double root_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    root[i] = std::sqrt(static_cast<double>(g.degree(static_cast<NodeId>(i)) + 1));
    root_sq += root[i] * root[i];
  }
  auto deflate = [&](std::vector<double>& v) {
    const double dot = std::inner_product(v.begin(), v.end(), root.begin(), 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i] -= dot * root[i] / root_sq;
  };
  deflate(x);
  // y = (I + D^-1/2 (A + I) D^-1/2) x
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = x[i] / root[i];
    for (NodeId j : g.neighbors(static_cast<NodeId>(i))) acc += x[j] / root[j];
    y[i] = x[i] + acc / root[i];
  }
  deflate(y);
  const double len = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
  if (len > 0.0) {
    for (double& v : y) v /= len;
  }
  x = std::move(y);
}

std::vector<double> initial_vector(const MeshGraph& g, std::size_t rounds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> x(g.node_count());
  for (double& v : x) v = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  for (std::size_t k = 0; k < rounds; ++k) power_round(g, x);
  if (rounds == 0) {
    const double len = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    if (len > 0.0) {
      for (double& v : x) v /= len;
    }
  }
  return x;
}

bool select_pair(const MeshGraph& g, std::span<const double> x, Edge& out) {
  const std::size_t n = g.node_count();
  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = x[i] / std::sqrt(static_cast<double>(g.degree(static_cast<NodeId>(i)) + 1));
  }
  bool found = false;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const double score = scaled[u] * scaled[v];
      if (score < best && !g.has_edge(static_cast<NodeId>(u), static_cast<NodeId>(v))) {
        best = score;
        out = {static_cast<NodeId>(u), static_cast<NodeId>(v)};
        found = true;
      }
    }
  }
  return found;
}

}  // namespace fosr_detail

RewireResult fosr(const MeshGraph& g, std::size_t initial_power, std::size_t max_iterations,
                  std::uint64_t seed, double budget_seconds) {
  const auto t0 = Clock::now();
  if (max_iterations < 1) throw InvalidInput("fosr iterations must be >= 1");
  if (!is_connected(g)) throw Disconnected("fosr requires a connected graph");
  RewireResult r;
  r.stats.note = "first-order spectral-gap proxy";
  MeshGraph current = g;
  std::vector<double> x = fosr_detail::initial_vector(current, initial_power, seed);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    if (over_budget(t0, budget_seconds)) {
      r.stats.timed_out = true;
      break;
    }
    Edge pick;
    if (!fosr_detail::select_pair(current, x, pick)) break;
    r.added.push_back({pick.u, pick.v, Direction::bidirectional});
    const Edge one[1] = {pick};
    current = current.add_edges(one);
    fosr_detail::power_round(current, x);
  }
  finish(r, g, t0);
  return r;
}

RewireResult borf(const MeshGraph& g, std::size_t batches, std::size_t add_per_batch,
                  std::size_t remove_per_batch, double budget_seconds, std::size_t threads) {
  const auto t0 = Clock::now();
  if (batches < 1) throw InvalidInput("borf batches must be >= 1");
  RewireResult r;
  MeshGraph current = g;
  std::set<Edge> ever_removed;

  for (std::size_t b = 0; b < batches; ++b) {
    if (add_per_batch == 0 && remove_per_batch == 0) break;
    if (over_budget(t0, budget_seconds)) {
      r.stats.timed_out = true;
      break;
    }
    const CurvatureReport report = full_report(current, false, threads);
    ++r.stats.curvature_computations;
    std::vector<std::size_t> order(report.edges.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
      return report.edge_curvature[a] < report.edge_curvature[c];
    });

    std::vector<Edge> batch_added;
    auto taken = [&](Edge e) {
      return current.has_edge(e.u, e.v) || ever_removed.contains(e) ||
             std::find(batch_added.begin(), batch_added.end(), e) != batch_added.end();
    };
    for (std::size_t k = 0; k < std::min(add_per_batch, order.size()); ++k) {
      const Edge e = report.edges[order[k]];
      // Same transport problem as in the curvature pass, re-solved for its plan.
      const EdgeCurvatureDetail detail = edge_orc_detail(current, e.u, e.v);
      bool found = false;
      Edge best{};
      double best_mass = 0.0;
      for (std::size_t p = 0; p < detail.source.support.size(); ++p) {
        for (std::size_t q = 0; q < detail.target.support.size(); ++q) {
          const NodeId a = detail.source.support[p];
          const NodeId c = detail.target.support[q];
          if (a == c) continue;
          const Edge cand = make_edge(a, c);
          if (taken(cand)) continue;
          const double mass = detail.plan.at(p, q);
          const bool heavier = mass > best_mass + 1e-12;
          const bool tie = std::abs(mass - best_mass) <= 1e-12 && cand < best;
          if (!found || heavier || tie) {
            found = true;
            best = cand;
            best_mass = mass;
          }
        }
      }
      if (found) {
        batch_added.push_back(best);
        r.added.push_back({best.u, best.v, Direction::bidirectional});
      }
    }

    // Highest curvature first; among equal curvature, lexicographic order.
    std::vector<std::size_t> top(report.edges.size());
    std::iota(top.begin(), top.end(), std::size_t{0});
    std::stable_sort(top.begin(), top.end(), [&](std::size_t a, std::size_t c) {
      return report.edge_curvature[a] > report.edge_curvature[c];
    });
    std::vector<Edge> batch_removed;
    for (std::size_t k = 0; k < std::min(remove_per_batch, top.size()); ++k) {
      batch_removed.push_back(report.edges[top[k]]);
    }
    for (const Edge& e : batch_removed) {
      ever_removed.insert(e);
      r.removed.push_back(e);
    }
    current = current.add_edges(batch_added).remove_edges(batch_removed);
  }
  finish(r, g, t0);
  return r;
}

}  // namespace ricci
