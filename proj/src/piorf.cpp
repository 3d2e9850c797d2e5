#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "ricci/curvature.hpp"
#include "ricci/errors.hpp"
#include "ricci/rewiring.hpp"

namespace ricci {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<Enum, N>& values, const char* what) {
  for (Enum v : values) {
    if (to_string(v) == s) return v;
  }
  throw InvalidInput(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

// Uniform index in [0, n) from a 64-bit engine whose output sequence is fixed
// by the standard, so seeded runs replay across platforms.
std::size_t draw_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

std::vector<NodeId> select_sources(const MeshGraph& g, const RewireConfig& cfg, std::size_t k,
                                   const CurvatureReport* report, std::mt19937_64& rng) {
  const std::size_t n = g.node_count();
  std::vector<NodeId> pool;
  switch (cfg.former) {
    case FormerSelector::orc: {
      for (std::size_t i = 0; i < n; ++i) {
        if (report->node_curvature[i]) pool.push_back(static_cast<NodeId>(i));
      }
      std::stable_sort(pool.begin(), pool.end(), [&](NodeId a, NodeId b) {
        return *report->node_curvature[a] < *report->node_curvature[b];
      });
      break;
    }
    case FormerSelector::degree: {
      pool.resize(n);
      std::iota(pool.begin(), pool.end(), NodeId{0});
      std::stable_sort(pool.begin(), pool.end(),
                       [&](NodeId a, NodeId b) { return g.degree(a) > g.degree(b); });
      break;
    }
    case FormerSelector::random: {
      pool.resize(n);
      std::iota(pool.begin(), pool.end(), NodeId{0});
      for (std::size_t i = 0; i < std::min(k, n); ++i) {
        std::swap(pool[i], pool[i + draw_index(rng, n - i)]);
      }
      break;
    }
  }
  pool.resize(std::min(k, pool.size()));
  std::sort(pool.begin(), pool.end());
  return pool;
}

NodeId select_target(const MeshGraph& g, LatterSelector latter, NodeId s, std::mt19937_64& rng) {
  const std::size_t n = g.node_count();
  if (latter == LatterSelector::random) {
    const auto r = static_cast<NodeId>(draw_index(rng, n - 1));
    return r < s ? r : r + 1;
  }
  NodeId best = s == 0 ? 1 : 0;
  double best_gap = -1.0;
  if (latter == LatterSelector::velocity) {
    const auto& w = g.fields().velocity;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == s) continue;
      const double gap = norm(w[s] - w[i]);
      if (gap > best_gap) {
        best_gap = gap;
        best = static_cast<NodeId>(i);
      }
    }
  } else {
    const auto& p = *g.fields().pressure;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == s) continue;
      const double gap = std::abs(p[s] - p[i]);
      if (gap > best_gap) {
        best_gap = gap;
        best = static_cast<NodeId>(i);
      }
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::piorf: return "piorf";
    case Method::digl: return "digl";
    case Method::sdrf: return "sdrf";
    case Method::fosr: return "fosr";
    case Method::borf: return "borf";
  }
  return "?";
}

std::string_view to_string(FormerSelector f) {
  switch (f) {
    case FormerSelector::orc: return "orc";
    case FormerSelector::degree: return "degree";
    case FormerSelector::random: return "random";
  }
  return "?";
}

std::string_view to_string(LatterSelector l) {
  switch (l) {
    case LatterSelector::velocity: return "velocity";
    case LatterSelector::pressure: return "pressure";
    case LatterSelector::random: return "random";
  }
  return "?";
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::add: return "add";
    case Action::remove: return "remove";
    case Action::both: return "both";
  }
  return "?";
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::bidirectional: return "bidirectional";
    case Direction::to_senders: return "to_senders";
    case Direction::to_receivers: return "to_receivers";
  }
  return "?";
}

std::string_view to_string(TrajectoryMode m) {
  return m == TrajectoryMode::per_frame ? "per_frame" : "first_frame";
}

Method parse_method(std::string_view s) {
  return parse_enum(s, std::array{Method::piorf, Method::digl, Method::sdrf, Method::fosr, Method::borf},
                    "method");
}
FormerSelector parse_former(std::string_view s) {
  return parse_enum(s, std::array{FormerSelector::orc, FormerSelector::degree, FormerSelector::random},
                    "former selector");
}
LatterSelector parse_latter(std::string_view s) {
  return parse_enum(
      s, std::array{LatterSelector::velocity, LatterSelector::pressure, LatterSelector::random},
      "latter selector");
}
Action parse_action(std::string_view s) {
  return parse_enum(s, std::array{Action::add, Action::remove, Action::both}, "action");
}
Direction parse_direction(std::string_view s) {
  return parse_enum(
      s, std::array{Direction::bidirectional, Direction::to_senders, Direction::to_receivers},
      "direction");
}
TrajectoryMode parse_mode(std::string_view s) {
  return parse_enum(s, std::array{TrajectoryMode::per_frame, TrajectoryMode::first_frame}, "mode");
}

void validate(const RewireConfig& cfg) {
  const MethodParams& p = cfg.params;
  switch (cfg.method) {
    case Method::piorf:
      if (!(cfg.pooling_ratio > 0.0 && cfg.pooling_ratio < 1.0)) {
        throw InvalidInput("pooling ratio must lie strictly inside (0, 1)");
      }
      break;
    case Method::digl:
      if (!(p.digl_alpha > 0.0 && p.digl_alpha <= 1.0)) throw InvalidInput("digl alpha must be in (0, 1]");
      if (!(p.digl_eps >= 0.0)) throw InvalidInput("digl eps must be >= 0");
      break;
    case Method::sdrf:
      if (p.sdrf_iterations < 1) throw InvalidInput("sdrf iterations must be >= 1");
      break;
    case Method::fosr:
      if (p.fosr_iterations < 1) throw InvalidInput("fosr iterations must be >= 1");
      break;
    case Method::borf:
      if (p.borf_batches < 1) throw InvalidInput("borf batches must be >= 1");
      break;
  }
  if (!(p.budget_seconds >= 0.0)) throw InvalidInput("budget seconds must be >= 0");
}

MeshGraph apply_edits(const MeshGraph& g, std::span<const AddedEdge> added,
                      std::span<const Edge> removed) {
  std::vector<Edge> pairs;
  pairs.reserve(added.size());
  for (const AddedEdge& a : added) pairs.push_back(make_edge(a.source, a.target));
  return g.add_edges(pairs).remove_edges(removed);
}

RewireResult piorf(const MeshGraph& g, const RewireConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = g.node_count();
  if (n < 2) throw InvalidInput("piorf needs at least 2 nodes");
  if (!(cfg.pooling_ratio > 0.0 && cfg.pooling_ratio < 1.0)) {
    throw InvalidInput("pooling ratio must lie strictly inside (0, 1)");
  }
  const auto k = static_cast<std::size_t>(std::floor(cfg.pooling_ratio * static_cast<double>(n)));
  if (k == 0) throw InvalidInput("pooling ratio selects no node (floor(delta * |V|) = 0)");
  const bool adds = cfg.action != Action::remove;
  if (adds && cfg.latter == LatterSelector::pressure && !g.fields().pressure) {
    throw MissingField("latter selector 'pressure' needs a pressure field");
  }

  RewireResult result;
  std::mt19937_64 rng(cfg.seed);

  const bool needs_curvature = cfg.action != Action::add || (adds && cfg.former == FormerSelector::orc);
  CurvatureReport report;
  if (needs_curvature) {
    report = full_report(g, cfg.weighted, cfg.threads);
    ++result.stats.curvature_computations;
  }

  if (cfg.action != Action::add) {
    std::vector<std::size_t> order(report.edges.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return report.edge_curvature[a] > report.edge_curvature[b];
    });
    order.resize(std::min(k, order.size()));
    for (std::size_t idx : order) result.removed.push_back(report.edges[idx]);
  }

  if (adds) {
    const MeshGraph base = g.remove_edges(result.removed);
    const std::vector<NodeId> sources = select_sources(g, cfg, k, needs_curvature ? &report : nullptr, rng);
    std::set<Edge> removed(result.removed.begin(), result.removed.end());
    std::set<Edge> inserted;
    for (NodeId s : sources) {
      const NodeId r = select_target(g, cfg.latter, s, rng);
      const Edge e = make_edge(s, r);
      // A pair removed in this pass is not re-added; that would undo the removal.
      if (base.has_edge(e.u, e.v) || inserted.contains(e) || removed.contains(e)) continue;
      inserted.insert(e);
      result.added.push_back({s, r, cfg.direction});
    }
  }

  result.graph = apply_edits(g, result.added, result.removed);
  result.stats.added = result.added.size();
  result.stats.removed = result.removed.size();
  result.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

RewireResult rewire(const MeshGraph& g, const RewireConfig& cfg) {
  validate(cfg);
  const MethodParams& p = cfg.params;
  switch (cfg.method) {
    case Method::piorf: return piorf(g, cfg);
    case Method::digl: return digl(g, p.digl_alpha, p.digl_eps);
    case Method::sdrf: return sdrf(g, p.sdrf_iterations, p.budget_seconds, cfg.threads);
    case Method::fosr: return fosr(g, p.fosr_initial_power, p.fosr_iterations, cfg.seed, p.budget_seconds);
    case Method::borf:
      return borf(g, p.borf_batches, p.borf_add_per_batch, p.borf_remove_per_batch, p.budget_seconds,
                  cfg.threads);
  }
  throw InvalidInput("unknown method");
}

std::vector<RewireResult> rewire_trajectory(const Trajectory& t, const RewireConfig& cfg,
                                            TrajectoryMode mode) {
  t.validate();
  validate(cfg);
  const bool needs_pressure = cfg.method == Method::piorf && cfg.action != Action::remove &&
                              cfg.latter == LatterSelector::pressure;
  if (needs_pressure) {
    for (std::size_t k = 0; k < t.frames.size(); ++k) {
      if (!t.frames[k].fields().pressure) {
        throw MissingField("frame " + std::to_string(k) + " has no pressure field");
      }
    }
  }

  std::vector<RewireResult> out;
  out.reserve(t.frames.size());
  if (mode == TrajectoryMode::per_frame) {
    for (const MeshGraph& frame : t.frames) out.push_back(rewire(frame, cfg));
    return out;
  }

  if (!t.static_mesh) throw InvalidInput("first_frame mode requires a static-mesh trajectory");
  RewireResult first = rewire(t.frames.front(), cfg);
  for (std::size_t k = 0; k < t.frames.size(); ++k) {
    if (k == 0) {
      out.push_back(first);
      continue;
    }
    RewireResult r;
    r.graph = apply_edits(t.frames[k], first.added, first.removed);
    r.added = first.added;
    r.removed = first.removed;
    r.stats.added = first.stats.added;
    r.stats.removed = first.stats.removed;
    r.stats.note = first.stats.note;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ricci
