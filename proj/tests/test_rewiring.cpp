#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "ricci/curvature.hpp"
#include "ricci/errors.hpp"
#include "ricci/meshgen.hpp"
#include "ricci/rewiring.hpp"
#include "support.hpp"

using namespace ricci;

namespace {

MeshGraph with_velocities(const MeshGraph& g, std::vector<Vec2> w) {
  NodeFields f = g.fields();
  f.velocity = std::move(w);
  return g.with_fields(std::move(f));
}

MeshGraph p4_flow() {
  return with_velocities(oracle::path(4), {{0, 0}, {1, 0}, {2, 0}, {5, 0}});
}

RewireConfig piorf_config(double delta) {
  RewireConfig cfg;
  cfg.pooling_ratio = delta;
  return cfg;
}

std::set<Edge> edge_set(const MeshGraph& g) { return {g.edges().begin(), g.edges().end()}; }

// (g + added) \ removed from the raw lists.
void check_edit_invariant(const MeshGraph& g, const RewireResult& r) {
  std::set<Edge> expect = edge_set(g);
  for (const AddedEdge& a : r.added) {
    CHECK(a.source != a.target);
    expect.insert(make_edge(a.source, a.target));
  }
  for (const Edge& e : r.removed) expect.erase(e);
  CHECK(edge_set(r.graph) == expect);
  CHECK(r.stats.added == r.added.size());
  CHECK(r.stats.removed == r.removed.size());
}

const MeshGraph& refined_mesh() {
  static const MeshGraph g = generate(fixture::refined_mesh_spec()).frames[0];
  return g;
}

}  // namespace

TEST_CASE("enum names round-trip") {
  for (Method m : {Method::piorf, Method::digl, Method::sdrf, Method::fosr, Method::borf})
    CHECK(parse_method(to_string(m)) == m);
  for (FormerSelector f : {FormerSelector::orc, FormerSelector::degree, FormerSelector::random})
    CHECK(parse_former(to_string(f)) == f);
  for (LatterSelector l : {LatterSelector::velocity, LatterSelector::pressure, LatterSelector::random})
    CHECK(parse_latter(to_string(l)) == l);
  for (Action a : {Action::add, Action::remove, Action::both}) CHECK(parse_action(to_string(a)) == a);
  for (Direction d : {Direction::bidirectional, Direction::to_senders, Direction::to_receivers})
    CHECK(parse_direction(to_string(d)) == d);
  for (TrajectoryMode m : {TrajectoryMode::per_frame, TrajectoryMode::first_frame})
    CHECK(parse_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_method("delaunay"), InvalidInput);
}

TEST_CASE("PIORF hand trace on P_4") {
  // Every edge of P_4 has kappa 0, so gamma ties everywhere and node 0 is
  // the single source; node 3 is farthest in velocity (distance 5).
  const MeshGraph g = p4_flow();
  const RewireResult r = piorf(g, piorf_config(0.25));
  REQUIRE(r.added.size() == 1);
  CHECK(r.added[0] == AddedEdge{0, 3, Direction::bidirectional});
  CHECK(r.removed.empty());
  CHECK(r.graph.has_edge(0, 3));
  CHECK(r.graph.edge_count() == 4);
  CHECK(r.stats.curvature_computations == 1);
  check_edit_invariant(g, r);

  // Two sources: node 1's farthest velocity is also node 3.
  const RewireResult two = piorf(g, piorf_config(0.5));
  REQUIRE(two.added.size() == 2);
  CHECK(two.added[1] == AddedEdge{1, 3, Direction::bidirectional});
}

TEST_CASE("PIORF preconditions") {
  const MeshGraph g = p4_flow();
  CHECK_THROWS_AS(piorf(g, piorf_config(0.2)), InvalidInput);  // floor(0.8) = 0
  CHECK_THROWS_AS(piorf(g, piorf_config(0.0)), InvalidInput);
  CHECK_THROWS_AS(piorf(g, piorf_config(1.0)), InvalidInput);
  CHECK_THROWS_AS(piorf(oracle::complete(1), piorf_config(0.5)), InvalidInput);
  RewireConfig cfg = piorf_config(0.25);
  cfg.latter = LatterSelector::pressure;
  CHECK_THROWS_AS(piorf(g, cfg), MissingField);
}

TEST_CASE("PIORF performs exactly one curvature pass whatever delta is") {
  const MeshGraph& g = refined_mesh();
  for (double delta : {0.01, 0.03, 0.2}) {
    const auto before = full_report_invocations();
    const RewireResult r = piorf(g, piorf_config(delta));
    CHECK(full_report_invocations() == before + 1);
    CHECK(r.stats.curvature_computations == 1);
    const auto budget = static_cast<std::size_t>(std::floor(delta * g.node_count()));
    CHECK(r.added.size() <= budget);
    CHECK(r.added.size() > 0);
    check_edit_invariant(g, r);
  }
}

TEST_CASE("PIORF sources are the lowest node curvatures") {
  const MeshGraph& g = refined_mesh();
  const RewireConfig cfg = piorf_config(0.03);
  const RewireResult r = piorf(g, cfg);
  const CurvatureReport rep = full_report(g);
  std::vector<std::pair<double, NodeId>> ranked;
  for (NodeId i = 0; i < g.node_count(); ++i) ranked.push_back({*rep.node_curvature[i], i});
  std::sort(ranked.begin(), ranked.end());
  const auto k = static_cast<std::size_t>(std::floor(0.03 * g.node_count()));
  std::vector<NodeId> expect;
  for (std::size_t i = 0; i < k; ++i) expect.push_back(ranked[i].second);
  std::sort(expect.begin(), expect.end());
  // Each source is joined to its velocity-farthest node unless that pair
  // already existed; check the sources that did produce an edge.
  std::set<NodeId> sources;
  for (const AddedEdge& a : r.added) sources.insert(a.source);
  for (NodeId s : sources) CHECK(std::binary_search(expect.begin(), expect.end(), s));
  for (const AddedEdge& a : r.added) {
    const Vec2 ws = g.fields().velocity[a.source];
    double best = -1.0;
    NodeId arg = 0;
    for (NodeId i = 0; i < g.node_count(); ++i) {
      if (i == a.source) continue;
      const double d = norm(ws - g.fields().velocity[i]);
      if (d > best) {
        best = d;
        arg = i;
      }
    }
    CHECK(a.target == arg);
  }
}

TEST_CASE("PIORF degree former picks the hub") {
  // Star on 0 with leaves 1..3, plus a tail 3-4 so the hub has a non-neighbour.
  const MeshGraph g = with_velocities(MeshGraph::from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {3, 4}}),
                                      {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {9, 0}});
  RewireConfig cfg = piorf_config(0.2);
  cfg.former = FormerSelector::degree;
  const RewireResult r = piorf(g, cfg);
  REQUIRE(r.added.size() == 1);
  CHECK(r.added[0] == AddedEdge{0, 4, Direction::bidirectional});
  CHECK(r.stats.curvature_computations == 0);
}

TEST_CASE("PIORF random selectors are seeded") {
  const MeshGraph& g = refined_mesh();
  RewireConfig cfg = piorf_config(0.03);
  cfg.latter = LatterSelector::random;
  cfg.seed = 42;
  const RewireResult a = piorf(g, cfg), b = piorf(g, cfg);
  CHECK(a == b);
  cfg.seed = 43;
  CHECK_FALSE(piorf(g, cfg).added == a.added);
  cfg.former = FormerSelector::random;
  const RewireResult c = piorf(g, cfg);
  std::set<NodeId> sources;
  for (const AddedEdge& e : c.added) sources.insert(e.source);
  CHECK(sources.size() == c.added.size());  // drawn without replacement
}

TEST_CASE("PIORF pressure selector uses scalar differences") {
  MeshGraph g = p4_flow();
  NodeFields f = g.fields();
  f.pressure = std::vector<double>{0.0, 9.0, 1.0, 2.0};
  g = g.with_fields(f);
  RewireConfig cfg = piorf_config(0.25);
  cfg.latter = LatterSelector::pressure;
  const RewireResult r = piorf(g, cfg);
  // Node 0's largest |dp| is node 1, already adjacent: skipped.
  CHECK(r.added.empty());
  f.pressure = std::vector<double>{0.0, 1.0, 9.0, 2.0};
  const RewireResult s = piorf(g.with_fields(f), cfg);
  REQUIRE(s.added.size() == 1);
  CHECK(s.added[0].target == 2);
}

TEST_CASE("PIORF removal drops the most positively curved edges") {
  const MeshGraph& g = refined_mesh();
  RewireConfig cfg = piorf_config(0.03);
  cfg.action = Action::remove;
  const RewireResult r = piorf(g, cfg);
  const auto k = static_cast<std::size_t>(std::floor(0.03 * g.node_count()));
  CHECK(r.added.empty());
  CHECK(r.removed.size() == k);
  const CurvatureReport rep = full_report(g);
  std::vector<std::size_t> order(rep.edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rep.edge_curvature[a] > rep.edge_curvature[b]; });
  std::set<Edge> expect;
  for (std::size_t i = 0; i < k; ++i) expect.insert(rep.edges[order[i]]);
  CHECK(std::set<Edge>(r.removed.begin(), r.removed.end()) == expect);
  check_edit_invariant(g, r);
}

TEST_CASE("PIORF both removes then adds from one curvature pass") {
  const MeshGraph& g = refined_mesh();
  RewireConfig cfg = piorf_config(0.03);
  cfg.action = Action::both;
  const auto before = full_report_invocations();
  const RewireResult r = piorf(g, cfg);
  CHECK(full_report_invocations() == before + 1);
  CHECK(!r.added.empty());
  CHECK(!r.removed.empty());
  for (const AddedEdge& a : r.added) {
    CHECK(std::find(r.removed.begin(), r.removed.end(), make_edge(a.source, a.target)) == r.removed.end());
  }
  check_edit_invariant(g, r);
}

TEST_CASE("PIORF direction tags only annotate the log") {
  const MeshGraph& g = refined_mesh();
  const RewireResult plain = piorf(g, piorf_config(0.03));
  for (Direction d : {Direction::to_senders, Direction::to_receivers}) {
    RewireConfig cfg = piorf_config(0.03);
    cfg.direction = d;
    const RewireResult r = piorf(g, cfg);
    CHECK(r.graph == plain.graph);
    REQUIRE(r.added.size() == plain.added.size());
    for (std::size_t i = 0; i < r.added.size(); ++i) {
      CHECK(r.added[i].direction == d);
      CHECK(r.added[i].source == plain.added[i].source);
      CHECK(r.added[i].target == plain.added[i].target);
    }
  }
}

TEST_CASE("PIORF weighted mode ranks sources by velocity-weighted curvature") {
  const MeshGraph& g = refined_mesh();
  RewireConfig cfg = piorf_config(0.03);
  cfg.weighted = true;
  const RewireResult r = piorf(g, cfg);
  CHECK(r.stats.curvature_computations == 1);
  CHECK(!r.added.empty());
  check_edit_invariant(g, r);
  CHECK(r == piorf(g, cfg));
}

TEST_CASE("DIGL matches a closed-form diffusion on P_3") {
  // T = D^-1/2 (A + I) D^-1/2 with self-looped degrees (2, 3, 2).
  const double a = 0.01, eps = 0.4;
  const double s6 = std::sqrt(6.0);
  const double t[3][3] = {{0.5, 1 / s6, 0}, {1 / s6, 1.0 / 3.0, 1 / s6}, {0, 1 / s6, 0.5}};
  double m[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = (i == j ? 1.0 : 0.0) - (1 - a) * t[i][j];
  // Inverse by cofactors.
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  const double s02 = a * (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  const RewireResult r = digl(oracle::path(3), a, eps);
  CHECK(r.added.size() == (s02 > eps ? 1u : 0u));
  const RewireResult all = digl(oracle::path(3), a, s02 * 0.5);
  REQUIRE(all.added.size() == 1);
  CHECK(make_edge(all.added[0].source, all.added[0].target) == Edge{0, 2});
  const RewireResult none = digl(oracle::path(3), a, s02 * 1.5);
  CHECK(none.added.empty());
}

TEST_CASE("DIGL degenerate parameters") {
  CHECK(digl(oracle::cycle(8), 1.0, 0.0).added.empty());
  const RewireResult r = digl(oracle::cycle(6), 0.3, 0.0);
  CHECK(r.graph.edge_count() == 15);  // every non-edge has positive diffusion
  CHECK_THROWS_AS(digl(MeshGraph::from_edges(4, {{0, 1}, {2, 3}}), 0.1, 0.1), Disconnected);
  CHECK(!digl(oracle::path(3), 0.1, 0.0).stats.note.empty());
}

TEST_CASE("SDRF targets the bridge of a barbell") {
  const MeshGraph g = oracle::barbell();
  const RewireResult r = sdrf(g, 1);
  REQUIRE(r.added.size() == 1);
  REQUIRE(r.stats.improvements.size() == 1);
  CHECK(r.stats.improvements[0].first == doctest::Approx(oracle::orc(g, 2, 3)).epsilon(1e-9));
  // Exhaustive replay: the added pair maximizes the bridge's new curvature.
  double best = -10.0;
  for (NodeId p : {0, 1, 2}) {
    for (NodeId q : {3, 4, 5}) {
      if (g.has_edge(p, q)) continue;
      const std::vector<Edge> one = {make_edge(p, q)};
      best = std::max(best, oracle::orc(g.add_edges(one), 2, 3));
    }
  }
  CHECK(r.stats.improvements[0].second == doctest::Approx(best).epsilon(1e-9));
  CHECK(oracle::orc(r.graph, 2, 3) == doctest::Approx(best).epsilon(1e-9));
  CHECK(r.removed.empty());
  CHECK(!r.stats.note.empty());
}

TEST_CASE("SDRF adds nothing without candidates and replays step by step") {
  CHECK(sdrf(oracle::complete(4), 10).added.empty());
  const MeshGraph p5 = oracle::path(5);
  const RewireResult r = sdrf(p5, 2);
  CHECK(r.added.size() <= 2);
  REQUIRE(r.stats.improvements.size() == r.added.size());
  MeshGraph cur = p5;
  for (std::size_t k = 0; k < r.added.size(); ++k) {
    double worst = 10.0;
    for (const Edge& e : cur.edges()) worst = std::min(worst, oracle::orc(cur, e.u, e.v));
    CHECK(r.stats.improvements[k].first == doctest::Approx(worst).epsilon(1e-9));
    CHECK(r.stats.improvements[k].second > r.stats.improvements[k].first);
    const std::vector<Edge> one = {make_edge(r.added[k].source, r.added[k].target)};
    cur = cur.add_edges(one);
  }
  CHECK(cur == r.graph);
}

TEST_CASE("FoSR picks the single non-edge of P_3 and nothing on K_n") {
  const RewireResult r = fosr(oracle::path(3), 5, 1);
  REQUIRE(r.added.size() == 1);
  CHECK(make_edge(r.added[0].source, r.added[0].target) == Edge{0, 2});
  CHECK(fosr(oracle::complete(5), 5, 3).added.empty());
  CHECK_THROWS_AS(fosr(MeshGraph::from_edges(4, {{0, 1}, {2, 3}}), 5, 1), Disconnected);
}

TEST_CASE("FoSR on C_6 follows the exact second eigenvector") {
  const MeshGraph g = oracle::cycle(6);
  // After many power rounds x lies in the second eigenspace of the
  // normalized adjacency; project onto it with a dense eigensolver.
  const std::vector<double> x = fosr_detail::initial_vector(g, 300, 9);
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(6, 6);
  for (const Edge& e : g.edges()) t(e.u, e.v) = t(e.v, e.u) = 1.0;
  t /= 3.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  // Ascending eigenvalues: ..., 2/3, 2/3, 1. Columns 3 and 4 span the space.
  const Eigen::MatrixXd basis = es.eigenvectors().middleCols(3, 2);
  CHECK(es.eigenvalues()(4) == doctest::Approx(2.0 / 3.0));
  const Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), 6);
  Eigen::VectorXd proj = basis * (basis.transpose() * xv);
  CHECK((proj - xv).norm() <= 1e-6);
  proj.normalize();

  double best = 1e9;
  for (NodeId u = 0; u < 6; ++u)
    for (NodeId v = u + 1; v < 6; ++v)
      if (!g.has_edge(u, v)) best = std::min(best, proj(u) * proj(v));
  const RewireResult r = fosr(g, 300, 1, 9);
  REQUIRE(r.added.size() == 1);
  CHECK(proj(r.added[0].source) * proj(r.added[0].target) == doctest::Approx(best).epsilon(1e-6));

  Edge chosen;
  REQUIRE(fosr_detail::select_pair(g, x, chosen));
  CHECK(chosen == make_edge(r.added[0].source, r.added[0].target));
}

TEST_CASE("BORF identity, ties and timeouts") {
  const MeshGraph& g = refined_mesh();
  const RewireResult id = borf(g, 3, 0, 0);
  CHECK(id.graph == g);
  CHECK(id.added.empty());
  CHECK(id.stats.curvature_computations == 0);  // nothing to do, nothing computed

  const RewireResult k3 = borf(oracle::complete(3), 1, 0, 1);
  REQUIRE(k3.removed.size() == 1);
  CHECK(k3.removed[0] == Edge{0, 1});

  const RewireResult late = borf(g, 1000, 4, 2, 1e-6);
  CHECK(late.stats.timed_out);
  CHECK(late.stats.curvature_computations < 1000);
  check_edit_invariant(g, late);
}

TEST_CASE("BORF joins the heaviest coupling pair across a bridge") {
  const MeshGraph g = oracle::barbell();
  const RewireResult r = borf(g, 1, 1, 0);
  REQUIRE(r.added.size() == 1);
  const EdgeCurvatureDetail d = edge_orc_detail(g, 2, 3);
  // The library's plan is optimal per the enumeration oracle ...
  std::vector<double> cost;
  const auto fw = oracle::floyd_warshall(g);
  for (NodeId p : d.source.support)
    for (NodeId q : d.target.support) cost.push_back(fw[p][q]);
  CHECK(d.plan.cost == doctest::Approx(oracle::enumerate_transport(d.source.mass, d.target.mass, cost)));
  // ... and the added pair carries the largest mass among non-adjacent pairs.
  double best = -1.0, chosen = -1.0;
  for (std::size_t a = 0; a < d.source.support.size(); ++a) {
    for (std::size_t b = 0; b < d.target.support.size(); ++b) {
      const NodeId p = d.source.support[a], q = d.target.support[b];
      if (p == q || g.has_edge(p, q)) continue;
      best = std::max(best, d.plan.at(a, b));
      if (make_edge(p, q) == make_edge(r.added[0].source, r.added[0].target)) chosen = d.plan.at(a, b);
    }
  }
  CHECK(best > 0.0);
  CHECK(chosen == best);
}

TEST_CASE("BORF never re-adds a removed pair") {
  const MeshGraph& g = refined_mesh();
  const RewireResult r = borf(g, 4, 4, 2);
  std::set<Edge> removed(r.removed.begin(), r.removed.end());
  for (const AddedEdge& a : r.added) CHECK(removed.count(make_edge(a.source, a.target)) == 0);
  check_edit_invariant(g, r);
  CHECK(r.stats.curvature_computations == 4);
}

TEST_CASE("every method conserves mesh edges when only adding") {
  const MeshGraph g = generate([] {
                        MeshSpec s;
                        s.nx = 8;
                        s.ny = 6;
                        return s;
                      }())
                          .frames[0];
  for (Method m : {Method::piorf, Method::digl, Method::sdrf, Method::fosr}) {
    RewireConfig cfg;
    cfg.method = m;
    cfg.pooling_ratio = 0.1;
    const RewireResult r = rewire(g, cfg);
    for (const Edge& e : g.edges()) CHECK(r.graph.has_edge(e.u, e.v));
    check_edit_invariant(g, r);
    CHECK(r == rewire(g, cfg));
  }
}

TEST_CASE("config validation") {
  RewireConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.pooling_ratio = 1.5;
  CHECK_THROWS_AS(validate(cfg), InvalidInput);
  cfg = {};
  cfg.method = Method::digl;
  cfg.params.digl_alpha = 0.0;
  CHECK_THROWS_AS(validate(cfg), InvalidInput);
  cfg = {};
  cfg.method = Method::sdrf;
  cfg.params.sdrf_iterations = 0;
  CHECK_THROWS_AS(validate(cfg), InvalidInput);
}

TEST_CASE("trajectory modes") {
  MeshSpec s = fixture::refined_mesh_spec();
  s.nx = 24;
  s.ny = 6;
  s.refine_radius = 0.1;
  s.frames = 3;
  const Trajectory t = generate(s);
  const RewireConfig cfg = piorf_config(0.05);

  const auto first = rewire_trajectory(t, cfg, TrajectoryMode::first_frame);
  REQUIRE(first.size() == 3);
  CHECK(first[1].added == first[0].added);
  CHECK(first[2].added == first[0].added);
  for (std::size_t k = 0; k < 3; ++k) CHECK(first[k].graph.fields() == t.frames[k].fields());

  const auto per = rewire_trajectory(t, cfg, TrajectoryMode::per_frame);
  REQUIRE(per.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(per[k] == piorf(t.frames[k], cfg));

  // A velocity field whose far point moves between frames.
  Trajectory moving;
  moving.static_mesh = true;
  moving.frames = {p4_flow(), with_velocities(oracle::path(4), {{0, 0}, {1, 0}, {7, 0}, {5, 0}})};
  const auto pf = rewire_trajectory(moving, piorf_config(0.25), TrajectoryMode::per_frame);
  const auto ff = rewire_trajectory(moving, piorf_config(0.25), TrajectoryMode::first_frame);
  CHECK(pf[1].added[0].target == 2);
  CHECK(ff[1].added[0].target == 3);

  Trajectory dynamic;
  dynamic.static_mesh = false;
  dynamic.frames = {p4_flow(), with_velocities(oracle::path(5), {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {9, 0}})};
  CHECK_THROWS_AS(rewire_trajectory(dynamic, piorf_config(0.25), TrajectoryMode::first_frame), InvalidInput);
  const auto dyn = rewire_trajectory(dynamic, piorf_config(0.25), TrajectoryMode::per_frame);
  for (std::size_t k = 0; k < 2; ++k)
    for (const AddedEdge& a : dyn[k].added) CHECK(a.target < dynamic.frames[k].node_count());
}
