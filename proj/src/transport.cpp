#include "ricci/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ricci/errors.hpp"

namespace ricci {

namespace {

// Spanning tree of basic cells over the bipartite row/column node set.
// Rows are tree nodes [0, m), columns are [m, m + n).
class BasisTree {
 public:
  BasisTree(std::size_t m, std::size_t n) : m_(m), n_(n), adj_(m + n) {}

  void rebuild(const std::vector<char>& basic) {
    for (auto& a : adj_) a.clear();
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) {
        if (basic[r * n_ + c]) {
          adj_[r].push_back(m_ + c);
          adj_[m_ + c].push_back(r);
        }
      }
    }
  }

  // u_r + v_c == cost_rc on every basic cell, anchored at u_0 = 0.
  void potentials(std::span<const double> cost, std::vector<double>& u, std::vector<double>& v) {
    std::vector<double> pot(m_ + n_, 0.0);
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b : adj_[a]) {
        if (seen[b]) continue;
        seen[b] = 1;
        const bool a_is_row = a < m_;
        const std::size_t r = a_is_row ? a : b;
        const std::size_t c = (a_is_row ? b : a) - m_;
        pot[b] = cost[r * n_ + c] - pot[a];
        stack.push_back(b);
      }
    }
    u.assign(pot.begin(), pot.begin() + static_cast<std::ptrdiff_t>(m_));
    v.assign(pot.begin() + static_cast<std::ptrdiff_t>(m_), pot.end());
  }

  // Tree path from row `r` to column `c`, as the sequence of cells visited.
  std::vector<std::size_t> path_cells(std::size_t r, std::size_t c) {
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> parent(m_ + n_, none);
    std::vector<std::size_t> queue{r};
    parent[r] = r;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      std::size_t a = queue[head];
      if (a == m_ + c) break;
      for (std::size_t b : adj_[a]) {
        if (parent[b] == none) {
          parent[b] = a;
          queue.push_back(b);
        }
      }
    }
    std::vector<std::size_t> cells;
    for (std::size_t b = m_ + c; b != r; b = parent[b]) {
      std::size_t a = parent[b];
      const std::size_t row = a < m_ ? a : b;
      const std::size_t col = (a < m_ ? b : a) - m_;
      cells.push_back(row * n_ + col);
    }
    std::reverse(cells.begin(), cells.end());
    return cells;
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<std::vector<std::size_t>> adj_;
};

}  // namespace

TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              std::span<const double> cost) {
  const std::size_t m = supply.size();
  const std::size_t n = demand.size();
  if (m == 0 || n == 0) throw InvalidInput("transport: empty marginal");
  if (cost.size() != m * n) throw InvalidInput("transport: cost matrix has wrong size");

  double total_a = 0.0;
  double total_b = 0.0;
  for (double a : supply) {
    if (!(a >= 0.0)) throw InvalidInput("transport: negative supply");
    total_a += a;
  }
  for (double b : demand) {
    if (!(b >= 0.0)) throw InvalidInput("transport: negative demand");
    total_b += b;
  }
  if (std::abs(total_a - total_b) > 1e-9 * std::max(1.0, total_a)) {
    throw InvalidInput("transport: unbalanced marginals");
  }
  double cost_scale = 1.0;
  for (double c : cost) {
    if (!std::isfinite(c)) throw InvalidInput("transport: non-finite cost");
    cost_scale = std::max(cost_scale, std::abs(c));
  }

  TransportPlan plan;
  plan.rows = m;
  plan.cols = n;
  plan.flow.assign(m * n, 0.0);
  std::vector<char> basic(m * n, 0);

  // Northwest corner: a staircase of exactly m + n - 1 basic cells.
  {
    std::vector<double> ra(supply.begin(), supply.end());
    std::vector<double> rb(demand.begin(), demand.end());
    std::size_t r = 0;
    std::size_t c = 0;
    while (true) {
      const double x = std::min(ra[r], rb[c]);
      plan.flow[r * n + c] = x;
      basic[r * n + c] = 1;
      ra[r] -= x;
      rb[c] -= x;
      if (r == m - 1 && c == n - 1) break;
      if (r == m - 1) {
        ++c;
      } else if (c == n - 1) {
        ++r;
      } else if (ra[r] <= rb[c]) {
        ++r;
      } else {
        ++c;
      }
    }
  }

  BasisTree tree(m, n);
  std::vector<double> u;
  std::vector<double> v;
  const double tol = 1e-12 * cost_scale;
  const std::size_t dantzig_limit = 20 * m * n + 50;
  const std::size_t hard_limit = dantzig_limit + 2000 * m * n + 1000;

  for (std::size_t iter = 0;; ++iter) {
    if (iter > hard_limit) throw Error("transport: simplex iteration limit exceeded");
    const bool bland = iter >= dantzig_limit;

    tree.rebuild(basic);
    tree.potentials(cost, u, v);

    std::size_t enter = m * n;
    double best = -tol;
    for (std::size_t r = 0; r < m && !(bland && enter < m * n); ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        const std::size_t k = r * n + c;
        if (basic[k]) continue;
        const double reduced = cost[k] - u[r] - v[c];
        if (reduced < best) {
          best = reduced;
          enter = k;
          if (bland) break;
        }
      }
    }
    if (enter == m * n) break;

    const std::size_t er = enter / n;
    const std::size_t ec = enter % n;
    const std::vector<std::size_t> cycle = tree.path_cells(er, ec);

    // Cells at even positions along the path lose flow, odd positions gain.
    std::size_t leave = m * n;
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < cycle.size(); p += 2) {
      const double x = plan.flow[cycle[p]];
      if (x < theta || (bland && x == theta && cycle[p] < leave)) {
        theta = x;
        leave = cycle[p];
      }
    }
    theta = std::max(theta, 0.0);
    plan.flow[enter] = theta;
    for (std::size_t p = 0; p < cycle.size(); ++p) {
      plan.flow[cycle[p]] += (p % 2 == 0) ? -theta : theta;
    }
    plan.flow[leave] = 0.0;
    basic[enter] = 1;
    basic[leave] = 0;
  }

  double total = 0.0;
  for (std::size_t k = 0; k < m * n; ++k) {
    if (plan.flow[k] < 0.0) plan.flow[k] = 0.0;
    total += plan.flow[k] * cost[k];
  }
  plan.cost = total;
  return plan;
}

}  // namespace ricci
