#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ricci {

// Optimal coupling of a balanced transportation problem.
struct TransportPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> flow;  // row-major, rows x cols
  double cost = 0.0;

  double at(std::size_t r, std::size_t c) const { return flow[r * cols + c]; }
};

// Solves min sum_{rc} flow_rc * cost_rc subject to row sums == supply and
// column sums == demand, flow >= 0, with the transportation simplex
// (northwest-corner start, MODI potentials, stepping-stone pivots; Bland's
// rule takes over after a long run of pivots so degenerate instances cannot
// cycle). `cost` is row-major supply.size() x demand.size(). Supplies and
// demands must be non-negative with equal totals (to 1e-9 relative).
// Throws InvalidInput otherwise.
TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              std::span<const double> cost);

}  // namespace ricci
