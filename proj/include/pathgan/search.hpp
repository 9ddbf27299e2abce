#pragma once

#include <cstdint>
#include <optional>

#include "pathgan/grid.hpp"

namespace pathgan {

// Exact path cost c + d*sqrt(2) kept as the integer pair (c, d) so cost
// comparisons never go through floating point.
struct StepCost {
  std::int64_t cardinal = 0;
  std::int64_t diagonal = 0;

  double value() const;

  StepCost operator+(StepCost o) const {
    return {cardinal + o.cardinal, diagonal + o.diagonal};
  }
  bool operator==(const StepCost&) const = default;

  // Sign of (*this - o) as a real number.
  int compare(StepCost o) const;
  bool operator<(StepCost o) const { return compare(o) < 0; }
  bool operator<=(StepCost o) const { return compare(o) <= 0; }
};

struct SearchResult {
  std::optional<Path> path;
  StepCost cost{};
  std::int64_t expanded = 0;

  bool found() const { return path.has_value(); }
};

// Octile distance: sqrt(2)*min(|dr|,|dc|) + (max-min), exact as a StepCost.
StepCost octile(Cell a, Cell b);

// Optimal-cost path between grid.start and grid.goal under the shared
// adjacency rules (8-connected, no corner cutting). Ties on f are broken by
// larger g, then by row-major cell order, so results are reproducible.
SearchResult astar(const Grid& grid);

// Uniform-cost reference solver (A* with zero heuristic), kept as an
// independent implementation for oracle checks against astar.
SearchResult dijkstra_reference(const Grid& grid);

}  // namespace pathgan
