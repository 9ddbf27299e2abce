#include "pathgan/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace pathgan {

double StepCost::value() const {
  return static_cast<double>(cardinal) +
         static_cast<double>(diagonal) * std::sqrt(2.0);
}

int StepCost::compare(StepCost o) const {
  const std::int64_t x = cardinal - o.cardinal;   // + y*sqrt2 vs 0
  const std::int64_t y = diagonal - o.diagonal;
  if (x == 0 && y == 0) return 0;
  if (x >= 0 && y >= 0) return 1;
  if (x <= 0 && y <= 0) return -1;
  // Opposite signs: compare x^2 vs 2y^2. Path costs stay far below the
  // ranges where these squares could overflow.
  const std::int64_t x2 = x * x;
  const std::int64_t y2 = 2 * y * y;
  if (x > 0) {  // y < 0: x + y*sqrt2 > 0  <=>  x^2 > 2y^2
    return x2 > y2 ? 1 : (x2 < y2 ? -1 : 0);
  }
  // x < 0, y > 0: x + y*sqrt2 > 0  <=>  2y^2 > x^2
  return y2 > x2 ? 1 : (y2 < x2 ? -1 : 0);
}

StepCost octile(Cell a, Cell b) {
  const std::int64_t dr = std::abs(a.row - b.row);
  const std::int64_t dc = std::abs(a.col - b.col);
  const std::int64_t lo = std::min(dr, dc);
  const std::int64_t hi = std::max(dr, dc);
  return {hi - lo, lo};
}

namespace {

constexpr StepCost kUnset{std::numeric_limits<std::int64_t>::max(), 0};

void check_endpoints(const Grid& grid) {
  if (!grid.in_bounds(grid.start) || !grid.in_bounds(grid.goal)) {
    throw std::invalid_argument("search: start/goal out of bounds");
  }
  if (grid.blocked(grid.start) || grid.blocked(grid.goal)) {
    throw std::invalid_argument("search: start/goal blocked");
  }
}

Path reconstruct(const std::vector<std::int32_t>& parent, int width,
                 std::int32_t goal_idx) {
  Path path;
  for (std::int32_t at = goal_idx; at >= 0; at = parent[at]) {
    path.push_back({at / width, at % width});
  }
  std::reverse(path.begin(), path.end());
  return path;
}

struct AstarEntry {
  StepCost f;
  StepCost g;
  std::int32_t cell;  // row-major index
};

// Priority: smallest f, then largest g, then smallest row-major index.
struct AstarOrder {
  bool operator()(const AstarEntry& a, const AstarEntry& b) const {
    const int fc = a.f.compare(b.f);
    if (fc != 0) return fc > 0;
    const int gc = a.g.compare(b.g);
    if (gc != 0) return gc < 0;
    return a.cell > b.cell;
  }
};

}  // namespace

SearchResult astar(const Grid& grid) {
  check_endpoints(grid);

  const int width = grid.width();
  const std::size_t n = static_cast<std::size_t>(width) * grid.height();
  std::vector<StepCost> g(n, kUnset);
  std::vector<std::int32_t> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);

  const auto start_idx = static_cast<std::int32_t>(grid.index(grid.start));
  const auto goal_idx = static_cast<std::int32_t>(grid.index(grid.goal));

  std::priority_queue<AstarEntry, std::vector<AstarEntry>, AstarOrder> open;
  g[start_idx] = {0, 0};
  open.push({octile(grid.start, grid.goal), {0, 0}, start_idx});

  SearchResult result;
  while (!open.empty()) {
    const AstarEntry top = open.top();
    open.pop();
    if (closed[top.cell]) continue;  // stale entry
    closed[top.cell] = 1;
    ++result.expanded;

    if (top.cell == goal_idx) {
      result.path = reconstruct(parent, width, goal_idx);
      result.cost = top.g;
      return result;
    }

    const Cell cur{top.cell / width, top.cell % width};
    for (const Cell& nb : neighbors(grid, cur)) {
      const auto nidx = static_cast<std::int32_t>(grid.index(nb));
      if (closed[nidx]) continue;
      const bool diag = nb.row != cur.row && nb.col != cur.col;
      const StepCost ng = top.g + (diag ? StepCost{0, 1} : StepCost{1, 0});
      if (g[nidx] == kUnset || ng < g[nidx]) {
        g[nidx] = ng;
        parent[nidx] = top.cell;
        open.push({ng + octile(nb, grid.goal), ng, nidx});
      }
    }
  }
  return result;  // NoPath
}

// Deliberately written as its own plain Dijkstra rather than a call into the
// A* machinery, so cost-equality tests compare two code paths.
SearchResult dijkstra_reference(const Grid& grid) {
  check_endpoints(grid);

  const int width = grid.width();
  const int height = grid.height();
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<StepCost> dist(n, kUnset);
  std::vector<std::int32_t> parent(n, -1);
  std::vector<std::uint8_t> done(n, 0);

  const auto start_idx = static_cast<std::int32_t>(grid.index(grid.start));
  const auto goal_idx = static_cast<std::int32_t>(grid.index(grid.goal));

  using QEntry = std::pair<StepCost, std::int32_t>;
  auto order = [](const QEntry& a, const QEntry& b) {
    const int c = a.first.compare(b.first);
    if (c != 0) return c > 0;
    return a.second > b.second;
  };
  std::priority_queue<QEntry, std::vector<QEntry>, decltype(order)> queue(
      order);

  dist[start_idx] = {0, 0};
  queue.push({{0, 0}, start_idx});

  SearchResult result;
  while (!queue.empty()) {
    const auto [d, idx] = queue.top();
    queue.pop();
    if (done[idx]) continue;
    done[idx] = 1;
    ++result.expanded;
    if (idx == goal_idx) break;

    const Cell cur{idx / width, idx % width};
    for (const Cell& nb : neighbors(grid, cur)) {
      const auto nidx = static_cast<std::int32_t>(grid.index(nb));
      if (done[nidx]) continue;
      const bool diag = nb.row != cur.row && nb.col != cur.col;
      const StepCost nd = d + (diag ? StepCost{0, 1} : StepCost{1, 0});
      if (dist[nidx] == kUnset || nd < dist[nidx]) {
        dist[nidx] = nd;
        parent[nidx] = idx;
        queue.push({nd, nidx});
      }
    }
  }

  if (done[goal_idx]) {
    result.path = reconstruct(parent, width, goal_idx);
    result.cost = dist[goal_idx];
  }
  return result;
}

}  // namespace pathgan
