#include "pathgan/grid.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace pathgan {

std::int64_t Grid::blocked_count() const {
  return std::accumulate(blocked_.begin(), blocked_.end(), std::int64_t{0});
}

double Grid::blocked_density() const {
  if (width_ == 0 || height_ == 0) return 0.0;
  return static_cast<double>(blocked_count()) /
         (static_cast<double>(width_) * height_);
}

std::string to_string(PathViolation v) {
  switch (v) {
    case PathViolation::None: return "none";
    case PathViolation::Empty: return "empty";
    case PathViolation::OutOfBounds: return "out-of-bounds";
    case PathViolation::EndpointMismatch: return "endpoint-mismatch";
    case PathViolation::BlockedCell: return "blocked-cell";
    case PathViolation::Repeat: return "repeat";
    case PathViolation::Gap: return "gap";
    case PathViolation::CornerCut: return "corner-cut";
  }
  return "unknown";
}

namespace {
// Row-major sweep over the 3x3 neighborhood, center skipped. Fixed order
// keeps every consumer (A*, gap filling) deterministic.
constexpr int kOffsets[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                {0, 1},   {1, -1}, {1, 0},  {1, 1}};
}  // namespace

bool step_allowed(const Grid& grid, Cell from, Cell to) {
  if (!grid.in_bounds(to) || grid.blocked(to)) return false;
  const int dr = to.row - from.row;
  const int dc = to.col - from.col;
  if (dr != 0 && dc != 0) {
    // Corner cutting: a diagonal move may not pass between two diagonally
    // touching blocked cells.
    const Cell side_a{from.row + dr, from.col};
    const Cell side_b{from.row, from.col + dc};
    if (grid.blocked(side_a) && grid.blocked(side_b)) return false;
  }
  return true;
}

std::vector<Cell> neighbors(const Grid& grid, Cell c) {
  if (!grid.in_bounds(c)) {
    throw std::invalid_argument("neighbors: cell out of bounds");
  }
  std::vector<Cell> out;
  out.reserve(8);
  for (const auto& off : kOffsets) {
    const Cell n{c.row + off[0], c.col + off[1]};
    if (!grid.in_bounds(n)) continue;
    if (step_allowed(grid, c, n)) out.push_back(n);
  }
  return out;
}

ValidityReport validate_path(const Grid& grid, const Path& path) {
  if (path.empty()) return {false, PathViolation::Empty, 0};

  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!grid.in_bounds(path[i])) {
      return {false, PathViolation::OutOfBounds, i};
    }
  }
  if (path.front() != grid.start) {
    return {false, PathViolation::EndpointMismatch, 0};
  }
  if (path.back() != grid.goal) {
    return {false, PathViolation::EndpointMismatch, path.size() - 1};
  }

  std::unordered_set<std::size_t> seen;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const Cell c = path[i];
    if (grid.blocked(c)) return {false, PathViolation::BlockedCell, i};
    if (!seen.insert(grid.index(c)).second) {
      return {false, PathViolation::Repeat, i};
    }
    if (i == 0) continue;
    const Cell p = path[i - 1];
    const int dr = c.row - p.row;
    const int dc = c.col - p.col;
    if (std::max(std::abs(dr), std::abs(dc)) != 1) {
      return {false, PathViolation::Gap, i - 1};
    }
    if (dr != 0 && dc != 0 && !step_allowed(grid, p, c)) {
      return {false, PathViolation::CornerCut, i - 1};
    }
  }
  return {true, PathViolation::None, 0};
}

std::vector<std::vector<Cell>> connected_components(
    const std::vector<Cell>& mask, int width, int height) {
  for (const Cell& c : mask) {
    if (c.row < 0 || c.row >= height || c.col < 0 || c.col >= width) {
      throw std::invalid_argument("connected_components: cell out of bounds");
    }
  }
  std::vector<std::uint8_t> present(static_cast<std::size_t>(width) * height,
                                    0);
  for (const Cell& c : mask) {
    present[static_cast<std::size_t>(c.row) * width + c.col] = 1;
  }

  std::vector<std::vector<Cell>> components;
  std::vector<std::uint8_t> visited(present.size(), 0);
  // Row-major scan makes the component order canonical.
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * width + c;
      if (!present[idx] || visited[idx]) continue;
      std::vector<Cell> comp;
      std::queue<Cell> frontier;
      frontier.push({r, c});
      visited[idx] = 1;
      while (!frontier.empty()) {
        const Cell cur = frontier.front();
        frontier.pop();
        comp.push_back(cur);
        for (const auto& off : kOffsets) {
          const Cell n{cur.row + off[0], cur.col + off[1]};
          if (n.row < 0 || n.row >= height || n.col < 0 || n.col >= width) {
            continue;
          }
          const std::size_t nidx =
              static_cast<std::size_t>(n.row) * width + n.col;
          if (present[nidx] && !visited[nidx]) {
            visited[nidx] = 1;
            frontier.push(n);
          }
        }
      }
      std::sort(comp.begin(), comp.end());
      components.push_back(std::move(comp));
    }
  }
  return components;
}

}  // namespace pathgan
