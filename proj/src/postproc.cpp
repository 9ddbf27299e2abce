#include "pathgan/postproc.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace pathgan {

ClassRaster transfer_obstacles(const Grid& grid,
                               const ClassRaster& generated) {
  if (grid.width() != generated.width || grid.height() != generated.height) {
    throw std::invalid_argument("transfer_obstacles: dimension mismatch");
  }
  ClassRaster out = generated;
  for (int r = 0; r < out.height; ++r) {
    for (int c = 0; c < out.width; ++c) {
      if (grid.blocked({r, c})) {
        out.at(r, c) = CellClass::Blocked;
      } else if (out.at(r, c) == CellClass::Blocked) {
        out.at(r, c) = CellClass::Free;
      }
    }
  }
  return out;
}

std::vector<Cell> bresenham(Cell a, Cell b) {
  std::vector<Cell> cells;
  int x0 = a.col, y0 = a.row;
  const int x1 = b.col, y1 = b.row;
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    cells.push_back({y0, x0});
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
  return cells;
}

namespace {

bool raster_blocked(const ClassRaster& r, Cell c) {
  return r.at(c) == CellClass::Blocked;
}

// Segment is traversable: no blocked cell, no diagonal step squeezing
// between two blocked flanking cells.
bool segment_clear(const ClassRaster& raster, const std::vector<Cell>& seg) {
  for (const Cell& c : seg) {
    if (raster_blocked(raster, c)) return false;
  }
  for (std::size_t i = 1; i < seg.size(); ++i) {
    const int dr = seg[i].row - seg[i - 1].row;
    const int dc = seg[i].col - seg[i - 1].col;
    if (dr != 0 && dc != 0) {
      if (raster_blocked(raster, {seg[i - 1].row + dr, seg[i - 1].col}) &&
          raster_blocked(raster, {seg[i - 1].row, seg[i - 1].col + dc})) {
        return false;
      }
    }
  }
  return true;
}

std::int64_t sq_dist(Cell a, Cell b) {
  const std::int64_t dr = a.row - b.row;
  const std::int64_t dc = a.col - b.col;
  return dr * dr + dc * dc;
}

struct Connection {
  std::int64_t d2 = std::numeric_limits<std::int64_t>::max();
  Cell from{};  // in the start component
  Cell to{};    // in the other component
};

// Closest pair between two components; cells are row-major sorted, so the
// scan order is the tie-break.
Connection closest_pair(const std::vector<Cell>& from,
                        const std::vector<Cell>& to) {
  Connection best;
  for (const Cell& f : from) {
    for (const Cell& t : to) {
      const std::int64_t d2 = sq_dist(f, t);
      if (d2 < best.d2) best = {d2, f, t};
    }
  }
  return best;
}

}  // namespace

ClassRaster fill_gaps(ClassRaster raster, Cell start, Cell goal) {
  if (!raster.in_bounds(start) || !raster.in_bounds(goal)) {
    throw std::invalid_argument("fill_gaps: start/goal out of bounds");
  }
  if (raster.at(start) == CellClass::Blocked ||
      raster.at(goal) == CellClass::Blocked) {
    throw std::invalid_argument("fill_gaps: start/goal on a blocked cell");
  }
  raster.at(start) = CellClass::Path;
  raster.at(goal) = CellClass::Path;

  while (true) {
    std::vector<Cell> path_cells;
    for (int r = 0; r < raster.height; ++r) {
      for (int c = 0; c < raster.width; ++c) {
        if (raster.at(r, c) == CellClass::Path) path_cells.push_back({r, c});
      }
    }
    auto components =
        connected_components(path_cells, raster.width, raster.height);
    if (components.size() <= 1) break;

    std::size_t start_comp = 0;
    for (std::size_t i = 0; i < components.size(); ++i) {
      for (const Cell& c : components[i]) {
        if (c == start) {
          start_comp = i;
        }
      }
    }

    // Candidate connections from the start component, nearest first.
    std::vector<std::pair<Connection, std::size_t>> candidates;
    for (std::size_t i = 0; i < components.size(); ++i) {
      if (i == start_comp) continue;
      candidates.push_back(
          {closest_pair(components[start_comp], components[i]), i});
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) {
                if (a.first.d2 != b.first.d2) return a.first.d2 < b.first.d2;
                if (a.first.from != b.first.from)
                  return a.first.from < b.first.from;
                return a.first.to < b.first.to;
              });

    bool drew = false;
    for (const auto& [conn, comp_idx] : candidates) {
      (void)comp_idx;
      const auto seg = bresenham(conn.from, conn.to);
      if (!segment_clear(raster, seg)) continue;
      for (const Cell& c : seg) raster.at(c) = CellClass::Path;
      drew = true;
      break;  // components changed; recompute
    }
    if (!drew) break;  // every remaining connection crosses an obstacle
  }
  return raster;
}

}  // namespace pathgan
