#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace pathgan {

// (row, col), origin top-left, matching raster order.
struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

enum class CellClass : std::uint8_t { Free = 0, Blocked = 1, Path = 2 };

// 2D grid of free/blocked cells with distinguished start and goal.
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height)
      : width_(width), height_(height),
        blocked_(static_cast<std::size_t>(width) * height, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }

  bool in_bounds(Cell c) const {
    return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_;
  }
  bool blocked(Cell c) const { return blocked_[index(c)] != 0; }
  void set_blocked(Cell c, bool b) { blocked_[index(c)] = b ? 1 : 0; }

  std::int64_t blocked_count() const;
  double blocked_density() const;

  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.row) * width_ + c.col;
  }

  Cell start{};
  Cell goal{};

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> blocked_;
};

using Path = std::vector<Cell>;

// Per-cell 3-class label map, same dimensions as the originating grid.
struct ClassRaster {
  int width = 0;
  int height = 0;
  std::vector<CellClass> labels;

  ClassRaster() = default;
  ClassRaster(int w, int h)
      : width(w), height(h),
        labels(static_cast<std::size_t>(w) * h, CellClass::Free) {}

  CellClass& at(int row, int col) {
    return labels[static_cast<std::size_t>(row) * width + col];
  }
  CellClass at(int row, int col) const {
    return labels[static_cast<std::size_t>(row) * width + col];
  }
  CellClass& at(Cell c) { return at(c.row, c.col); }
  CellClass at(Cell c) const { return at(c.row, c.col); }
  bool in_bounds(Cell c) const {
    return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width;
  }
  bool operator==(const ClassRaster&) const = default;
};

enum class PathViolation {
  None,
  Empty,
  OutOfBounds,
  EndpointMismatch,
  BlockedCell,
  Repeat,
  Gap,
  CornerCut,
};

std::string to_string(PathViolation v);

struct ValidityReport {
  bool ok = false;
  PathViolation kind = PathViolation::None;
  // Index into the path of the offending cell (for pair violations, the
  // first cell of the pair).
  std::size_t index = 0;
};

// Unblocked cells among the <=8 surrounding ones. A diagonal neighbor is
// excluded when it would pass between two diagonally touching blocked cells
// (no corner cutting). Throws std::invalid_argument if c is out of bounds.
std::vector<Cell> neighbors(const Grid& grid, Cell c);

// True when `from` -> `to` is a legal single step: `to` unblocked and
// diagonal steps not squeezing between two blocked flanking cells.
bool step_allowed(const Grid& grid, Cell from, Cell to);

// Checks the path invariants plus endpoint agreement with grid.start/goal.
// Violations are reported, never thrown.
ValidityReport validate_path(const Grid& grid, const Path& path);

// Maximal 8-connected components of a cell mask (plain 8-adjacency; the
// corner-cut rule does not apply to pixel connectivity). Components are
// ordered by their smallest cell in row-major order, cells within a
// component likewise, so output is invariant under input ordering.
std::vector<std::vector<Cell>> connected_components(
    const std::vector<Cell>& mask, int width, int height);

}  // namespace pathgan
