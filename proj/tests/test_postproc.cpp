#include <doctest.h>

#include <cstdlib>
#include <set>

#include "pathgan/postproc.hpp"
#include "pathgan/rng.hpp"

using namespace pathgan;

namespace {

ClassRaster raster_from_rows(const std::vector<std::string>& rows) {
  ClassRaster r(static_cast<int>(rows[0].size()),
                static_cast<int>(rows.size()));
  for (int row = 0; row < r.height; ++row) {
    for (int col = 0; col < r.width; ++col) {
      switch (rows[row][col]) {
        case '#': r.at(row, col) = CellClass::Blocked; break;
        case '*': r.at(row, col) = CellClass::Path; break;
        default: r.at(row, col) = CellClass::Free; break;
      }
    }
  }
  return r;
}

std::set<Cell> blocked_cells(const ClassRaster& r) {
  std::set<Cell> out;
  for (int row = 0; row < r.height; ++row) {
    for (int col = 0; col < r.width; ++col) {
      if (r.at(row, col) == CellClass::Blocked) out.insert({row, col});
    }
  }
  return out;
}

std::vector<Cell> path_cells(const ClassRaster& r) {
  std::vector<Cell> out;
  for (int row = 0; row < r.height; ++row) {
    for (int col = 0; col < r.width; ++col) {
      if (r.at(row, col) == CellClass::Path) out.push_back({row, col});
    }
  }
  return out;
}

int path_components(const ClassRaster& r) {
  return static_cast<int>(
      connected_components(path_cells(r), r.width, r.height).size());
}

// Fuzz raster with unblocked start/goal, as left by obstacle transfer.
struct Fuzzed {
  ClassRaster raster;
  Cell start, goal;
};

Fuzzed fuzz_raster(Rng& rng, int size) {
  ClassRaster r(size, size);
  for (auto& label : r.labels) {
    const double u = rng.next_double();
    label = u < 0.25 ? CellClass::Blocked
                     : (u < 0.45 ? CellClass::Path : CellClass::Free);
  }
  auto pick_free = [&]() {
    while (true) {
      const Cell c{static_cast<int>(rng.next_below(size)),
                   static_cast<int>(rng.next_below(size))};
      if (r.at(c) != CellClass::Blocked) return c;
    }
  };
  const Cell start = pick_free();
  const Cell goal = pick_free();
  return {std::move(r), start, goal};
}

}  // namespace

TEST_SUITE_BEGIN("postproc");

TEST_CASE("transfer_obstacles restores the exact blocked set") {
  Grid g(4, 4);
  g.set_blocked({1, 1}, true);
  g.set_blocked({2, 3}, true);

  ClassRaster generated = raster_from_rows({"....",
                                            ".*..",
                                            "..#.",
                                            "####"});
  const ClassRaster out = transfer_obstacles(g, generated);
  CHECK(blocked_cells(out) == std::set<Cell>{{1, 1}, {2, 3}});
  // The generated path through the obstacle was overwritten.
  CHECK(out.at(1, 1) == CellClass::Blocked);
  // Hallucinated obstacles on free cells are cleared.
  CHECK(out.at(3, 0) == CellClass::Free);
  CHECK(out.at(2, 2) == CellClass::Free);
}

TEST_CASE("transfer_obstacles is the identity on conforming rasters") {
  Grid g(3, 3);
  g.set_blocked({0, 2}, true);
  const ClassRaster gt = raster_from_rows({"**#",
                                           ".*.",
                                           "..."});
  CHECK(transfer_obstacles(g, gt) == gt);
}

TEST_CASE("transfer_obstacles preserves the blocked set under fuzz") {
  Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    Grid g(8, 8);
    for (int r = 0; r < 8; ++r) {
      for (int c = 0; c < 8; ++c) {
        if (rng.next_double() < 0.3) g.set_blocked({r, c}, true);
      }
    }
    const Fuzzed f = fuzz_raster(rng, 8);
    const ClassRaster out = transfer_obstacles(g, f.raster);
    std::set<Cell> expected;
    for (int r = 0; r < 8; ++r) {
      for (int c = 0; c < 8; ++c) {
        if (g.blocked({r, c})) expected.insert({r, c});
      }
    }
    CHECK(blocked_cells(out) == expected);
  }
}

TEST_CASE("bresenham endpoints and straight lines") {
  CHECK(bresenham({3, 3}, {3, 3}) == std::vector<Cell>{{3, 3}});
  const auto line = bresenham({0, 0}, {0, 4});
  REQUIRE(line.size() == 5);
  for (int c = 0; c <= 4; ++c) CHECK(line[c] == Cell{0, c});
}

TEST_CASE("bresenham stays closest to the ideal line") {
  // (0,0) -> (2,5): the major axis is the column; per column the row must
  // be a nearest integer to the exact line (|2*(row*dc - col*dr)| <= dc).
  const auto cells = bresenham({0, 0}, {2, 5});
  REQUIRE(cells.size() == 6);
  for (const Cell& c : cells) {
    CHECK(std::abs(2 * (c.row * 5 - c.col * 2)) <= 5);
  }
  for (std::size_t i = 1; i < cells.size(); ++i) {
    CHECK(cells[i].col == cells[i - 1].col + 1);
  }
}

TEST_CASE("bresenham is 8-adjacent in every direction") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Cell a{static_cast<int>(rng.next_below(12)),
                 static_cast<int>(rng.next_below(12))};
    const Cell b{static_cast<int>(rng.next_below(12)),
                 static_cast<int>(rng.next_below(12))};
    const auto cells = bresenham(a, b);
    REQUIRE(!cells.empty());
    CHECK(cells.front() == a);
    CHECK(cells.back() == b);
    for (std::size_t i = 1; i < cells.size(); ++i) {
      const int dr = std::abs(cells[i].row - cells[i - 1].row);
      const int dc = std::abs(cells[i].col - cells[i - 1].col);
      CHECK(std::max(dr, dc) == 1);
    }
  }
}

TEST_CASE("fill_gaps bridges components across free space") {
  ClassRaster r = raster_from_rows({"**......",
                                    "........",
                                    "....**..",
                                    "........"});
  const ClassRaster out = fill_gaps(r, {0, 0}, {2, 5});
  CHECK(path_components(out) == 1);
}

TEST_CASE("fill_gaps leaves gaps across solid walls") {
  ClassRaster r = raster_from_rows({"*.#..",
                                    "..#..",
                                    "..#.*"});
  const ClassRaster out = fill_gaps(r, {0, 0}, {2, 4});
  CHECK(path_components(out) == 2);  // the wall keeps the gap
  CHECK(out.at(0, 0) == CellClass::Path);
  CHECK(out.at(2, 4) == CellClass::Path);
}

TEST_CASE("fill_gaps is a fixpoint on already-connected paths") {
  ClassRaster r = raster_from_rows({"***..",
                                    "..**.",
                                    "....*"});
  const ClassRaster out = fill_gaps(r, {0, 0}, {2, 4});
  CHECK(out == r);
}

TEST_CASE("fill_gaps refuses to cut corners") {
  // The bridging segment (0,0)->(2,2) is free of blocked cells, but its
  // second diagonal step squeezes between (1,2) and (2,1); the connection
  // must be skipped and the gap stays.
  ClassRaster r = raster_from_rows({"*..",
                                    "..#",
                                    ".#*"});
  const ClassRaster out = fill_gaps(r, {0, 0}, {2, 2});
  CHECK(out == r);
  CHECK(path_components(out) == 2);
}

TEST_CASE("fill_gaps properties under fuzz") {
  Rng rng(321);
  for (int trial = 0; trial < 60; ++trial) {
    const Fuzzed f = fuzz_raster(rng, 10);
    const int before = [&] {
      ClassRaster with_endpoints = f.raster;
      with_endpoints.at(f.start) = CellClass::Path;
      with_endpoints.at(f.goal) = CellClass::Path;
      return path_components(with_endpoints);
    }();

    const ClassRaster once = fill_gaps(f.raster, f.start, f.goal);
    const ClassRaster twice = fill_gaps(once, f.start, f.goal);
    CHECK(once == twice);  // idempotent
    CHECK(path_components(once) <= before);
    CHECK(blocked_cells(once) == blocked_cells(f.raster));
    // Never removes existing PATH cells, never paints blocked ones.
    for (int row = 0; row < 10; ++row) {
      for (int col = 0; col < 10; ++col) {
        if (f.raster.at(row, col) == CellClass::Path) {
          CHECK(once.at(row, col) == CellClass::Path);
        }
        if (f.raster.at(row, col) == CellClass::Blocked) {
          CHECK(once.at(row, col) == CellClass::Blocked);
        }
      }
    }
  }
}

TEST_SUITE_END();
