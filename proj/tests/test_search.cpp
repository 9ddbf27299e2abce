#include <doctest.h>

#include <cmath>

#include "pathgan/rng.hpp"
#include "pathgan/search.hpp"

using namespace pathgan;

namespace {

Grid random_grid(Rng& rng, int size, double density) {
  Grid g(size, size);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      if (rng.next_double() < density) g.set_blocked({r, c}, true);
    }
  }
  // Endpoints in the outer columns, forced free.
  g.start = {static_cast<int>(rng.next_below(size)), 0};
  g.goal = {static_cast<int>(rng.next_below(size)), size - 1};
  g.set_blocked(g.start, false);
  g.set_blocked(g.goal, false);
  return g;
}

}  // namespace

TEST_SUITE_BEGIN("search");

TEST_CASE("octile distance basics") {
  CHECK(octile({0, 0}, {0, 0}) == StepCost{0, 0});
  CHECK(octile({0, 0}, {3, 3}) == StepCost{0, 3});  // 3*sqrt2
  CHECK(octile({0, 0}, {2, 5}) == StepCost{3, 2});  // 2*sqrt2 + 3
  CHECK(octile({0, 0}, {2, 5}).value() ==
        doctest::Approx(2.0 * std::sqrt(2.0) + 3.0));
}

TEST_CASE("octile is consistent along legal steps") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Cell u{static_cast<int>(rng.next_below(16)),
                 static_cast<int>(rng.next_below(16))};
    const Cell goal{static_cast<int>(rng.next_below(16)),
                    static_cast<int>(rng.next_below(16))};
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const Cell v{u.row + dr, u.col + dc};
        const StepCost step =
            (dr != 0 && dc != 0) ? StepCost{0, 1} : StepCost{1, 0};
        CHECK(octile(u, goal) <= step + octile(v, goal));
      }
    }
  }
}

TEST_CASE("exact cost comparison agrees with floating point") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const StepCost a{static_cast<std::int64_t>(rng.next_below(50)),
                     static_cast<std::int64_t>(rng.next_below(50))};
    const StepCost b{static_cast<std::int64_t>(rng.next_below(50)),
                     static_cast<std::int64_t>(rng.next_below(50))};
    const double diff = a.value() - b.value();
    if (std::abs(diff) > 1e-9) {
      CHECK(a.compare(b) == (diff < 0 ? -1 : 1));
    } else {
      CHECK(a.compare(b) == 0);
    }
  }
}

TEST_CASE("astar on start == goal") {
  Grid g(4, 4);
  g.start = g.goal = {2, 2};
  const auto result = astar(g);
  REQUIRE(result.found());
  CHECK(*result.path == Path{{2, 2}});
  CHECK(result.cost == StepCost{0, 0});
}

TEST_CASE("astar crosses an empty 8x8 grid diagonally") {
  Grid g(8, 8);
  g.start = {0, 0};
  g.goal = {7, 7};
  const auto result = astar(g);
  REQUIRE(result.found());
  CHECK(result.cost == StepCost{0, 7});
  CHECK(validate_path(g, *result.path).ok);
}

TEST_CASE("dijkstra walks a straight corridor at column distance") {
  Grid g(8, 3);
  g.start = {1, 0};
  g.goal = {1, 7};
  const auto result = dijkstra_reference(g);
  REQUIRE(result.found());
  CHECK(result.cost == StepCost{7, 0});
}

TEST_CASE("walled-off goal yields NoPath for both solvers") {
  Grid g(5, 5);
  for (int r = 0; r < 5; ++r) g.set_blocked({r, 3}, true);
  g.start = {2, 0};
  g.goal = {2, 4};
  CHECK(!astar(g).found());
  CHECK(!dijkstra_reference(g).found());
}

TEST_CASE("astar cost equals the dijkstra oracle on random 16x16 grids") {
  Rng rng(123);
  int solvable = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Grid g = random_grid(rng, 16, 0.1 + 0.2 * rng.next_double());
    const auto a = astar(g);
    const auto d = dijkstra_reference(g);
    REQUIRE(a.found() == d.found());
    if (!a.found()) continue;
    ++solvable;
    CHECK(a.cost == d.cost);
    CHECK(validate_path(g, *a.path).ok);
    CHECK(validate_path(g, *d.path).ok);
    // Optimal cost can never beat the heuristic lower bound.
    CHECK(octile(g.start, g.goal) <= a.cost);
  }
  CHECK(solvable > 50);
}

TEST_CASE("astar is deterministic") {
  Rng rng(77);
  const Grid g = random_grid(rng, 16, 0.25);
  const auto a = astar(g);
  const auto b = astar(g);
  REQUIRE(a.found() == b.found());
  if (a.found()) {
    CHECK(*a.path == *b.path);
    CHECK(a.expanded == b.expanded);
  }
}

TEST_SUITE_END();
