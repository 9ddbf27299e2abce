#include <doctest.h>

#include <filesystem>

#include "pathgan/mapgen.hpp"
#include "pathgan/metrics.hpp"
#include "pathgan/postproc.hpp"
#include "pathgan/search.hpp"

using namespace pathgan;
namespace fs = std::filesystem;

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

Grid grid_of(const ClassRaster& r, Cell start, Cell goal) {
  Grid g(r.width, r.height);
  for (int row = 0; row < r.height; ++row) {
    for (int col = 0; col < r.width; ++col) {
      if (r.at(row, col) == CellClass::Blocked) {
        g.set_blocked({row, col}, true);
      }
    }
  }
  g.start = start;
  g.goal = goal;
  return g;
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("mse basics") {
  GrayImage a(4, 4), b(4, 4);
  CHECK(mse(a, b) == 0.0);

  for (auto& p : b.pixels) p = 0;  // all black vs all white
  CHECK(mse(a, b) == doctest::Approx(1.0));

  GrayImage c(4, 4), d(4, 4);
  d.at(2, 2) = kPathPixel;  // one FREE<->PATH pixel
  CHECK(mse(c, d) == doctest::Approx(1.0 / 16.0));

  CHECK(mse(c, d) == mse(d, c));  // symmetric
  GrayImage e(3, 3);
  CHECK_THROWS_AS(mse(a, e), std::invalid_argument);
}

TEST_CASE("count_gaps counts components of path-plus-endpoints minus one") {
  // Connected path through start and goal.
  const ClassRaster ok = raster_from_rows({"****",
                                           "....",
                                           "...."});
  CHECK(count_gaps(ok, {0, 0}, {0, 3}) == 0);

  // No generated path pixels: two singleton endpoint components.
  const ClassRaster empty = raster_from_rows({"....",
                                              "....",
                                              "...."});
  CHECK(count_gaps(empty, {0, 0}, {2, 3}) == 1);

  // Three mutually disconnected segments containing start and goal.
  const ClassRaster frag = raster_from_rows({"**......",
                                             "........",
                                             "...**...",
                                             "........",
                                             "......**"});
  CHECK(count_gaps(frag, {0, 0}, {4, 7}) == 2);
}

TEST_CASE("success requires reachability under the traversal rules") {
  const ClassRaster path = raster_from_rows({"**..",
                                             ".**.",
                                             "..**"});
  const Grid g = grid_of(path, {0, 0}, {2, 3});
  CHECK(success(path, g, {0, 0}, {2, 3}));

  const ClassRaster gap = raster_from_rows({"**..",
                                            "....",
                                            "..**"});
  const Grid g2 = grid_of(gap, {0, 0}, {2, 3});
  CHECK(!success(gap, g2, {0, 0}, {2, 3}));
}

TEST_CASE("success rejects corner-cut squeezes") {
  // The PATH corridor is 8-connected as pixels, but the only move from
  // (0,0) to (1,1) passes between two blocked cells.
  const ClassRaster squeeze = raster_from_rows({"*#.",
                                                "#*.",
                                                ".**"});
  const Grid g = grid_of(squeeze, {0, 0}, {2, 2});
  CHECK(count_gaps(squeeze, {0, 0}, {2, 2}) == 0);  // single pixel component
  CHECK(!success(squeeze, g, {0, 0}, {2, 2}));
}

TEST_CASE("success demands zero gaps on the post-processed raster") {
  // start-goal connected, but a stray fragment never merged.
  const ClassRaster stray = raster_from_rows({"***.",
                                              "....",
                                              ".*.."});
  const Grid g = grid_of(stray, {0, 0}, {0, 2});
  CHECK(count_gaps(stray, {0, 0}, {0, 2}) == 1);
  CHECK(!success(stray, g, {0, 0}, {0, 2}));
}

TEST_CASE("aggregates are recomputable from the per-instance list") {
  std::vector<InstanceEval> evals;
  evals.push_back({"a", 0.5, 2, true, "", ""});
  evals.push_back({"b", 0.1, 0, false, "", ""});
  const EvalAggregates agg = aggregate(evals);
  CHECK(agg.count == 2);
  CHECK(agg.mean_mse == doctest::Approx(0.3));
  CHECK(agg.mean_gaps == doctest::Approx(1.0));
  CHECK(agg.success_rate == doctest::Approx(50.0));
}

TEST_CASE("oracle evaluation scores ground truth perfectly") {
  const fs::path dir = fs::temp_directory_path() / "pathgan_metrics_test";
  fs::remove_all(dir);
  MapGenConfig cfg;
  cfg.width = cfg.height = 16;
  cfg.family = ObstacleFamily::Rect;
  cfg.target_density = 0.2;
  cfg.count = 12;
  cfg.seed = 31337;
  const DatasetManifest manifest = build_dataset(cfg, dir.string());

  for (const std::string split : {"train", "test", "validation"}) {
    EvalOptions options;
    options.split = split;
    options.oracle = true;
    const EvalReport report =
        evaluate_dataset(manifest, dir.string(), options, {});
    CHECK(report.aggregates.success_rate == doctest::Approx(100.0));
    CHECK(report.aggregates.mean_gaps == doctest::Approx(0.0));
    CHECK(report.aggregates.mean_mse == doctest::Approx(0.0));
  }

  // JSON round trip reproduces the report exactly.
  EvalOptions options;
  options.split = "train";
  options.oracle = true;
  const EvalReport report =
      evaluate_dataset(manifest, dir.string(), options, {});
  CHECK(EvalReport::from_json(report.to_json()) == report);

  const std::string csv = report.to_csv();
  CHECK(csv.find("id,mse,gaps,success") == 0);
  CHECK(!report.summary_text().empty());

  fs::remove_all(dir);
}

TEST_SUITE_END();
