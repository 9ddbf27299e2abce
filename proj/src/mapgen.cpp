#include "pathgan/mapgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pathgan/codec.hpp"
#include "pathgan/png_io.hpp"
#include "pathgan/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pathgan {

namespace {

constexpr int kMaxShapeIterations = 10000;
constexpr int kMaxPairAttempts = 32;
constexpr int kMaxInstanceAttempts = 64;
constexpr double kSqrtHalf = 0.70710678118654752440;

int ceil_div(int a, int b) { return (a + b - 1) / b; }

void stamp_axis_rect(Grid& g, Rng& rng) {
  const int smax = ceil_div(g.width(), 4);
  const int w = static_cast<int>(rng.next_int(2, std::max(2, smax)));
  const int h = static_cast<int>(rng.next_int(2, std::max(2, smax)));
  const int r0 = static_cast<int>(rng.next_int(0, g.height() - 1));
  const int c0 = static_cast<int>(rng.next_int(0, g.width() - 1));
  for (int r = r0; r < r0 + h; ++r) {
    for (int c = c0; c < c0 + w; ++c) {
      if (g.in_bounds({r, c})) g.set_blocked({r, c}, true);
    }
  }
}

// Rectangle rotated 45 degrees, rasterized on the diagonal axes
// u = dr + dc, v = dr - dc.
void stamp_rotated_rect(Grid& g, Rng& rng) {
  const int smax = ceil_div(g.width(), 4);
  const int w = static_cast<int>(rng.next_int(2, std::max(2, smax)));
  const int h = static_cast<int>(rng.next_int(2, std::max(2, smax)));
  const int r0 = static_cast<int>(rng.next_int(0, g.height() - 1));
  const int c0 = static_cast<int>(rng.next_int(0, g.width() - 1));
  const int ext_u = std::max<int>(1, static_cast<int>(std::lround(w * kSqrtHalf)));
  const int ext_v = std::max<int>(1, static_cast<int>(std::lround(h * kSqrtHalf)));
  const int reach = ext_u + ext_v;
  for (int r = r0 - reach; r <= r0 + reach; ++r) {
    for (int c = c0 - reach; c <= c0 + reach; ++c) {
      if (!g.in_bounds({r, c})) continue;
      const int u = (r - r0) + (c - c0);
      const int v = (r - r0) - (c - c0);
      if (std::abs(u) <= ext_u && std::abs(v) <= ext_v) {
        g.set_blocked({r, c}, true);
      }
    }
  }
}

void stamp_diamond(Grid& g, Rng& rng) {
  const int s = static_cast<int>(
      rng.next_int(1, std::max(1, ceil_div(g.width(), 8))));
  const int r0 = static_cast<int>(rng.next_int(0, g.height() - 1));
  const int c0 = static_cast<int>(rng.next_int(0, g.width() - 1));
  for (int r = r0 - s; r <= r0 + s; ++r) {
    for (int c = c0 - s; c <= c0 + s; ++c) {
      if (!g.in_bounds({r, c})) continue;
      if (std::abs(r - r0) + std::abs(c - c0) <= s) {
        g.set_blocked({r, c}, true);
      }
    }
  }
}

void stamp_circle(Grid& g, Rng& rng) {
  const int rad = static_cast<int>(
      rng.next_int(1, std::max(1, ceil_div(g.width(), 8))));
  const int r0 = static_cast<int>(rng.next_int(0, g.height() - 1));
  const int c0 = static_cast<int>(rng.next_int(0, g.width() - 1));
  for (int r = r0 - rad; r <= r0 + rad; ++r) {
    for (int c = c0 - rad; c <= c0 + rad; ++c) {
      if (!g.in_bounds({r, c})) continue;
      const int dr = r - r0;
      const int dc = c - c0;
      if (dr * dr + dc * dc <= rad * rad) g.set_blocked({r, c}, true);
    }
  }
}

}  // namespace

std::string to_string(ObstacleFamily f) {
  return f == ObstacleFamily::Rect ? "rect" : "random";
}

ObstacleFamily family_from_string(const std::string& s) {
  if (s == "rect") return ObstacleFamily::Rect;
  if (s == "random") return ObstacleFamily::RandomShapes;
  throw std::invalid_argument("unknown obstacle family: " + s);
}

void MapGenConfig::validate() const {
  if (width < 4 || height < 4) {
    throw std::invalid_argument("grid dimensions must be at least 4x4");
  }
  if (count <= 0) throw std::invalid_argument("instance count must be positive");
  if (family == ObstacleFamily::Rect) {
    if (!(target_density > 0.0 && target_density < 1.0)) {
      throw std::invalid_argument("target density must lie in (0, 1)");
    }
  } else {
    if (!(density_range[0] > 0.0 && density_range[1] < 1.0 &&
          density_range[0] <= density_range[1])) {
      throw std::invalid_argument("density range must lie in (0, 1)");
    }
  }
  const double sum = splits.train + splits.test + splits.validation;
  if (splits.train < 0 || splits.test < 0 || splits.validation < 0 ||
      std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must sum to 1");
  }
}

Grid gen_map(const MapGenConfig& config, std::uint64_t instance_seed) {
  config.validate();
  Rng rng(mix64(config.seed, instance_seed, 0x6d6170ULL));  // map stream

  double target = config.target_density;
  if (config.family == ObstacleFamily::RandomShapes) {
    target = config.density_range[0] +
             (config.density_range[1] - config.density_range[0]) *
                 rng.next_double();
  }

  Grid grid(config.width, config.height);
  const double total = static_cast<double>(config.width) * config.height;
  int iterations = 0;
  while (static_cast<double>(grid.blocked_count()) / total < target) {
    if (++iterations > kMaxShapeIterations) {
      throw GenerationError("density target not reached within iteration cap");
    }
    if (config.family == ObstacleFamily::Rect) {
      if (rng.next_bool()) {
        stamp_rotated_rect(grid, rng);
      } else {
        stamp_axis_rect(grid, rng);
      }
    } else {
      switch (rng.next_below(3)) {
        case 0: stamp_axis_rect(grid, rng); break;
        case 1: stamp_diamond(grid, rng); break;
        default: stamp_circle(grid, rng); break;
      }
    }
  }
  return grid;
}

std::optional<std::pair<Cell, Cell>> place_start_goal(
    const Grid& grid, std::uint64_t instance_seed) {
  const int band = ceil_div(grid.width(), 10);
  std::vector<Cell> left, right;
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < band; ++c) {
      if (!grid.blocked({r, c})) left.push_back({r, c});
    }
    for (int c = grid.width() - band; c < grid.width(); ++c) {
      if (!grid.blocked({r, c})) right.push_back({r, c});
    }
  }
  if (left.empty() || right.empty()) return std::nullopt;

  Rng rng(mix64(instance_seed, 0x7374617274ULL));  // placement stream
  for (int attempt = 0; attempt < kMaxPairAttempts; ++attempt) {
    const Cell start = left[rng.next_below(left.size())];
    const Cell goal = right[rng.next_below(right.size())];
    if (start == goal) continue;
    Grid probe = grid;
    probe.start = start;
    probe.goal = goal;
    if (astar(probe).found()) return std::make_pair(start, goal);
  }
  return std::nullopt;
}

std::array<std::int64_t, 3> split_counts(std::int64_t total,
                                         const SplitFractions& splits) {
  const std::array<double, 3> fracs{splits.train, splits.test,
                                    splits.validation};
  std::array<std::int64_t, 3> counts{};
  std::array<double, 3> remainders{};
  std::int64_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = fracs[i] * static_cast<double>(total);
    counts[i] = static_cast<std::int64_t>(std::floor(exact));
    remainders[i] = exact - std::floor(exact);
    assigned += counts[i];
  }
  // Distribute leftovers by largest remainder; ties go to the earlier split.
  while (assigned < total) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (remainders[i] > remainders[best]) best = i;
    }
    ++counts[best];
    remainders[best] = -1.0;
    ++assigned;
  }
  return counts;
}

namespace {

std::vector<std::string> assign_splits(const MapGenConfig& config) {
  const auto counts = split_counts(config.count, config.splits);
  // Deterministic shuffle: order indices by a per-index hash, slice by the
  // split counts.
  std::vector<std::int64_t> order(config.count);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> keys(config.count);
  for (std::int64_t i = 0; i < config.count; ++i) {
    keys[i] = mix64(config.seed, 0x73706c6974ULL, static_cast<std::uint64_t>(i));
  }
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return a < b;
  });
  std::vector<std::string> splits(config.count);
  for (std::int64_t pos = 0; pos < config.count; ++pos) {
    const std::int64_t idx = order[pos];
    if (pos < counts[0]) {
      splits[idx] = "train";
    } else if (pos < counts[0] + counts[1]) {
      splits[idx] = "test";
    } else {
      splits[idx] = "validation";
    }
  }
  return splits;
}

std::string instance_id(std::int64_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06lld", static_cast<long long>(index));
  return buf;
}

json config_to_json(const MapGenConfig& c) {
  json j;
  j["width"] = c.width;
  j["height"] = c.height;
  j["family"] = to_string(c.family);
  if (c.family == ObstacleFamily::Rect) {
    j["target_density"] = c.target_density;
  } else {
    j["density_range"] = {c.density_range[0], c.density_range[1]};
  }
  j["seed"] = c.seed;
  j["count"] = c.count;
  j["splits"] = {{"train", c.splits.train},
                 {"test", c.splits.test},
                 {"validation", c.splits.validation}};
  return j;
}

MapGenConfig config_from_json(const json& j) {
  MapGenConfig c;
  c.width = j.at("width").get<int>();
  c.height = j.at("height").get<int>();
  c.family = family_from_string(j.at("family").get<std::string>());
  if (j.contains("target_density")) {
    c.target_density = j.at("target_density").get<double>();
  }
  if (j.contains("density_range")) {
    c.density_range = {j.at("density_range")[0].get<double>(),
                       j.at("density_range")[1].get<double>()};
  }
  c.seed = j.at("seed").get<std::uint64_t>();
  c.count = j.at("count").get<std::int64_t>();
  c.splits.train = j.at("splits").at("train").get<double>();
  c.splits.test = j.at("splits").at("test").get<double>();
  c.splits.validation = j.at("splits").at("validation").get<double>();
  return c;
}

struct BuiltInstance {
  Grid grid;
  Path path;
  std::uint64_t seed = 0;
};

BuiltInstance build_instance(const MapGenConfig& config, std::int64_t index) {
  for (int attempt = 0; attempt < kMaxInstanceAttempts; ++attempt) {
    const std::uint64_t instance_seed =
        mix64(config.seed, static_cast<std::uint64_t>(index),
              static_cast<std::uint64_t>(attempt));
    Grid grid;
    try {
      grid = gen_map(config, instance_seed);
    } catch (const GenerationError&) {
      continue;  // regenerate with the next attempt seed
    }
    const auto endpoints = place_start_goal(grid, instance_seed);
    if (!endpoints) continue;
    grid.start = endpoints->first;
    grid.goal = endpoints->second;
    SearchResult solved = astar(grid);
    if (!solved.found()) continue;  // cannot happen after place_start_goal
    return {std::move(grid), std::move(*solved.path), instance_seed};
  }
  throw GenerationError("instance " + std::to_string(index) +
                        ": no solvable map within the attempt cap");
}

}  // namespace

std::vector<const InstanceRecord*> DatasetManifest::split_instances(
    const std::string& split) const {
  std::vector<const InstanceRecord*> out;
  for (const auto& rec : instances) {
    if (rec.split == split) out.push_back(&rec);
  }
  return out;
}

std::string DatasetManifest::to_json() const {
  json j;
  j["config"] = config_to_json(config);
  json insts = json::array();
  for (const auto& rec : instances) {
    json r;
    r["id"] = rec.id;
    r["seed"] = rec.seed;
    r["density"] = rec.density;
    r["start"] = {rec.start.row, rec.start.col};
    r["goal"] = {rec.goal.row, rec.goal.col};
    r["split"] = rec.split;
    r["input_file"] = rec.input_file;
    r["gt_file"] = rec.gt_file;
    r["path_cells"] = rec.path_cells;
    insts.push_back(std::move(r));
  }
  j["instances"] = std::move(insts);
  return j.dump(2) + "\n";
}

DatasetManifest DatasetManifest::from_json(const std::string& text) {
  const json j = json::parse(text);
  DatasetManifest m;
  m.config = config_from_json(j.at("config"));
  for (const auto& r : j.at("instances")) {
    InstanceRecord rec;
    rec.id = r.at("id").get<std::string>();
    rec.seed = r.at("seed").get<std::uint64_t>();
    rec.density = r.at("density").get<double>();
    rec.start = {r.at("start")[0].get<int>(), r.at("start")[1].get<int>()};
    rec.goal = {r.at("goal")[0].get<int>(), r.at("goal")[1].get<int>()};
    rec.split = r.at("split").get<std::string>();
    rec.input_file = r.at("input_file").get<std::string>();
    rec.gt_file = r.at("gt_file").get<std::string>();
    rec.path_cells = r.at("path_cells").get<std::int64_t>();
    m.instances.push_back(std::move(rec));
  }
  return m;
}

DatasetManifest build_dataset(const MapGenConfig& config,
                              const std::string& out_dir) {
  config.validate();
  fs::create_directories(out_dir);

  const auto splits = assign_splits(config);
  std::vector<InstanceRecord> records(config.count);
  std::vector<std::string> errors(config.count);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < config.count; ++i) {
    try {
      const BuiltInstance built = build_instance(config, i);
      InstanceRecord rec;
      rec.id = instance_id(i);
      rec.seed = built.seed;
      rec.density = built.grid.blocked_density();
      rec.start = built.grid.start;
      rec.goal = built.grid.goal;
      rec.split = splits[i];
      rec.input_file = rec.id + "_input.png";
      rec.gt_file = rec.id + "_gt.png";
      rec.path_cells = static_cast<std::int64_t>(built.path.size());
      png_io::write_gray8(out_dir + "/" + rec.input_file,
                          encode_input(built.grid));
      png_io::write_gray8(out_dir + "/" + rec.gt_file,
                          encode_ground_truth(built.grid, built.path));
      records[i] = std::move(rec);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  for (std::int64_t i = 0; i < config.count; ++i) {
    if (!errors[i].empty()) {
      throw GenerationError("instance " + std::to_string(i) + ": " +
                            errors[i]);
    }
  }

  DatasetManifest manifest{config, std::move(records)};
  std::ofstream out(out_dir + "/manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error(out_dir + ": cannot write manifest.json");
  out << manifest.to_json();
  return manifest;
}

DatasetManifest load_manifest(const std::string& dataset_dir) {
  std::ifstream in(dataset_dir + "/manifest.json", std::ios::binary);
  if (!in) {
    throw std::runtime_error(dataset_dir + ": manifest.json not found");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return DatasetManifest::from_json(buf.str());
}

}  // namespace pathgan
