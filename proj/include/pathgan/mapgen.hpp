#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathgan/grid.hpp"
#include "pathgan/search.hpp"

namespace pathgan {

enum class ObstacleFamily {
  Rect,          // rectangles (axis-aligned or 45-degree) to a fixed density
  RandomShapes,  // rectangles, diamonds and circles to a sampled density
};

std::string to_string(ObstacleFamily f);
ObstacleFamily family_from_string(const std::string& s);

struct SplitFractions {
  double train = 0.75;
  double test = 0.15;
  double validation = 0.10;
};

struct MapGenConfig {
  int width = 64;
  int height = 64;
  ObstacleFamily family = ObstacleFamily::Rect;
  double target_density = 0.20;                    // Rect only
  std::array<double, 2> density_range{0.05, 0.5};  // RandomShapes only
  std::uint64_t seed = 0;
  std::int64_t count = 0;
  SplitFractions splits;

  // Throws std::invalid_argument on out-of-range densities, non-positive
  // counts/dimensions, or split fractions not summing to 1.
  void validate() const;
};

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InstanceRecord {
  std::string id;
  std::uint64_t seed = 0;  // seed that produced the accepted map
  double density = 0.0;    // recounted from the persisted grid
  Cell start{};
  Cell goal{};
  std::string split;  // "train" | "test" | "validation"
  std::string input_file;
  std::string gt_file;
  std::int64_t path_cells = 0;
};

struct DatasetManifest {
  MapGenConfig config;
  std::vector<InstanceRecord> instances;

  std::vector<const InstanceRecord*> split_instances(
      const std::string& split) const;
  std::string to_json() const;
  static DatasetManifest from_json(const std::string& text);
};

// Obstacle layout only; start/goal are left unset. Deterministic for a fixed
// (config, instance_seed). Throws GenerationError when the target density is
// not reached within the iteration cap.
Grid gen_map(const MapGenConfig& config, std::uint64_t instance_seed);

// Samples start uniformly from the free cells of the leftmost ceil(W/10)
// columns and goal from the rightmost band, retrying until the pair is
// A*-solvable. nullopt means no solvable pair was found within the cap and
// the caller should regenerate the map.
std::optional<std::pair<Cell, Cell>> place_start_goal(
    const Grid& grid, std::uint64_t instance_seed);

// Largest-remainder split counts for (train, test, validation).
std::array<std::int64_t, 3> split_counts(std::int64_t total,
                                         const SplitFractions& splits);

// Generates, solves and persists every instance under out_dir, then writes
// manifest.json. Instance generation is parallel; the manifest is assembled
// in index order so reruns produce identical bytes.
DatasetManifest build_dataset(const MapGenConfig& config,
                              const std::string& out_dir);

DatasetManifest load_manifest(const std::string& dataset_dir);

}  // namespace pathgan
