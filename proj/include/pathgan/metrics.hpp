#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pathgan/codec.hpp"
#include "pathgan/dataset.hpp"
#include "pathgan/grid.hpp"

namespace pathgan {

// Per-pixel mean-squared error with intensities normalized to [0, 1].
double mse(const GrayImage& a, const GrayImage& b);

// Number of 8-connected components of (PATH mask plus {start, goal}) minus
// one. Measured after obstacle transfer and before gap filling.
int count_gaps(const ClassRaster& raster, Cell start, Cell goal);

// A post-processed raster counts as a success when no gaps remain and a
// start-to-goal traversal exists within the PATH cells under the shared
// adjacency rules (corner cutting forbidden, blocked cells from the grid).
bool success(const ClassRaster& postprocessed, const Grid& grid, Cell start,
             Cell goal);

struct InstanceEval {
  std::string id;
  double mse = 0.0;
  int gaps = 0;
  bool success = false;
  // Set when --save-images persists the rasters.
  std::string generated_file;
  std::string post_file;

  bool operator==(const InstanceEval&) const = default;
};

struct EvalAggregates {
  std::int64_t count = 0;
  double mean_mse = 0.0;
  double mean_gaps = 0.0;
  double success_rate = 0.0;  // percent

  bool operator==(const EvalAggregates&) const = default;
};

struct EvalReport {
  std::string dataset_dir;
  std::string split;
  std::string family;
  bool oracle = false;
  std::vector<InstanceEval> instances;
  EvalAggregates aggregates;

  bool operator==(const EvalReport&) const = default;

  std::string to_json() const;
  static EvalReport from_json(const std::string& text);
  std::string to_csv() const;
  // Table-style one-line summary (MSE | Gaps | Success).
  std::string summary_text() const;
};

EvalAggregates aggregate(const std::vector<InstanceEval>& instances);

// Batched inference hook: one-hot input batch (N,3,H,W) -> logits
// (N,3,H,W). Absent (nullptr-like empty function) only in oracle mode.
using InferFn = std::function<ClassLogits(const nn::Tensor&)>;

struct EvalOptions {
  std::string split = "test";
  bool oracle = false;  // substitute ground-truth rasters for model output
  bool save_images = false;
  std::string image_dir;
  int batch_size = 32;
};

// Runs the full per-instance pipeline: infer -> argmax raster -> obstacle
// transfer -> gap count -> gap fill -> success; MSE compares the rendered
// raw raster against the ground-truth image.
EvalReport evaluate_dataset(const DatasetManifest& manifest,
                            const std::string& dataset_dir,
                            const EvalOptions& options, const InferFn& infer);

}  // namespace pathgan
