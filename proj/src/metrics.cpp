#include "pathgan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pathgan/png_io.hpp"
#include "pathgan/postproc.hpp"

using nlohmann::json;

namespace pathgan {

double mse(const GrayImage& a, const GrayImage& b) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("mse: dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d =
        (static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i])) /
        255.0;
    sum += d * d;
  }
  return sum / static_cast<double>(a.pixels.size());
}

int count_gaps(const ClassRaster& raster, Cell start, Cell goal) {
  if (!raster.in_bounds(start) || !raster.in_bounds(goal)) {
    throw std::invalid_argument("count_gaps: start/goal out of bounds");
  }
  std::vector<Cell> mask;
  for (int r = 0; r < raster.height; ++r) {
    for (int c = 0; c < raster.width; ++c) {
      if (raster.at(r, c) == CellClass::Path) mask.push_back({r, c});
    }
  }
  auto endpoint_present = [&](Cell e) {
    return raster.at(e) == CellClass::Path;
  };
  if (!endpoint_present(start)) mask.push_back(start);
  if (!endpoint_present(goal) && goal != start) mask.push_back(goal);

  const auto components =
      connected_components(mask, raster.width, raster.height);
  return static_cast<int>(components.size()) - 1;
}

bool success(const ClassRaster& postprocessed, const Grid& grid, Cell start,
             Cell goal) {
  if (grid.width() != postprocessed.width ||
      grid.height() != postprocessed.height) {
    throw std::invalid_argument("success: dimension mismatch");
  }
  if (!grid.in_bounds(start) || !grid.in_bounds(goal)) {
    throw std::invalid_argument("success: start/goal out of bounds");
  }
  // "No gaps left" is part of the definition: stray PATH fragments that were
  // never reconnected count against the instance.
  if (count_gaps(postprocessed, start, goal) != 0) return false;

  if (postprocessed.at(start) != CellClass::Path ||
      postprocessed.at(goal) != CellClass::Path) {
    return false;
  }
  // Reachability restricted to PATH cells under the traversal rules.
  std::vector<std::uint8_t> visited(
      static_cast<std::size_t>(grid.width()) * grid.height(), 0);
  std::queue<Cell> frontier;
  frontier.push(start);
  visited[grid.index(start)] = 1;
  while (!frontier.empty()) {
    const Cell cur = frontier.front();
    frontier.pop();
    if (cur == goal) return true;
    for (const Cell& nb : neighbors(grid, cur)) {
      if (postprocessed.at(nb) != CellClass::Path) continue;
      if (visited[grid.index(nb)]) continue;
      visited[grid.index(nb)] = 1;
      frontier.push(nb);
    }
  }
  return false;
}

EvalAggregates aggregate(const std::vector<InstanceEval>& instances) {
  EvalAggregates agg;
  agg.count = static_cast<std::int64_t>(instances.size());
  if (instances.empty()) return agg;
  double mse_sum = 0.0, gaps_sum = 0.0, success_sum = 0.0;
  for (const auto& e : instances) {
    mse_sum += e.mse;
    gaps_sum += e.gaps;
    success_sum += e.success ? 1.0 : 0.0;
  }
  const double n = static_cast<double>(instances.size());
  agg.mean_mse = mse_sum / n;
  agg.mean_gaps = gaps_sum / n;
  agg.success_rate = 100.0 * success_sum / n;
  return agg;
}

std::string EvalReport::to_json() const {
  json j;
  j["dataset_dir"] = dataset_dir;
  j["split"] = split;
  j["family"] = family;
  j["oracle"] = oracle;
  json insts = json::array();
  for (const auto& e : instances) {
    json r;
    r["id"] = e.id;
    r["mse"] = e.mse;
    r["gaps"] = e.gaps;
    r["success"] = e.success;
    if (!e.generated_file.empty()) r["generated_file"] = e.generated_file;
    if (!e.post_file.empty()) r["post_file"] = e.post_file;
    insts.push_back(std::move(r));
  }
  j["instances"] = std::move(insts);
  j["aggregates"] = {{"count", aggregates.count},
                     {"mean_mse", aggregates.mean_mse},
                     {"mean_gaps", aggregates.mean_gaps},
                     {"success_rate", aggregates.success_rate}};
  return j.dump(2) + "\n";
}

EvalReport EvalReport::from_json(const std::string& text) {
  const json j = json::parse(text);
  EvalReport rep;
  rep.dataset_dir = j.at("dataset_dir").get<std::string>();
  rep.split = j.at("split").get<std::string>();
  rep.family = j.at("family").get<std::string>();
  rep.oracle = j.at("oracle").get<bool>();
  for (const auto& r : j.at("instances")) {
    InstanceEval e;
    e.id = r.at("id").get<std::string>();
    e.mse = r.at("mse").get<double>();
    e.gaps = r.at("gaps").get<int>();
    e.success = r.at("success").get<bool>();
    if (r.contains("generated_file")) {
      e.generated_file = r.at("generated_file").get<std::string>();
    }
    if (r.contains("post_file")) {
      e.post_file = r.at("post_file").get<std::string>();
    }
    rep.instances.push_back(std::move(e));
  }
  const auto& a = j.at("aggregates");
  rep.aggregates.count = a.at("count").get<std::int64_t>();
  rep.aggregates.mean_mse = a.at("mean_mse").get<double>();
  rep.aggregates.mean_gaps = a.at("mean_gaps").get<double>();
  rep.aggregates.success_rate = a.at("success_rate").get<double>();
  return rep;
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "id,mse,gaps,success\n";
  for (const auto& e : instances) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", e.mse);
    out << e.id << ',' << buf << ',' << e.gaps << ','
        << (e.success ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string EvalReport::summary_text() const {
  std::ostringstream out;
  char line[256];
  out << "            |      MSE |     Gaps |  Success\n";
  std::snprintf(line, sizeof(line), "%-11s | %8.4f | %8.4f | %7.1f%%\n",
                (family + (oracle ? "/oracle" : "")).c_str(),
                aggregates.mean_mse, aggregates.mean_gaps,
                aggregates.success_rate);
  out << line;
  return out.str();
}

EvalReport evaluate_dataset(const DatasetManifest& manifest,
                            const std::string& dataset_dir,
                            const EvalOptions& options, const InferFn& infer) {
  if (!options.oracle && !infer) {
    throw std::invalid_argument(
        "evaluate_dataset: inference hook required unless oracle mode");
  }
  const auto loaded = load_split(manifest, dataset_dir, options.split);
  if (loaded.empty()) {
    throw std::invalid_argument("evaluate_dataset: split '" + options.split +
                                "' is empty");
  }

  EvalReport report;
  report.dataset_dir = dataset_dir;
  report.split = options.split;
  report.family = to_string(manifest.config.family);
  report.oracle = options.oracle;
  report.instances.resize(loaded.size());

  const int batch = std::max(1, options.batch_size);
  const auto total = static_cast<std::int64_t>(loaded.size());
  for (std::int64_t begin = 0; begin < total; begin += batch) {
    const std::int64_t end = std::min(total, begin + batch);

    // Raw generated rasters for this batch: model output or the oracle
    // substitution of the ground truth.
    std::vector<ClassRaster> generated(end - begin);
    if (options.oracle) {
      for (std::int64_t i = begin; i < end; ++i) {
        generated[i - begin] = loaded[i].gt;
      }
    } else {
      std::vector<const ClassRaster*> inputs;
      inputs.reserve(end - begin);
      for (std::int64_t i = begin; i < end; ++i) {
        inputs.push_back(&loaded[i].input);
      }
      const ClassLogits logits = infer(to_model_input_batch(inputs));
      for (std::int64_t i = begin; i < end; ++i) {
        generated[i - begin] = logits_to_raster(logits, int(i - begin));
      }
    }

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = begin; i < end; ++i) {
      const LoadedInstance& inst = loaded[i];
      const ClassRaster& raw = generated[i - begin];
      InstanceEval eval;
      eval.id = inst.record.id;
      eval.mse = mse(render_raster(raw), inst.gt_image);
      const ClassRaster transferred = transfer_obstacles(inst.grid, raw);
      eval.gaps =
          count_gaps(transferred, inst.record.start, inst.record.goal);
      const ClassRaster post =
          fill_gaps(transferred, inst.record.start, inst.record.goal);
      eval.success = success(post, inst.grid, inst.record.start,
                             inst.record.goal);
      if (options.save_images && !options.image_dir.empty()) {
        eval.generated_file = inst.record.id + "_generated.png";
        eval.post_file = inst.record.id + "_post.png";
        png_io::write_gray8(options.image_dir + "/" + eval.generated_file,
                            render_raster(raw));
        png_io::write_gray8(options.image_dir + "/" + eval.post_file,
                            render_raster(post));
      }
      report.instances[i] = std::move(eval);
    }
  }

  report.aggregates = aggregate(report.instances);
  return report;
}

}  // namespace pathgan
