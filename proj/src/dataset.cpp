#include "pathgan/dataset.hpp"

#include <stdexcept>

#include "pathgan/png_io.hpp"

namespace pathgan {

Grid grid_from_raster(const ClassRaster& input, Cell start, Cell goal) {
  Grid grid(input.width, input.height);
  for (int r = 0; r < input.height; ++r) {
    for (int c = 0; c < input.width; ++c) {
      if (input.at(r, c) == CellClass::Blocked) {
        grid.set_blocked({r, c}, true);
      }
    }
  }
  if (!grid.in_bounds(start) || !grid.in_bounds(goal)) {
    throw std::invalid_argument("grid_from_raster: endpoints out of bounds");
  }
  grid.start = start;
  grid.goal = goal;
  return grid;
}

std::vector<LoadedInstance> load_split(const DatasetManifest& manifest,
                                       const std::string& dataset_dir,
                                       const std::string& split) {
  const auto records = manifest.split_instances(split);
  std::vector<LoadedInstance> out(records.size());

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(records.size());
       ++i) {
    const InstanceRecord& rec = *records[i];
    LoadedInstance inst;
    inst.record = rec;
    const GrayImage input_img =
        png_io::read_gray8(dataset_dir + "/" + rec.input_file);
    inst.gt_image = png_io::read_gray8(dataset_dir + "/" + rec.gt_file);
    inst.input = decode_classes(input_img);
    inst.gt = decode_classes(inst.gt_image);
    inst.grid = grid_from_raster(inst.input, rec.start, rec.goal);
    out[i] = std::move(inst);
  }
  return out;
}

}  // namespace pathgan
