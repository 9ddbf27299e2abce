#pragma once

#include <string>
#include <vector>

#include "pathgan/codec.hpp"
#include "pathgan/grid.hpp"
#include "pathgan/mapgen.hpp"

namespace pathgan {

// One dataset record pulled back into memory. `grid` is reconstructed from
// the input raster's blocked cells plus the manifest's start/goal.
struct LoadedInstance {
  InstanceRecord record;
  ClassRaster input;
  ClassRaster gt;
  GrayImage gt_image;
  Grid grid;
};

Grid grid_from_raster(const ClassRaster& input, Cell start, Cell goal);

std::vector<LoadedInstance> load_split(const DatasetManifest& manifest,
                                       const std::string& dataset_dir,
                                       const std::string& split);

}  // namespace pathgan
