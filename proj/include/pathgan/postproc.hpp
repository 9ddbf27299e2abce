#pragma once

#include "pathgan/grid.hpp"

namespace pathgan {

// Copies the input grid's blocked set onto a generated raster: output
// BLOCKED cells equal the grid's blocked cells exactly. Generated PATH/FREE
// labels on blocked cells become BLOCKED; generated BLOCKED labels on free
// cells become FREE.
ClassRaster transfer_obstacles(const Grid& grid, const ClassRaster& generated);

// Classic integer line rasterization from a to b inclusive; consecutive
// cells are 8-adjacent.
std::vector<Cell> bresenham(Cell a, Cell b);

// Connects fragments of the PATH mask with straight segments. Starting from
// the component containing `start`, repeatedly connects the nearest
// remaining component (minimal Euclidean distance over all cell pairs, ties
// by row-major order) via the Bresenham segment between the closest pair. A
// segment is drawn only when every cell on it is unblocked and no diagonal
// step cuts a corner; otherwise that component is skipped and the
// next-nearest one is tried. Terminates when no connection can be added, so
// segments across obstacles leave the gap in place. Expects obstacle
// transfer to have been applied; start and goal are forced to PATH.
ClassRaster fill_gaps(ClassRaster raster, Cell start, Cell goal);

}  // namespace pathgan
