#pragma once

#include <string>

#include "pathgan/codec.hpp"

namespace pathgan::png_io {

// 8-bit single-channel grayscale PNG, one pixel per grid cell. Both throw
// std::runtime_error on I/O or format problems; read_gray8 rejects files
// that are not exactly 8-bit grayscale.
void write_gray8(const std::string& path, const GrayImage& img);
GrayImage read_gray8(const std::string& path);

}  // namespace pathgan::png_io
