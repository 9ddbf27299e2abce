#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pathgan/grid.hpp"
#include "pathgan/nn/tensor.hpp"

namespace pathgan {

// Grayscale palette. Free and path sit at the extremes of the intensity
// range; blocked at mid-gray. One cell maps to one pixel.
inline constexpr std::uint8_t kFreePixel = 255;
inline constexpr std::uint8_t kBlockedPixel = 128;
inline constexpr std::uint8_t kPathPixel = 0;

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h)
      : width(w), height(h),
        pixels(static_cast<std::size_t>(w) * h, kFreePixel) {}

  std::uint8_t& at(int row, int col) {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }
  std::uint8_t at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }
  bool operator==(const GrayImage&) const = default;
};

// Per-pixel class scores produced by the generator: a (N, 3, H, W) tensor
// with channel order FREE, BLOCKED, PATH.
using ClassLogits = nn::Tensor;

struct OffPalettePixel {
  int row = 0;
  int col = 0;
  std::uint8_t value = 0;
};

// Input image: blocked cells gray, start and goal black, everything else
// white.
GrayImage encode_input(const Grid& grid);

// Ground-truth image: the input image with every path cell black. Throws
// std::invalid_argument when validate_path rejects the path.
GrayImage encode_ground_truth(const Grid& grid, const Path& path);

// Palette image -> class raster. Off-palette pixels map to the nearest
// palette value (ties toward the darker class) and are counted in
// *off_palette when given.
ClassRaster decode_classes(const GrayImage& img,
                           std::int64_t* off_palette = nullptr);

// First pixel that is not exactly one of {0, 128, 255}, if any.
std::optional<OffPalettePixel> first_off_palette(const GrayImage& img);

// Class raster -> palette image.
GrayImage render_raster(const ClassRaster& raster);

// One-hot class channels, shape (1, 3, H, W).
nn::Tensor to_model_input(const ClassRaster& raster);

// Stack of one-hot rasters, shape (N, 3, H, W).
nn::Tensor to_model_input_batch(const std::vector<const ClassRaster*>& rs);

// Per-pixel argmax over the 3 class channels of one sample; ties break by
// class order FREE < BLOCKED < PATH.
ClassRaster logits_to_raster(const ClassLogits& logits, int sample = 0);

// Binary {0,1} PATH mask of a raster, shape (1, 1, H, W).
nn::Tensor path_mask(const ClassRaster& raster);

// Softmax probability of the PATH class per pixel, shape (N, 1, H, W).
// This is the differentiable one-channel image fed to the critic.
nn::Tensor path_probability(const ClassLogits& logits);

}  // namespace pathgan
