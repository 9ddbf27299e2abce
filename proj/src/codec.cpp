#include "pathgan/codec.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace pathgan {

namespace {

void require_dims(int w, int h) {
  if (w <= 0 || h <= 0) throw std::invalid_argument("empty image dimensions");
}

CellClass nearest_class(std::uint8_t v) {
  // Palette values ordered dark to light; ties resolve to the darker class.
  const int d_path = std::abs(int(v) - int(kPathPixel));
  const int d_blocked = std::abs(int(v) - int(kBlockedPixel));
  const int d_free = std::abs(int(v) - int(kFreePixel));
  if (d_path <= d_blocked && d_path <= d_free) return CellClass::Path;
  if (d_blocked <= d_free) return CellClass::Blocked;
  return CellClass::Free;
}

std::uint8_t class_pixel(CellClass c) {
  switch (c) {
    case CellClass::Free: return kFreePixel;
    case CellClass::Blocked: return kBlockedPixel;
    case CellClass::Path: return kPathPixel;
  }
  return kFreePixel;
}

}  // namespace

GrayImage encode_input(const Grid& grid) {
  require_dims(grid.width(), grid.height());
  GrayImage img(grid.width(), grid.height());
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      img.at(r, c) = grid.blocked({r, c}) ? kBlockedPixel : kFreePixel;
    }
  }
  img.at(grid.start.row, grid.start.col) = kPathPixel;
  img.at(grid.goal.row, grid.goal.col) = kPathPixel;
  return img;
}

GrayImage encode_ground_truth(const Grid& grid, const Path& path) {
  const ValidityReport report = validate_path(grid, path);
  if (!report.ok) {
    throw std::invalid_argument("encode_ground_truth: invalid path (" +
                                to_string(report.kind) + " at index " +
                                std::to_string(report.index) + ")");
  }
  GrayImage img = encode_input(grid);
  for (const Cell& c : path) img.at(c.row, c.col) = kPathPixel;
  return img;
}

ClassRaster decode_classes(const GrayImage& img, std::int64_t* off_palette) {
  require_dims(img.width, img.height);
  ClassRaster raster(img.width, img.height);
  std::int64_t off = 0;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const std::uint8_t v = img.pixels[i];
    if (v != kFreePixel && v != kBlockedPixel && v != kPathPixel) ++off;
    raster.labels[i] = nearest_class(v);
  }
  if (off_palette) *off_palette = off;
  return raster;
}

std::optional<OffPalettePixel> first_off_palette(const GrayImage& img) {
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const std::uint8_t v = img.at(r, c);
      if (v != kFreePixel && v != kBlockedPixel && v != kPathPixel) {
        return OffPalettePixel{r, c, v};
      }
    }
  }
  return std::nullopt;
}

GrayImage render_raster(const ClassRaster& raster) {
  require_dims(raster.width, raster.height);
  GrayImage img(raster.width, raster.height);
  for (std::size_t i = 0; i < raster.labels.size(); ++i) {
    img.pixels[i] = class_pixel(raster.labels[i]);
  }
  return img;
}

nn::Tensor to_model_input(const ClassRaster& raster) {
  return to_model_input_batch({&raster});
}

nn::Tensor to_model_input_batch(const std::vector<const ClassRaster*>& rs) {
  if (rs.empty()) throw std::invalid_argument("empty raster batch");
  const int h = rs[0]->height;
  const int w = rs[0]->width;
  nn::Tensor t(static_cast<int>(rs.size()), 3, h, w);
  for (std::size_t n = 0; n < rs.size(); ++n) {
    const ClassRaster& r = *rs[n];
    if (r.height != h || r.width != w) {
      throw std::invalid_argument("raster batch dimension mismatch");
    }
    float* base = t.sample_ptr(static_cast<int>(n));
    const std::int64_t plane = static_cast<std::int64_t>(h) * w;
    for (std::int64_t i = 0; i < plane; ++i) {
      base[static_cast<int>(r.labels[i]) * plane + i] = 1.0f;
    }
  }
  return t;
}

ClassRaster logits_to_raster(const ClassLogits& logits, int sample) {
  if (logits.c() != 3) throw std::invalid_argument("expected 3 class channels");
  if (sample < 0 || sample >= logits.n()) {
    throw std::invalid_argument("sample index out of range");
  }
  const int h = logits.h();
  const int w = logits.w();
  ClassRaster raster(w, h);
  const std::int64_t plane = static_cast<std::int64_t>(h) * w;
  const float* base = logits.sample_ptr(sample);
  for (std::int64_t i = 0; i < plane; ++i) {
    int best = 0;
    float best_v = base[i];
    for (int c = 1; c < 3; ++c) {
      const float v = base[c * plane + i];
      if (v > best_v) {  // strict: ties keep the lower class index
        best_v = v;
        best = c;
      }
    }
    raster.labels[i] = static_cast<CellClass>(best);
  }
  return raster;
}

nn::Tensor path_mask(const ClassRaster& raster) {
  nn::Tensor t(1, 1, raster.height, raster.width);
  for (std::size_t i = 0; i < raster.labels.size(); ++i) {
    t.data[i] = raster.labels[i] == CellClass::Path ? 1.0f : 0.0f;
  }
  return t;
}

nn::Tensor path_probability(const ClassLogits& logits) {
  if (logits.c() != 3) throw std::invalid_argument("expected 3 class channels");
  const int n = logits.n(), h = logits.h(), w = logits.w();
  nn::Tensor out(n, 1, h, w);
  const std::int64_t plane = static_cast<std::int64_t>(h) * w;
  for (int s = 0; s < n; ++s) {
    const float* base = logits.sample_ptr(s);
    float* dst = out.sample_ptr(s);
    for (std::int64_t i = 0; i < plane; ++i) {
      const float a = base[i];
      const float b = base[plane + i];
      const float c = base[2 * plane + i];
      const float m = std::max(a, std::max(b, c));
      const float ea = std::exp(a - m);
      const float eb = std::exp(b - m);
      const float ec = std::exp(c - m);
      dst[i] = ec / (ea + eb + ec);
    }
  }
  return out;
}

}  // namespace pathgan
