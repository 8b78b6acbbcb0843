#include "glyphflow/imaging/image.hpp"

#include <algorithm>
#include <string>

namespace glyphflow::imaging {

namespace {

std::size_t checked_len(int width, int height, int channels) {
  if (width < 0 || height < 0 || channels < 1) {
    throw ShapeError("invalid raster shape " + std::to_string(width) + "x" +
                     std::to_string(height) + "x" + std::to_string(channels));
  }
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
         static_cast<std::size_t>(channels);
}

}  // namespace

ImageBuffer::ImageBuffer(int width, int height, int channels, double fill)
    : width_(width),
      height_(height),
      channels_(channels),
      data_(checked_len(width, height, channels), fill) {}

ImageBuffer::ImageBuffer(int width, int height, int channels,
                         std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (data_.size() != checked_len(width, height, channels)) {
    throw ShapeError("image data length does not match its shape");
  }
}

Mask::Mask(int width, int height, double fill)
    : width_(width), height_(height), data_(checked_len(width, height, 1), fill) {}

Mask::Mask(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (data_.size() != checked_len(width, height, 1)) {
    throw ShapeError("mask data length does not match its shape");
  }
}

bool Mask::is_binary() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return v == 0.0 || v == 1.0; });
}

std::size_t Mask::count_nonzero() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      data_.begin(), data_.end(), [](double v) { return v != 0.0; }));
}

Mask Mask::binarized(double threshold) const {
  Mask out(width_, height_);
  std::transform(data_.begin(), data_.end(), out.data_.begin(),
                 [threshold](double v) { return v >= threshold ? 1.0 : 0.0; });
  return out;
}

ImageBuffer Mask::to_image() const { return {width_, height_, 1, data_}; }

Mask Mask::from_image(const ImageBuffer& img) {
  Mask out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(x, y) = img.at(x, y, 0);
    }
  }
  return out;
}

long long intersection_area(const BoundingBox& a, const BoundingBox& b) noexcept {
  const long long w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const long long h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  return (w > 0 && h > 0) ? w * h : 0;
}

}  // namespace glyphflow::imaging
