#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "glyphflow/error.hpp"

namespace glyphflow::imaging {

struct Size {
  int width = 0;
  int height = 0;

  friend bool operator==(const Size&, const Size&) = default;
};

// H x W x C raster, row-major with interleaved channels. Intensities are
// nominally in [0,1]; only operations that say so clamp.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, int channels, double fill = 0.0);
  ImageBuffer(int width, int height, int channels, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  Size size() const noexcept { return {width_, height_}; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  double& at(int x, int y, int c = 0) {
    return data_[index(x, y, c)];
  }
  double at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::vector<double>& storage() noexcept { return data_; }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

// Single-channel H x W map in [0,1]. Segmentation, position and
// glyph-region masks all use this type.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, double fill = 0.0);
  Mask(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Size size() const noexcept { return {width_, height_}; }

  double& at(int x, int y) { return data_[index(x, y)]; }
  double at(int x, int y) const { return data_[index(x, y)]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool is_binary() const noexcept;
  std::size_t count_nonzero() const noexcept;

  // 1 where value >= threshold, else 0.
  Mask binarized(double threshold = 0.5) const;

  ImageBuffer to_image() const;
  // Takes channel 0 of a single-channel image.
  static Mask from_image(const ImageBuffer& img);

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

// Half-open pixel rectangle [x0,x1) x [y0,y1).
struct BoundingBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }
  long long area() const noexcept {
    return static_cast<long long>(width()) * static_cast<long long>(height());
  }
  bool nonempty() const noexcept { return x0 < x1 && y0 < y1; }
  bool within(Size canvas) const noexcept {
    return nonempty() && x0 >= 0 && y0 >= 0 && x1 <= canvas.width &&
           y1 <= canvas.height;
  }
  bool contains(int x, int y) const noexcept {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Area of the interior intersection; 0 for boxes that only share an edge.
long long intersection_area(const BoundingBox& a, const BoundingBox& b) noexcept;

}  // namespace glyphflow::imaging
