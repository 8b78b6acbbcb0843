#pragma once

#include <vector>

#include "glyphflow/imaging/image.hpp"

namespace glyphflow::imaging {

struct CannyParams {
  double sigma = 1.4;
  double lo = 0.1;
  double hi = 0.3;
};

// Normalized 1-D Gaussian taps for offsets -r..r with r = ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

// Separable Gaussian with edge-replicate padding, applied per channel.
ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma);

// Gaussian smoothing, Sobel gradients, non-maximum suppression and
// 8-connected double-threshold hysteresis. Gradients are Sobel / 4 so that
// a unit step has magnitude 1 before smoothing. Output is binary.
Mask canny(const Mask& mask, double sigma, double lo, double hi);
inline Mask canny(const Mask& mask, const CannyParams& p = {}) {
  return canny(mask, p.sigma, p.lo, p.hi);
}

// Element-wise product; the mask is broadcast across channels.
ImageBuffer mask_apply(const Mask& mask, const ImageBuffer& img);

// Element-wise min(a + b, 1), also floored at 0.
ImageBuffer add_clamped(const ImageBuffer& a, const ImageBuffer& b);

// Inward band of `width` pixels along the border of `box`.
Mask boundary_band(const BoundingBox& box, int width, Size canvas);

// Filled box on an otherwise zero canvas.
Mask box_mask(const BoundingBox& box, Size canvas);

ImageBuffer crop(const ImageBuffer& img, const BoundingBox& box);
// Writes `patch` into `dst` with its top-left at (x, y).
void paste(ImageBuffer& dst, const ImageBuffer& patch, int x, int y);

// Replicates a single channel mask into a `channels`-channel image.
ImageBuffer mask_to_image(const Mask& mask, int channels);

ImageBuffer clamp01(const ImageBuffer& img);

}  // namespace glyphflow::imaging
