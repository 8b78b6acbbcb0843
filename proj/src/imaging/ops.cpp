#include "glyphflow/imaging/ops.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace glyphflow::imaging {

namespace {

void require_same_size(Size a, Size b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": dimension mismatch (" +
                     std::to_string(a.width) + "x" + std::to_string(a.height) +
                     " vs " + std::to_string(b.width) + "x" +
                     std::to_string(b.height) + ")");
  }
}

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b,
                        const char* what) {
  require_same_size(a.size(), b.size(), what);
  if (a.channels() != b.channels()) {
    throw ShapeError(std::string(what) + ": channel count mismatch");
  }
}

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Equality up to rounding noise, so that exact ties on symmetric inputs
// resolve the same way regardless of summation order.
constexpr double kTieTolerance = 1e-9;

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}
bool strictly_greater(double a, double b) { return a > b && !nearly_equal(a, b); }
bool greater_or_equal(double a, double b) { return a > b || nearly_equal(a, b); }

}  // namespace

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("gaussian sigma must be positive, got " +
                         std::to_string(sigma));
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
    taps[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (double& w : taps) w /= sum;
  return taps;
}

ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma) {
  const std::vector<double> taps = gaussian_kernel(sigma);
  const int radius = static_cast<int>(taps.size() / 2);
  const int w = img.width();
  const int h = img.height();
  const int ch = img.channels();
  if (w == 0 || h == 0) return img;

  ImageBuffer rows(w, h, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          acc += taps[static_cast<std::size_t>(k + radius)] *
                 img.at(clamp_index(x + k, w), y, c);
        }
        rows.at(x, y, c) = acc;
      }
    }
  }
  ImageBuffer out(w, h, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          acc += taps[static_cast<std::size_t>(k + radius)] *
                 rows.at(x, clamp_index(y + k, h), c);
        }
        out.at(x, y, c) = acc;
      }
    }
  }
  return out;
}

Mask canny(const Mask& mask, double sigma, double lo, double hi) {
  if (!(lo >= 0.0) || !(lo < hi) || !(hi <= 1.0)) {
    throw ParameterError("canny thresholds require 0 <= lo < hi <= 1");
  }
  const int w = mask.width();
  const int h = mask.height();
  Mask edges(w, h);
  if (w == 0 || h == 0) return edges;

  const ImageBuffer smooth = gaussian_blur(mask.to_image(), sigma);
  auto px = [&](int x, int y) {
    return smooth.at(clamp_index(x, w), clamp_index(y, h), 0);
  };

  std::vector<double> mag(static_cast<std::size_t>(w) * h);
  std::vector<int> dir(mag.size());
  const double tan22 = std::tan(M_PI / 8.0);
  const double tan67 = std::tan(3.0 * M_PI / 8.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = ((px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1)) -
                         (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1))) /
                        4.0;
      const double gy = ((px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1)) -
                         (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1))) /
                        4.0;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      mag[i] = std::hypot(gx, gy);
      // 0: horizontal gradient, 1: down-right diagonal, 2: vertical,
      // 3: down-left diagonal (image y grows downward).
      const double ax = std::abs(gx);
      const double ay = std::abs(gy);
      if (ay <= tan22 * ax) {
        dir[i] = 0;
      } else if (ay >= tan67 * ax) {
        dir[i] = 2;
      } else {
        dir[i] = (gx * gy > 0.0) ? 1 : 3;
      }
    }
  }

  auto mag_at = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
    return mag[static_cast<std::size_t>(y) * w + x];
  };
  static constexpr int kStep[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};

  std::vector<double> thin(mag.size(), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double m = mag[i];
      if (!(m > 0.0)) continue;
      const int dx = kStep[dir[i]][0];
      const int dy = kStep[dir[i]][1];
      const double before = mag_at(x - dx, y - dy);
      const double after = mag_at(x + dx, y + dy);
      // Plateaus of two equal maxima keep the pixel on the "before" side.
      if (strictly_greater(m, before) && greater_or_equal(m, after)) thin[i] = m;
    }
  }

  std::deque<std::pair<int, int>> frontier;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (thin[static_cast<std::size_t>(y) * w + x] >= hi) {
        edges.at(x, y) = 1.0;
        frontier.emplace_back(x, y);
      }
    }
  }
  while (!frontier.empty()) {
    const auto [cx, cy] = frontier.front();
    frontier.pop_front();
    for (int oy = -1; oy <= 1; ++oy) {
      for (int ox = -1; ox <= 1; ++ox) {
        const int nx = cx + ox;
        const int ny = cy + oy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        if (edges.at(nx, ny) != 0.0) continue;
        if (thin[static_cast<std::size_t>(ny) * w + nx] >= lo &&
            thin[static_cast<std::size_t>(ny) * w + nx] > 0.0) {
          edges.at(nx, ny) = 1.0;
          frontier.emplace_back(nx, ny);
        }
      }
    }
  }
  return edges;
}

ImageBuffer mask_apply(const Mask& mask, const ImageBuffer& img) {
  require_same_size(mask.size(), img.size(), "mask_apply");
  ImageBuffer out(img.width(), img.height(), img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double m = mask.at(x, y);
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = m * img.at(x, y, c);
    }
  }
  return out;
}

ImageBuffer add_clamped(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b, "add_clamped");
  ImageBuffer out(a.width(), a.height(), a.channels());
  const auto av = a.data();
  const auto bv = b.data();
  auto ov = out.data();
  for (std::size_t i = 0; i < ov.size(); ++i) {
    ov[i] = std::clamp(av[i] + bv[i], 0.0, 1.0);
  }
  return out;
}

Mask boundary_band(const BoundingBox& box, int width, Size canvas) {
  if (width < 1) throw ParameterError("band width must be at least 1");
  if (!box.within(canvas)) throw ShapeError("band box lies outside the canvas");
  if (2 * width >= std::min(box.width(), box.height())) {
    throw DegenerateBandError("band width " + std::to_string(width) +
                              " is at least half the box's shorter side");
  }
  Mask band(canvas.width, canvas.height);
  for (int y = box.y0; y < box.y1; ++y) {
    for (int x = box.x0; x < box.x1; ++x) {
      const int d = std::min({x - box.x0, box.x1 - 1 - x, y - box.y0, box.y1 - 1 - y});
      if (d < width) band.at(x, y) = 1.0;
    }
  }
  return band;
}

Mask box_mask(const BoundingBox& box, Size canvas) {
  if (!box.within(canvas)) throw ShapeError("box lies outside the canvas");
  Mask m(canvas.width, canvas.height);
  for (int y = box.y0; y < box.y1; ++y) {
    for (int x = box.x0; x < box.x1; ++x) m.at(x, y) = 1.0;
  }
  return m;
}

ImageBuffer crop(const ImageBuffer& img, const BoundingBox& box) {
  if (!box.within(img.size())) throw ShapeError("crop box lies outside the image");
  ImageBuffer out(box.width(), box.height(), img.channels());
  for (int y = 0; y < box.height(); ++y) {
    for (int x = 0; x < box.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        out.at(x, y, c) = img.at(box.x0 + x, box.y0 + y, c);
      }
    }
  }
  return out;
}

void paste(ImageBuffer& dst, const ImageBuffer& patch, int x, int y) {
  const BoundingBox target{x, y, x + patch.width(), y + patch.height()};
  if (!target.within(dst.size()) || patch.channels() != dst.channels()) {
    throw ShapeError("paste target lies outside the destination");
  }
  for (int py = 0; py < patch.height(); ++py) {
    for (int px = 0; px < patch.width(); ++px) {
      for (int c = 0; c < patch.channels(); ++c) {
        dst.at(x + px, y + py, c) = patch.at(px, py, c);
      }
    }
  }
}

ImageBuffer mask_to_image(const Mask& mask, int channels) {
  ImageBuffer out(mask.width(), mask.height(), channels);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      for (int c = 0; c < channels; ++c) out.at(x, y, c) = mask.at(x, y);
    }
  }
  return out;
}

ImageBuffer clamp01(const ImageBuffer& img) {
  ImageBuffer out = img;
  for (double& v : out.data()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

}  // namespace glyphflow::imaging
