#include <cmath>
#include <deque>
#include <random>

#include "doctest.h"

#include "glyphflow/error.hpp"
#include "glyphflow/imaging/image.hpp"
#include "glyphflow/imaging/ops.hpp"
#include "glyphflow/imaging/png_io.hpp"

using namespace glyphflow;
using namespace glyphflow::imaging;

namespace {

// Dense 2-D convolution with an outer-product Gaussian, edge-replicated.
ImageBuffer dense_blur(const ImageBuffer& img, double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  double norm = 0.0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) norm += std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
  }
  ImageBuffer out(img.width(), img.height(), img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        double acc = 0.0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const int sx = std::clamp(x + dx, 0, img.width() - 1);
            const int sy = std::clamp(y + dy, 0, img.height() - 1);
            acc += std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma)) * img.at(sx, sy, c);
          }
        }
        out.at(x, y, c) = acc / norm;
      }
    }
  }
  return out;
}

bool tie(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

// Brute-force Canny: dense smoothing, direct Sobel, angle-binned
// suppression and fixpoint hysteresis.
Mask canny_oracle(const Mask& m, double sigma, double lo, double hi) {
  const int w = m.width();
  const int h = m.height();
  const ImageBuffer s = dense_blur(m.to_image(), sigma);
  auto p = [&](int x, int y) { return s.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1), 0); };
  std::vector<double> mag(static_cast<std::size_t>(w * h));
  std::vector<double> ang(mag.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double gx = 0.0;
      double gy = 0.0;
      const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
      for (int j = -1; j <= 1; ++j) {
        for (int i = -1; i <= 1; ++i) {
          gx += kx[j + 1][i + 1] * p(x + i, y + j);
          gy += kx[i + 1][j + 1] * p(x + i, y + j);
        }
      }
      gx /= 4.0;
      gy /= 4.0;
      mag[static_cast<std::size_t>(y * w + x)] = std::sqrt(gx * gx + gy * gy);
      ang[static_cast<std::size_t>(y * w + x)] = std::atan2(gy, gx);
    }
  }
  auto at = [&](int x, int y) {
    return (x < 0 || y < 0 || x >= w || y >= h) ? 0.0 : mag[static_cast<std::size_t>(y * w + x)];
  };
  std::vector<double> thin(mag.size(), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double mm = at(x, y);
      if (mm <= 0.0) continue;
      double deg = ang[static_cast<std::size_t>(y * w + x)] * 180.0 / M_PI;
      if (deg < 0) deg += 180.0;
      int dx = 1;
      int dy = 0;
      if (deg >= 22.5 && deg < 67.5) { dx = 1; dy = 1; }
      else if (deg >= 67.5 && deg < 112.5) { dx = 0; dy = 1; }
      else if (deg >= 112.5 && deg < 157.5) { dx = -1; dy = 1; }
      const double b = at(x - dx, y - dy);
      const double a = at(x + dx, y + dy);
      if (mm > b && !tie(mm, b) && (mm > a || tie(mm, a))) thin[static_cast<std::size_t>(y * w + x)] = mm;
    }
  }
  Mask e(w, h);
  for (std::size_t i = 0; i < thin.size(); ++i) {
    if (thin[i] >= hi) e.data()[i] = 1.0;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double t = thin[static_cast<std::size_t>(y * w + x)];
        if (e.at(x, y) != 0.0 || !(t > 0.0 && t >= lo)) continue;
        for (int j = -1; j <= 1 && e.at(x, y) == 0.0; ++j) {
          for (int i = -1; i <= 1; ++i) {
            const int nx = x + i;
            const int ny = y + j;
            if (nx >= 0 && ny >= 0 && nx < w && ny < h && e.at(nx, ny) != 0.0) {
              e.at(x, y) = 1.0;
              changed = true;
              break;
            }
          }
        }
      }
    }
  }
  return e;
}

Mask square(int canvas, int x0, int y0, int side) {
  Mask m(canvas, canvas);
  for (int y = y0; y < y0 + side; ++y) {
    for (int x = x0; x < x0 + side; ++x) m.at(x, y) = 1.0;
  }
  return m;
}

ImageBuffer random_image(int w, int h, int c, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ImageBuffer img(w, h, c);
  for (double& v : img.data()) v = u(rng);
  return img;
}

}  // namespace

TEST_CASE("gaussian kernel is normalized with radius ceil(3 sigma)") {
  for (double s : {0.3, 1.0, 1.4, 2.0, 3.7}) {
    const auto k = gaussian_kernel(s);
    CHECK(k.size() == static_cast<std::size_t>(2 * std::ceil(3 * s) + 1));
    double sum = 0.0;
    for (double v : k) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(gaussian_kernel(0.0), ParameterError);
  CHECK_THROWS_AS(gaussian_blur(ImageBuffer(4, 4, 1), -1.0), ParameterError);
}

TEST_CASE("blur preserves constants") {
  const ImageBuffer img(17, 11, 3, 0.5);
  const ImageBuffer out = gaussian_blur(img, 2.3);
  for (double v : out.data()) CHECK(v == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("blur of an impulse matches dense convolution") {
  ImageBuffer img(21, 21, 1);
  img.at(10, 10) = 1.0;
  const ImageBuffer a = gaussian_blur(img, 1.0);
  const ImageBuffer b = dense_blur(img, 1.0);
  for (std::size_t i = 0; i < a.data().size(); ++i) CHECK(std::abs(a.data()[i] - b.data()[i]) < 1e-9);
}

TEST_CASE("blur of random images matches dense convolution near borders") {
  const ImageBuffer img = random_image(13, 9, 3, 5);
  const ImageBuffer a = gaussian_blur(img, 1.7);
  const ImageBuffer b = dense_blur(img, 1.7);
  for (std::size_t i = 0; i < a.data().size(); ++i) CHECK(std::abs(a.data()[i] - b.data()[i]) < 1e-9);
}

TEST_CASE("blur preserves the mean of an image whose border is constant") {
  ImageBuffer img(40, 40, 1, 0.25);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int y = 10; y < 30; ++y) {
    for (int x = 10; x < 30; ++x) img.at(x, y) = u(rng);
  }
  const ImageBuffer out = gaussian_blur(img, 1.5);
  double m0 = 0.0;
  double m1 = 0.0;
  for (std::size_t i = 0; i < img.data().size(); ++i) {
    m0 += img.data()[i];
    m1 += out.data()[i];
  }
  CHECK(std::abs(m0 - m1) / static_cast<double>(img.data().size()) < 1e-6);
}

TEST_CASE("canny on an empty mask is empty") {
  CHECK(canny(Mask(16, 16)).count_nonzero() == 0);
}

TEST_CASE("canny rejects bad thresholds") {
  CHECK_THROWS_AS(canny(Mask(8, 8), 1.4, 0.3, 0.3), ParameterError);
  CHECK_THROWS_AS(canny(Mask(8, 8), 1.4, 0.4, 0.1), ParameterError);
  CHECK_THROWS_AS(canny(Mask(8, 8), 0.0, 0.1, 0.3), ParameterError);
}

TEST_CASE("canny square yields a one-pixel ring matching the oracle") {
  const Mask m = square(32, 11, 11, 10);
  const Mask e = canny(m);
  CHECK(e == canny_oracle(m, 1.4, 0.1, 0.3));
  CHECK(e.is_binary());
  // Every row and column crossing the square's interior holds exactly two
  // edge pixels, one on each side.
  for (int k = 13; k < 19; ++k) {
    int row = 0;
    int col = 0;
    for (int i = 0; i < 32; ++i) {
      row += e.at(i, k) != 0.0;
      col += e.at(k, i) != 0.0;
    }
    CHECK(row == 2);
    CHECK(col == 2);
  }
  // The ring hugs the square boundary.
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      if (e.at(x, y) == 0.0) continue;
      const bool near = x >= 10 && x <= 21 && y >= 10 && y <= 21;
      const bool deep = x >= 12 && x <= 19 && y >= 12 && y <= 19;
      CHECK((near && !deep));
    }
  }
}

TEST_CASE("canny vertical step yields a single column") {
  Mask m(24, 16);
  for (int y = 0; y < 16; ++y) {
    for (int x = 12; x < 24; ++x) m.at(x, y) = 1.0;
  }
  const Mask e = canny(m);
  CHECK(e == canny_oracle(m, 1.4, 0.1, 0.3));
  int column = -1;
  for (int y = 0; y < 16; ++y) {
    int count = 0;
    for (int x = 0; x < 24; ++x) {
      if (e.at(x, y) == 0.0) continue;
      ++count;
      if (column < 0) column = x;
      CHECK(x == column);
    }
    CHECK(count == 1);
  }
  CHECK((column == 11 || column == 12));
}

TEST_CASE("canny matches the oracle on random blobs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    Mask m(28, 24);
    std::bernoulli_distribution b(0.15);
    for (int y = 4; y < 20; ++y) {
      for (int x = 4; x < 24; ++x) m.at(x, y) = b(rng) ? 1.0 : 0.0;
    }
    CHECK(canny(m) == canny_oracle(m, 1.4, 0.1, 0.3));
    CHECK(canny(m, 1.0, 0.05, 0.2) == canny_oracle(m, 1.0, 0.05, 0.2));
  }
}

TEST_CASE("canny is translation-equivariant and binary") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> shift(-4, 4);
  for (int trial = 0; trial < 6; ++trial) {
    const int dx = shift(rng);
    const int dy = shift(rng);
    const Mask a = square(40, 14, 15, 9);
    const Mask b = square(40, 14 + dx, 15 + dy, 9);
    const Mask ea = canny(a);
    const Mask eb = canny(b);
    CHECK(eb.is_binary());
    for (int y = 0; y < 40; ++y) {
      for (int x = 0; x < 40; ++x) {
        const int sx = x + dx;
        const int sy = y + dy;
        if (sx >= 0 && sy >= 0 && sx < 40 && sy < 40) CHECK(ea.at(x, y) == eb.at(sx, sy));
      }
    }
  }
}

TEST_CASE("mask_apply identities") {
  const ImageBuffer img = random_image(6, 5, 3, 1);
  CHECK(mask_apply(Mask(6, 5, 1.0), img) == img);
  const ImageBuffer blanked = mask_apply(Mask(6, 5, 0.0), img);
  for (double v : blanked.data()) CHECK(v == 0.0);
  Mask checker(6, 5);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 6; ++x) checker.at(x, y) = (x + y) % 2;
  }
  const ImageBuffer out = mask_apply(checker, ImageBuffer(6, 5, 3, 0.8));
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 6; ++x) {
      for (int c = 0; c < 3; ++c) CHECK(out.at(x, y, c) == ((x + y) % 2 ? 0.8 : 0.0));
    }
  }
  const ImageBuffer once = mask_apply(checker, img);
  CHECK(mask_apply(checker, once) == once);
  CHECK_THROWS_AS(mask_apply(Mask(5, 5), img), ShapeError);
}

TEST_CASE("add_clamped matches a scalar loop and is commutative") {
  const ImageBuffer a(4, 4, 3, 0.7);
  const ImageBuffer doubled = add_clamped(a, a);
  for (double v : doubled.data()) CHECK(v == 1.0);
  CHECK(add_clamped(ImageBuffer(4, 4, 3, 0.0), a) == a);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  ImageBuffer x(9, 7, 3);
  ImageBuffer y(9, 7, 3);
  for (double& v : x.data()) v = u(rng);
  for (double& v : y.data()) v = u(rng);
  const ImageBuffer s = add_clamped(x, y);
  CHECK(s == add_clamped(y, x));
  for (std::size_t i = 0; i < s.data().size(); ++i) {
    const double expect = std::min(std::max(x.data()[i] + y.data()[i], 0.0), 1.0);
    CHECK(s.data()[i] == expect);
    CHECK((s.data()[i] >= 0.0 && s.data()[i] <= 1.0));
  }
}

TEST_CASE("boundary band pixel counts") {
  const BoundingBox box{3, 4, 13, 14};
  const Size canvas{20, 20};
  auto count = [&](int width) {
    // Oracle: a pixel is in the band when it is within `width` of any side.
    std::size_t n = 0;
    for (int y = 0; y < 20; ++y) {
      for (int x = 0; x < 20; ++x) {
        if (box.contains(x, y) &&
            (x < box.x0 + width || x >= box.x1 - width || y < box.y0 + width || y >= box.y1 - width)) {
          ++n;
        }
      }
    }
    return n;
  };
  CHECK(boundary_band(box, 1, canvas).count_nonzero() == 36);
  CHECK(boundary_band(box, 4, canvas).count_nonzero() == 96);
  for (int w = 1; w <= 4; ++w) CHECK(boundary_band(box, w, canvas).count_nonzero() == count(w));
  CHECK_THROWS_AS(boundary_band(box, 5, canvas), DegenerateBandError);
}

TEST_CASE("boxes and intersections") {
  CHECK(intersection_area({0, 0, 10, 10}, {5, 5, 15, 15}) == 25);
  CHECK(intersection_area({0, 0, 10, 10}, {10, 0, 20, 10}) == 0);
  CHECK(box_mask({1, 1, 4, 3}, {5, 5}).count_nonzero() == 6);
  CHECK_THROWS_AS(box_mask({1, 1, 8, 3}, {5, 5}), ShapeError);
}

TEST_CASE("crop and paste round-trip") {
  const ImageBuffer img = random_image(10, 8, 3, 2);
  const ImageBuffer part = crop(img, {2, 3, 7, 8});
  CHECK(part.width() == 5);
  CHECK(part.height() == 5);
  ImageBuffer dst(10, 8, 3);
  paste(dst, part, 2, 3);
  CHECK(crop(dst, {2, 3, 7, 8}) == part);
}

TEST_CASE("png round trip of quantized values is exact") {
  ImageBuffer img(7, 5, 3);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> q(0, 255);
  for (double& v : img.data()) v = q(rng) / 255.0;
  const auto path = std::filesystem::temp_directory_path() / "glyphflow_png_test.png";
  save_png(img, path);
  CHECK(load_png(path) == img);
  Mask m(7, 5);
  m.at(2, 3) = 1.0;
  save_mask_png(m, path);
  CHECK(load_mask_png(path) == m);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_png("/nonexistent/none.png"), IoError);
}
