#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "glyphflow/imaging/image.hpp"

namespace glyphflow::flow {

using imaging::ImageBuffer;

// h x w grid of c-channel latent pixels, row-major with channels innermost.
class LatentTensor {
 public:
  LatentTensor() = default;
  LatentTensor(int h, int w, int c, double fill = 0.0);
  LatentTensor(int h, int w, int c, std::vector<double> data);

  int h() const noexcept { return h_; }
  int w() const noexcept { return w_; }
  int c() const noexcept { return c_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool same_shape(const LatentTensor& o) const noexcept {
    return h_ == o.h_ && w_ == o.w_ && c_ == o.c_;
  }

  double& at(int i, int j, int k) {
    return data_[(static_cast<std::size_t>(i) * w_ + j) * c_ + k];
  }
  double at(int i, int j, int k) const {
    return data_[(static_cast<std::size_t>(i) * w_ + j) * c_ + k];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool all_finite() const noexcept;
  double norm() const noexcept;

  friend bool operator==(const LatentTensor&, const LatentTensor&) = default;

 private:
  int h_ = 0;
  int w_ = 0;
  int c_ = 0;
  std::vector<double> data_;
};

// a + s * b, element-wise.
LatentTensor axpy(const LatentTensor& a, double s, const LatentTensor& b);

// Invertible stand-in for a VAE: space-to-depth by `patch`, then an
// orthogonal mixing of the 3 p^2 patch values of each latent pixel.
class Codec {
 public:
  Codec(int patch, std::uint64_t seed);

  int patch() const noexcept { return patch_; }
  std::uint64_t seed() const noexcept { return seed_; }
  int latent_channels() const noexcept { return 3 * patch_ * patch_; }
  const Eigen::MatrixXd& mixing() const noexcept { return mixing_; }

  // Linear, never clamps. Input must have 3 channels and dimensions
  // divisible by the patch size.
  LatentTensor encode(const ImageBuffer& img) const;
  ImageBuffer decode(const LatentTensor& z) const;

 private:
  int patch_;
  std::uint64_t seed_;
  Eigen::MatrixXd mixing_;
};

}  // namespace glyphflow::flow
