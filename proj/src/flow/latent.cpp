#include "glyphflow/flow/latent.hpp"

#include <cmath>
#include <random>
#include <string>

#include <Eigen/QR>

namespace glyphflow::flow {

LatentTensor::LatentTensor(int h, int w, int c, double fill)
    : h_(h), w_(w), c_(c) {
  if (h < 0 || w < 0 || c < 1) throw ShapeError("invalid latent shape");
  data_.assign(static_cast<std::size_t>(h) * w * c, fill);
}

LatentTensor::LatentTensor(int h, int w, int c, std::vector<double> data)
    : h_(h), w_(w), c_(c), data_(std::move(data)) {
  if (h < 0 || w < 0 || c < 1 ||
      data_.size() != static_cast<std::size_t>(h) * w * c) {
    throw ShapeError("latent data length does not match its shape");
  }
}

bool LatentTensor::all_finite() const noexcept {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double LatentTensor::norm() const noexcept {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

LatentTensor axpy(const LatentTensor& a, double s, const LatentTensor& b) {
  if (!a.same_shape(b)) throw ShapeError("latent shapes differ");
  LatentTensor out = a;
  auto o = out.data();
  auto bv = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += s * bv[i];
  return out;
}

Codec::Codec(int patch, std::uint64_t seed) : patch_(patch), seed_(seed) {
  if (patch < 1) throw ParameterError("codec patch size must be positive");
  const int d = latent_channels();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  mixing_ = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

LatentTensor Codec::encode(const ImageBuffer& img) const {
  if (img.channels() != 3) throw ShapeError("codec expects a 3-channel image");
  if (img.width() % patch_ != 0 || img.height() % patch_ != 0) {
    throw ShapeError("image " + std::to_string(img.width()) + "x" +
                     std::to_string(img.height()) +
                     " is not divisible by patch size " + std::to_string(patch_));
  }
  const int h = img.height() / patch_;
  const int w = img.width() / patch_;
  const int d = latent_channels();
  RowMatrix patches(static_cast<Eigen::Index>(h) * w, d);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const Eigen::Index row = static_cast<Eigen::Index>(i) * w + j;
      for (int dy = 0; dy < patch_; ++dy) {
        for (int dx = 0; dx < patch_; ++dx) {
          for (int ch = 0; ch < 3; ++ch) {
            patches(row, (dy * patch_ + dx) * 3 + ch) =
                img.at(j * patch_ + dx, i * patch_ + dy, ch);
          }
        }
      }
    }
  }
  LatentTensor z(h, w, d);
  Eigen::Map<RowMatrix>(z.data().data(), patches.rows(), d).noalias() =
      patches * mixing_.transpose();
  return z;
}

ImageBuffer Codec::decode(const LatentTensor& z) const {
  const int d = latent_channels();
  if (z.c() != d) throw ShapeError("latent channel count does not match the codec");
  const RowMatrix patches =
      Eigen::Map<const RowMatrix>(z.data().data(), static_cast<Eigen::Index>(z.h()) * z.w(), d) *
      mixing_;
  ImageBuffer img(z.w() * patch_, z.h() * patch_, 3);
  for (int i = 0; i < z.h(); ++i) {
    for (int j = 0; j < z.w(); ++j) {
      const Eigen::Index row = static_cast<Eigen::Index>(i) * z.w() + j;
      for (int dy = 0; dy < patch_; ++dy) {
        for (int dx = 0; dx < patch_; ++dx) {
          for (int ch = 0; ch < 3; ++ch) {
            img.at(j * patch_ + dx, i * patch_ + dy, ch) =
                patches(row, (dy * patch_ + dx) * 3 + ch);
          }
        }
      }
    }
  }
  return img;
}

}  // namespace glyphflow::flow
