#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "glyphflow/flow/latent.hpp"

namespace glyphflow::flow {

struct DenoiserConfig {
  int latent_channels = 192;
  int time_embed_dim = 16;  // even; sin/cos pairs
  // Reserved text-embedding slot. Always fed zeros.
  int text_embed_dim = 4;
  std::vector<int> hidden = {64, 64};

  int input_dim() const noexcept {
    return 2 * latent_channels + time_embed_dim + text_embed_dim;
  }
  void validate() const;

  friend bool operator==(const DenoiserConfig&, const DenoiserConfig&) = default;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out

  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.weight == b.weight && a.bias == b.bias;
  }
};

// Per-latent-pixel MLP over [z_t | z_cond | embed(t) | text slot] with SiLU
// hidden activations and a linear output. A DenoiserParams value also serves
// as the gradient buffer for itself.
struct DenoiserParams {
  DenoiserConfig config;
  std::vector<DenseLayer> layers;

  std::size_t parameter_count() const noexcept;
  // Flat view in layer order: weights column-major, then biases.
  double& flat(std::size_t i);
  double flat(std::size_t i) const;

  bool all_finite() const noexcept;
  double squared_norm() const noexcept;

  // Same shapes, every entry zero.
  DenoiserParams zeros_like() const;

  friend bool operator==(const DenoiserParams&, const DenoiserParams&) = default;
};

// Hidden layers use He-scaled normals; the output layer is scaled by
// `output_scale` and has zero bias.
DenoiserParams init_denoiser(const DenoiserConfig& cfg, std::uint64_t seed,
                             double output_scale = 0.1);

// Sinusoidal features of t in [0,1] at geometric frequencies 1..100.
std::vector<double> time_embedding(double t, int dim);

// Deterministic forward pass.
LatentTensor predict_velocity(const DenoiserParams& params, const LatentTensor& zt,
                              const LatentTensor& z_cond, double t);

}  // namespace glyphflow::flow
