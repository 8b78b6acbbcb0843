#include "glyphflow/flow/denoiser.hpp"

#include <cmath>
#include <random>

#include "glyphflow/flow/detail/mlp.hpp"

namespace glyphflow::flow {

void DenoiserConfig::validate() const {
  if (latent_channels < 1) throw ParameterError("latent_channels must be positive");
  if (time_embed_dim < 0 || time_embed_dim % 2 != 0) {
    throw ParameterError("time_embed_dim must be even and non-negative");
  }
  if (text_embed_dim < 0) throw ParameterError("text_embed_dim must be non-negative");
  for (int h : hidden) {
    if (h < 1) throw ParameterError("hidden widths must be positive");
  }
}

std::size_t DenoiserParams::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const DenseLayer& l : layers) {
    n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  }
  return n;
}

double& DenoiserParams::flat(std::size_t i) {
  for (DenseLayer& l : layers) {
    const auto nw = static_cast<std::size_t>(l.weight.size());
    if (i < nw) return l.weight.data()[i];
    i -= nw;
    const auto nb = static_cast<std::size_t>(l.bias.size());
    if (i < nb) return l.bias.data()[i];
    i -= nb;
  }
  throw ParameterError("flat parameter index out of range");
}

double DenoiserParams::flat(std::size_t i) const {
  return const_cast<DenoiserParams&>(*this).flat(i);
}

bool DenoiserParams::all_finite() const noexcept {
  for (const DenseLayer& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

double DenoiserParams::squared_norm() const noexcept {
  double s = 0.0;
  for (const DenseLayer& l : layers) s += l.weight.squaredNorm() + l.bias.squaredNorm();
  return s;
}

DenoiserParams DenoiserParams::zeros_like() const {
  DenoiserParams out{config, {}};
  out.layers.reserve(layers.size());
  for (const DenseLayer& l : layers) {
    out.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                          Eigen::VectorXd::Zero(l.bias.size())});
  }
  return out;
}

DenoiserParams init_denoiser(const DenoiserConfig& cfg, std::uint64_t seed,
                             double output_scale) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  DenoiserParams p{cfg, {}};
  std::vector<int> widths{cfg.input_dim()};
  widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
  widths.push_back(cfg.latent_channels);
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    const int in = widths[k];
    const int out = widths[k + 1];
    const bool last = k + 2 == widths.size();
    const double scale = std::sqrt(2.0 / in) * (last ? output_scale : 1.0);
    DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out)};
    for (int j = 0; j < in; ++j) {
      for (int i = 0; i < out; ++i) layer.weight(i, j) = scale * normal(rng);
    }
    p.layers.push_back(std::move(layer));
  }
  return p;
}

std::vector<double> time_embedding(double t, int dim) {
  std::vector<double> e(static_cast<std::size_t>(dim));
  const int pairs = dim / 2;
  for (int j = 0; j < pairs; ++j) {
    const double freq =
        pairs == 1 ? 1.0 : std::pow(100.0, static_cast<double>(j) / (pairs - 1));
    e[static_cast<std::size_t>(2 * j)] = std::sin(freq * t);
    e[static_cast<std::size_t>(2 * j + 1)] = std::cos(freq * t);
  }
  return e;
}

LatentTensor predict_velocity(const DenoiserParams& params, const LatentTensor& zt,
                              const LatentTensor& z_cond, double t) {
  const int c = params.config.latent_channels;
  if (!zt.same_shape(z_cond) || zt.c() != c) {
    throw ShapeError("denoiser input shapes do not match its configuration");
  }
  const detail::BatchInput in{{&zt}, {&z_cond}, {t}};
  const detail::Activations act = detail::forward(params, in);
  LatentTensor v(zt.h(), zt.w(), c);
  Eigen::Map<detail::RowMatrix>(v.data().data(), act.output.rows(), c) = act.output;
  return v;
}

}  // namespace glyphflow::flow
