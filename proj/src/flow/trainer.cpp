#include "glyphflow/flow/trainer.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <string>

#include "glyphflow/rng.hpp"

namespace glyphflow::flow {

void TrainConfig::validate() const {
  if (steps < 0) throw ParameterError("steps must be non-negative");
  if (activation_step() > steps) {
    throw ParameterError("gr activation step exceeds the step count");
  }
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be non-negative");
  if (!(learning_rate > 0.0)) throw ParameterError("learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ParameterError("momentum must be in [0,1)");
  if (!(grad_clip >= 0.0)) throw ParameterError("grad_clip must be non-negative");
  if (batch_size < 1) throw ParameterError("batch size must be positive");
}

namespace {

LatentTensor normal_like(const LatentTensor& like, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  LatentTensor z(like.h(), like.w(), like.c());
  for (double& v : z.data()) v = normal(rng);
  return z;
}

}  // namespace

std::vector<BatchItem> training_batch(const TrainConfig& cfg,
                                      std::span<const TrainingExample> data, int step) {
  const SeedTree seeds(cfg.seed);
  auto pick = seeds.stream("train/batch", static_cast<std::uint64_t>(step));
  auto noise = seeds.stream("train/noise", static_cast<std::uint64_t>(step));
  auto times = seeds.stream("train/time", static_cast<std::uint64_t>(step));
  std::uniform_int_distribution<std::size_t> index(0, data.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<BatchItem> batch;
  batch.reserve(static_cast<std::size_t>(cfg.batch_size));
  for (int b = 0; b < cfg.batch_size; ++b) {
    const std::size_t i = index(pick);
    batch.push_back({i, normal_like(data[i].z0, noise), unit(times)});
  }
  return batch;
}

TrainResult train(const TrainConfig& cfg, std::span<const TrainingExample> data,
                  const Codec& codec, DenoiserParams init,
                  const std::function<void(const StepLog&)>& on_step) {
  cfg.validate();
  if (data.empty()) throw ParameterError("training needs a non-empty dataset");
  TrainResult result{std::move(init), {}};
  result.log.reserve(static_cast<std::size_t>(cfg.steps));
  DenoiserParams velocity = result.params.zeros_like();
  const std::size_t n_params = result.params.parameter_count();
  const int activation = cfg.activation_step();

  for (int step = 0; step < cfg.steps; ++step) {
    const double lambda = step < activation ? 0.0 : cfg.lambda;
    const std::vector<BatchItem> batch = training_batch(cfg, data, step);
    ObjectiveResult obj = evaluate_objective(result.params, data, batch, lambda, codec);
    if (!std::isfinite(obj.loss.total)) {
      throw TrainingDiverged("non-finite loss at step " + std::to_string(step) +
                             " (l_fm=" + std::to_string(obj.loss.l_fm) +
                             ", l_gr=" + std::to_string(obj.loss.l_gr) + ")");
    }
    double scale = 1.0;
    if (cfg.grad_clip > 0.0) {
      const double gnorm = std::sqrt(obj.grad.squared_norm());
      if (gnorm > cfg.grad_clip) scale = cfg.grad_clip / gnorm;
    }
    for (std::size_t l = 0; l < result.params.layers.size(); ++l) {
      DenseLayer& p = result.params.layers[l];
      DenseLayer& v = velocity.layers[l];
      const DenseLayer& g = obj.grad.layers[l];
      v.weight = cfg.momentum * v.weight + scale * g.weight;
      v.bias = cfg.momentum * v.bias + scale * g.bias;
      p.weight -= cfg.learning_rate * v.weight;
      p.bias -= cfg.learning_rate * v.bias;
    }
    if (!result.params.all_finite()) {
      throw TrainingDiverged("non-finite parameter after step " + std::to_string(step) +
                             " of " + std::to_string(n_params) + " parameters");
    }
    result.log.push_back({step, obj.loss});
    if (on_step) on_step(result.log.back());
  }
  return result;
}

ReconstructionMetrics evaluate_reconstruction(const DenoiserParams& params,
                                              std::span<const TrainingExample> data,
                                              const Codec& codec, std::uint64_t seed,
                                              std::span<const double> times) {
  const SeedTree seeds(seed);
  double masked_sq = 0.0;
  double mask_weight = 0.0;
  double full_sq = 0.0;
  double full_n = 0.0;
  double fm_sum = 0.0;
  double fm_n = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const TrainingExample& ex = data[i];
    auto rng = seeds.stream("eval/noise", i);
    for (double t : times) {
      const LatentTensor eps = normal_like(ex.z0, rng);
      const FlowSample s = sample_flow(ex.z0, eps, t);
      const LatentTensor v = predict_velocity(params, s.zt, ex.z_cond, t);
      fm_sum += loss_fm(v, s.v_star) * static_cast<double>(v.size());
      fm_n += static_cast<double>(v.size());
      const ImageBuffer x0_hat = reconstruct_x0(s.zt, v, t, codec);
      for (int y = 0; y < ex.x0.height(); ++y) {
        for (int x = 0; x < ex.x0.width(); ++x) {
          const double m = ex.m_gr.at(x, y);
          for (int c = 0; c < ex.x0.channels(); ++c) {
            const double d = x0_hat.at(x, y, c) - ex.x0.at(x, y, c);
            full_sq += d * d;
            masked_sq += m * d * d;
            mask_weight += m;
          }
        }
      }
      full_n += static_cast<double>(ex.x0.data().size());
    }
  }
  ReconstructionMetrics out;
  out.glyph_region_mse = mask_weight > 0.0 ? masked_sq / mask_weight : 0.0;
  out.full_mse = full_n > 0.0 ? full_sq / full_n : 0.0;
  out.l_fm = fm_n > 0.0 ? fm_sum / fm_n : 0.0;
  return out;
}

ImageBuffer sample_image(const DenoiserParams& params, const LatentTensor& z_cond,
                         const Codec& codec, std::uint64_t seed, int steps) {
  if (steps < 1) throw ParameterError("sampling needs at least one step");
  std::mt19937_64 rng(seed);
  LatentTensor z = normal_like(z_cond, rng);
  const double dt = 1.0 / steps;
  for (int k = 0; k < steps; ++k) {
    const double t = 1.0 - k * dt;
    const LatentTensor v = predict_velocity(params, z, z_cond, t);
    z = axpy(z, -dt, v);
  }
  return codec.decode(z);
}

namespace {

constexpr char kMagic[8] = {'G', 'F', 'L', 'O', 'W', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw IoError("truncated checkpoint " + path.string());
  }
  return v;
}

}  // namespace

void save_checkpoint(const DenoiserParams& params, const Codec& codec,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(codec.patch()));
  put<std::uint64_t>(out, codec.seed());
  const DenoiserConfig& cfg = params.config;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.latent_channels));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.time_embed_dim));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.text_embed_dim));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.hidden.size()));
  for (int h : cfg.hidden) put<std::uint32_t>(out, static_cast<std::uint32_t>(h));
  const std::size_t n = params.parameter_count();
  put<std::uint64_t>(out, n);
  for (std::size_t i = 0; i < n; ++i) put<double>(out, params.flat(i));
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("not a checkpoint file: " + path.string());
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  ck.patch = static_cast<int>(get<std::uint32_t>(in, path));
  ck.codec_seed = get<std::uint64_t>(in, path);
  DenoiserConfig cfg;
  cfg.latent_channels = static_cast<int>(get<std::uint32_t>(in, path));
  cfg.time_embed_dim = static_cast<int>(get<std::uint32_t>(in, path));
  cfg.text_embed_dim = static_cast<int>(get<std::uint32_t>(in, path));
  const auto n_hidden = get<std::uint32_t>(in, path);
  if (n_hidden > 64) throw IoError("implausible layer count in " + path.string());
  cfg.hidden.clear();
  for (std::uint32_t k = 0; k < n_hidden; ++k) {
    cfg.hidden.push_back(static_cast<int>(get<std::uint32_t>(in, path)));
  }
  ck.params = init_denoiser(cfg, 0);
  const auto n = get<std::uint64_t>(in, path);
  if (n != ck.params.parameter_count()) {
    throw IoError("checkpoint parameter count does not match its header");
  }
  for (std::size_t i = 0; i < n; ++i) ck.params.flat(i) = get<double>(in, path);
  return ck;
}

}  // namespace glyphflow::flow
