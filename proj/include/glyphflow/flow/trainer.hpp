#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "glyphflow/flow/objective.hpp"

namespace glyphflow::flow {

struct TrainConfig {
  int steps = 2000;
  // Steps before this index train with lambda forced to 0. Negative selects
  // steps / 5.
  int gr_activation_step = -1;
  double lambda = 1.0;
  double learning_rate = 0.05;
  double momentum = 0.9;
  // Global gradient-norm clip; 0 disables.
  double grad_clip = 1.0;
  int batch_size = 4;
  std::uint64_t seed = 0;

  int activation_step() const noexcept {
    return gr_activation_step < 0 ? steps / 5 : gr_activation_step;
  }
  void validate() const;
};

struct StepLog {
  int step = 0;
  LossBreakdown loss;
};

struct TrainResult {
  DenoiserParams params;
  std::vector<StepLog> log;
};

// Momentum SGD on the combined objective. Batches, noise and times are drawn
// from streams of cfg.seed that do not depend on lambda, so runs differing
// only in lambda see identical data. Throws TrainingDiverged on a
// non-finite loss or parameter.
TrainResult train(const TrainConfig& cfg, std::span<const TrainingExample> data,
                  const Codec& codec, DenoiserParams init,
                  const std::function<void(const StepLog&)>& on_step = {});

// The batch the trainer uses at `step`.
std::vector<BatchItem> training_batch(const TrainConfig& cfg,
                                      std::span<const TrainingExample> data, int step);

struct ReconstructionMetrics {
  // Squared x0 error averaged over masked entries (mask-weighted).
  double glyph_region_mse = 0.0;
  double full_mse = 0.0;
  double l_fm = 0.0;
};

// Deterministic probe: every example at each t in `times`, with noise drawn
// from `seed`.
ReconstructionMetrics evaluate_reconstruction(const DenoiserParams& params,
                                              std::span<const TrainingExample> data,
                                              const Codec& codec, std::uint64_t seed,
                                              std::span<const double> times);

// Euler integration of the velocity field from noise at t=1 down to t=0.
ImageBuffer sample_image(const DenoiserParams& params, const LatentTensor& z_cond,
                         const Codec& codec, std::uint64_t seed, int steps);

// Versioned little-endian binary: magic, version, codec and network shapes,
// then all parameters in flat order.
void save_checkpoint(const DenoiserParams& params, const Codec& codec,
                     const std::filesystem::path& path);

struct Checkpoint {
  DenoiserParams params;
  int patch = 0;
  std::uint64_t codec_seed = 0;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace glyphflow::flow
