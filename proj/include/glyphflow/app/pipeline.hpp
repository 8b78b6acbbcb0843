#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "glyphflow/app/dataset.hpp"
#include "glyphflow/app/segmenter.hpp"
#include "glyphflow/flow/trainer.hpp"

namespace glyphflow::app {

// A scene as consumed by the conditioning stage.
struct SceneData {
  std::string stem;
  ImageBuffer image;
  Mask seg;
  std::vector<GlyphRegion> regions;
};

std::vector<SceneData> to_scene_data(std::span<const RenderedScene> scenes);

// Reads every image and mask referenced by the manifest.
std::vector<SceneData> load_scenes(const DatasetManifest& manifest);

struct ConditionedScene {
  condition::ConditionMap condition;
  Mask m_gr;
};

// Segments each scene (segmenter seed derived from `seed` and the scene
// index), then builds its condition image and glyph-region mask.
std::vector<ConditionedScene> condition_scenes(std::span<const SceneData> scenes,
                                               const Segmenter& segmenter,
                                               const condition::AgcConfig& agc,
                                               condition::ConditionMode mode,
                                               std::uint64_t seed);

std::vector<flow::TrainingExample> make_examples(std::span<const SceneData> scenes,
                                                 std::span<const ConditionedScene> conds,
                                                 const flow::Codec& codec);

// Everything a training run needs besides data.
struct ExperimentConfig {
  int patch = 8;
  std::vector<int> hidden{64, 64};
  flow::TrainConfig train{};
  condition::AgcConfig agc{};
  std::vector<double> eval_times{0.25, 0.5, 0.75};

  flow::DenoiserConfig denoiser() const;
};

// Seeds a run derives from its root seed.
struct RunSeeds {
  std::uint64_t codec = 0;
  std::uint64_t init = 0;
  std::uint64_t train = 0;
  std::uint64_t eval = 0;
  std::uint64_t segment = 0;
  std::uint64_t sample = 0;

  static RunSeeds from(std::uint64_t root);
};

struct AblationArm {
  std::string label;
  double lambda = 1.0;
  condition::ConditionMode mode = condition::ConditionMode::Adaptive;
};

struct AblationRow {
  std::string label;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  condition::ConditionMode mode = condition::ConditionMode::Adaptive;
  flow::ReconstructionMetrics metrics;
  double final_loss = 0.0;
};

// Trains every arm once per seed. Within a seed all arms share the codec,
// the initial parameters, the batch/noise/time streams and the evaluation
// noise, so they differ only in lambda and condition mode.
std::vector<AblationRow> run_ablation(std::span<const SceneData> scenes,
                                      const Segmenter& segmenter, const ExperimentConfig& cfg,
                                      std::span<const AblationArm> arms,
                                      std::span<const std::uint64_t> seeds);

void write_ablation_report(std::span<const AblationRow> rows, const std::filesystem::path& path);

}  // namespace glyphflow::app
