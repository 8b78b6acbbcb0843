#include "glyphflow/app/pipeline.hpp"

#include <fstream>

#include "json.hpp"

#include "glyphflow/imaging/png_io.hpp"
#include "glyphflow/rng.hpp"

namespace glyphflow::app {

std::vector<SceneData> to_scene_data(std::span<const RenderedScene> scenes) {
  std::vector<SceneData> out;
  out.reserve(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    out.push_back({scene_stem(static_cast<int>(i)), scenes[i].image, scenes[i].seg,
                   scenes[i].regions});
  }
  return out;
}

std::vector<SceneData> load_scenes(const DatasetManifest& manifest) {
  const auto missing = manifest.missing_files();
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw IoError("manifest references missing files: " + list);
  }
  std::vector<SceneData> out;
  out.reserve(manifest.records.size());
  for (const ManifestRecord& rec : manifest.records) {
    SceneData s{rec.stem(), imaging::load_png(manifest.resolve(rec.image)),
                imaging::load_mask_png(manifest.resolve(rec.mask)), rec.regions};
    if (s.seg.size() != s.image.size()) {
      throw ShapeError("mask size differs from image for " + rec.image);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ConditionedScene> condition_scenes(std::span<const SceneData> scenes,
                                               const Segmenter& segmenter,
                                               const condition::AgcConfig& agc,
                                               condition::ConditionMode mode,
                                               std::uint64_t seed) {
  const SeedTree seeds(seed);
  std::vector<ConditionedScene> out;
  out.reserve(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const SceneData& s = scenes[i];
    const Mask seg = segmenter.segment({s.image, &s.seg, s.regions, seeds.derive("segment", i)});
    out.push_back({condition::build_condition(s.image, seg, s.regions, agc, mode),
                   condition::build_gr_mask(seg, s.regions, agc)});
  }
  return out;
}

std::vector<flow::TrainingExample> make_examples(std::span<const SceneData> scenes,
                                                 std::span<const ConditionedScene> conds,
                                                 const flow::Codec& codec) {
  if (scenes.size() != conds.size()) throw ShapeError("scene and condition counts differ");
  std::vector<flow::TrainingExample> out;
  out.reserve(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    out.push_back(flow::make_example(scenes[i].image, conds[i].condition.image, conds[i].m_gr,
                                     codec));
  }
  return out;
}

flow::DenoiserConfig ExperimentConfig::denoiser() const {
  flow::DenoiserConfig d;
  d.latent_channels = 3 * patch * patch;
  d.hidden = hidden;
  return d;
}

RunSeeds RunSeeds::from(std::uint64_t root) {
  const SeedTree t(root);
  return {t.derive("codec"), t.derive("init"),    t.derive("train"),
          t.derive("eval"),  t.derive("segment"), t.derive("sample")};
}

std::vector<AblationRow> run_ablation(std::span<const SceneData> scenes,
                                      const Segmenter& segmenter, const ExperimentConfig& cfg,
                                      std::span<const AblationArm> arms,
                                      std::span<const std::uint64_t> seeds) {
  if (arms.empty() || seeds.empty()) throw ParameterError("ablation needs arms and seeds");
  std::vector<AblationRow> rows;
  for (const std::uint64_t seed : seeds) {
    const RunSeeds rs = RunSeeds::from(seed);
    const flow::Codec codec(cfg.patch, rs.codec);
    const flow::DenoiserParams init = flow::init_denoiser(cfg.denoiser(), rs.init);
    for (const AblationArm& arm : arms) {
      const auto conds = condition_scenes(scenes, segmenter, cfg.agc, arm.mode, rs.segment);
      const auto data = make_examples(scenes, conds, codec);
      flow::TrainConfig tc = cfg.train;
      tc.lambda = arm.lambda;
      tc.seed = rs.train;
      const flow::TrainResult res = flow::train(tc, data, codec, init);
      rows.push_back({arm.label, seed, arm.lambda, arm.mode,
                      flow::evaluate_reconstruction(res.params, data, codec, rs.eval,
                                                    cfg.eval_times),
                      res.log.empty() ? 0.0 : res.log.back().loss.total});
    }
  }
  return rows;
}

void write_ablation_report(std::span<const AblationRow> rows, const std::filesystem::path& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const AblationRow& r : rows) {
    arr.push_back({{"arm", r.label},
                   {"seed", r.seed},
                   {"lambda", r.lambda},
                   {"mode", condition::to_string(r.mode)},
                   {"glyph_region_mse", r.metrics.glyph_region_mse},
                   {"full_mse", r.metrics.full_mse},
                   {"l_fm", r.metrics.l_fm},
                   {"final_loss", r.final_loss}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << nlohmann::json{{"runs", arr}}.dump(2) << '\n';
}

}  // namespace glyphflow::app
