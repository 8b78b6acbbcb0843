#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "glyphflow/app/manifest.hpp"
#include "glyphflow/app/scene.hpp"

namespace glyphflow::app {

// Glyph size regime of generated scenes, relative to the default 4900 px^2
// per-character threshold.
enum class SizeProfile {
  Large,  // one region per scene, every character cell above the threshold
  Mini,   // 1-3 small-text regions, every cell at or below the threshold
  Mixed,  // exactly one large and one small region per scene
};

const char* to_string(SizeProfile p) noexcept;
SizeProfile size_profile_from_string(const std::string& s);

struct DatasetConfig {
  int n = 16;
  SizeProfile profile = SizeProfile::Mixed;
  std::uint64_t seed = 0;
  Size canvas{128, 128};
  // Share of scenes rendered black-on-black.
  double adversarial_fraction = 0.0;
  std::vector<BackgroundStyle> styles{BackgroundStyle::Flat, BackgroundStyle::Gradient,
                                      BackgroundStyle::Noise};
};

// Deterministic spec of scene `index`; depends only on (seed, index).
SceneSpec scene_spec(const DatasetConfig& cfg, int index);

std::vector<RenderedScene> render_dataset(const DatasetConfig& cfg);

// Writes images/<stem>.png, masks/<stem>.png and manifest.jsonl under
// `out_dir` and returns the manifest.
DatasetManifest make_dataset(const DatasetConfig& cfg, const std::filesystem::path& out_dir);

std::string scene_stem(int index);

}  // namespace glyphflow::app
