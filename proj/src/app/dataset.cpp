#include "glyphflow/app/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "glyphflow/imaging/png_io.hpp"
#include "glyphflow/rng.hpp"

namespace glyphflow::app {

const char* to_string(SizeProfile p) noexcept {
  switch (p) {
    case SizeProfile::Large:
      return "large";
    case SizeProfile::Mini:
      return "mini";
    case SizeProfile::Mixed:
      return "mixed";
  }
  return "?";
}

SizeProfile size_profile_from_string(const std::string& s) {
  if (s == "large") return SizeProfile::Large;
  if (s == "mini") return SizeProfile::Mini;
  if (s == "mixed") return SizeProfile::Mixed;
  throw ParameterError("unknown size profile: " + s);
}

std::string scene_stem(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene_%04d", index);
  return buf;
}

namespace {

// Smallest scale whose 7s x 9s cell exceeds 4900 px^2, and the largest
// scale used for small text.
constexpr int kLargeScale = 9;
constexpr int kMaxMiniScale = 3;
constexpr int kPlacementTries = 200;
constexpr int kSceneRestarts = 50;

double quantize(double v) { return std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0; }

Rgb random_color(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {quantize(u(rng)), quantize(u(rng)), quantize(u(rng))};
}

double contrast(const Rgb& a, const Rgb& b) {
  return (std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2])) / 3.0;
}

std::string random_text(std::mt19937_64& rng, int length) {
  const GlyphAtlas& atlas = GlyphAtlas::builtin();
  const bool ideo = std::bernoulli_distribution(0.5)(rng);
  const auto& pool = ideo ? atlas.ideographs() : atlas.latin();
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::string s;
  for (int i = 0; i < length; ++i) s += pool[pick(rng)];
  return s;
}

bool place(SceneSpec& spec, std::mt19937_64& rng, int scale, int min_len, int max_len,
           const Rgb& bg) {
  const int cell_w = GlyphAtlas::kCellWidth * scale;
  const int cell_h = GlyphAtlas::kCellHeight * scale;
  const int fit = spec.canvas.width / cell_w;
  if (fit < 1 || cell_h > spec.canvas.height) {
    throw PlacementError("canvas " + std::to_string(spec.canvas.width) + "x" +
                         std::to_string(spec.canvas.height) +
                         " cannot hold a glyph at scale " + std::to_string(scale));
  }
  const int len = std::uniform_int_distribution<int>(std::min(min_len, fit),
                                                     std::min(max_len, fit))(rng);
  const std::string text = random_text(rng, len);
  Rgb color = random_color(rng, 0.0, 1.0);
  while (contrast(color, bg) < 0.4) color = random_color(rng, 0.0, 1.0);
  for (int attempt = 0; attempt < kPlacementTries; ++attempt) {
    const int x = std::uniform_int_distribution<int>(0, spec.canvas.width - len * cell_w)(rng);
    const int y = std::uniform_int_distribution<int>(0, spec.canvas.height - cell_h)(rng);
    const BoundingBox box = text_box(text, x, y, scale);
    const bool clash = std::any_of(spec.strings.begin(), spec.strings.end(), [&](const auto& s) {
      return imaging::intersection_area(text_box(s.text, s.x, s.y, s.scale), box) > 0;
    });
    if (clash) continue;
    spec.strings.push_back({text, x, y, scale, color});
    return true;
  }
  return false;
}

}  // namespace

SceneSpec scene_spec(const DatasetConfig& cfg, int index) {
  if (cfg.styles.empty()) throw ParameterError("dataset needs at least one background style");
  const SeedTree seeds(cfg.seed);
  auto rng = seeds.stream("scene", static_cast<std::uint64_t>(index));
  SceneSpec spec;
  spec.canvas = cfg.canvas;
  spec.seed = seeds.derive("scene/noise", static_cast<std::uint64_t>(index));
  if (std::bernoulli_distribution(cfg.adversarial_fraction)(rng)) {
    spec.style = BackgroundStyle::BlackOnBlack;
  } else {
    spec.style = cfg.styles[std::uniform_int_distribution<std::size_t>(
        0, cfg.styles.size() - 1)(rng)];
  }
  spec.background = random_color(rng, 0.1, 0.9);
  spec.background_end = spec.background;
  if (spec.style == BackgroundStyle::Gradient) {
    std::uniform_real_distribution<double> shift(-0.15, 0.15);
    for (double& v : spec.background_end) v = quantize(v + shift(rng));
  }
  const Rgb bg = spec.style == BackgroundStyle::BlackOnBlack ? Rgb{0.0, 0.0, 0.0}
                                                              : spec.background;
  std::uniform_int_distribution<int> mini_scale(1, kMaxMiniScale);
  for (int restart = 0; restart < kSceneRestarts; ++restart) {
    spec.strings.clear();
    bool ok = true;
    switch (cfg.profile) {
      case SizeProfile::Large:
        ok = place(spec, rng,
                   std::uniform_int_distribution<int>(kLargeScale, kLargeScale + 1)(rng), 1, 2,
                   bg);
        break;
      case SizeProfile::Mini: {
        const int regions = std::uniform_int_distribution<int>(1, 3)(rng);
        for (int r = 0; r < regions && ok; ++r) ok = place(spec, rng, mini_scale(rng), 2, 6, bg);
        break;
      }
      case SizeProfile::Mixed:
        ok = place(spec, rng, kLargeScale, 1, 1, bg) &&
             place(spec, rng, mini_scale(rng), 2, 4, bg);
        break;
    }
    if (ok) return spec;
  }
  throw PlacementError("scene " + std::to_string(index) + " could not be laid out on a " +
                       std::to_string(cfg.canvas.width) + "x" +
                       std::to_string(cfg.canvas.height) + " canvas");
}

std::vector<RenderedScene> render_dataset(const DatasetConfig& cfg) {
  if (cfg.n < 1) throw ParameterError("dataset size must be at least 1");
  std::vector<RenderedScene> out;
  out.reserve(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) out.push_back(render_scene(scene_spec(cfg, i)));
  return out;
}

DatasetManifest make_dataset(const DatasetConfig& cfg, const std::filesystem::path& out_dir) {
  if (cfg.n < 1) throw ParameterError("dataset size must be at least 1");
  namespace fs = std::filesystem;
  std::error_code ec;
  for (const char* sub : {"images", "masks"}) {
    fs::create_directories(out_dir / sub, ec);
    if (ec) throw IoError("cannot create " + (out_dir / sub).string() + ": " + ec.message());
  }
  DatasetManifest manifest;
  manifest.base_dir = out_dir;
  for (int i = 0; i < cfg.n; ++i) {
    const RenderedScene scene = render_scene(scene_spec(cfg, i));
    const std::string stem = scene_stem(i);
    ManifestRecord rec{"images/" + stem + ".png", "masks/" + stem + ".png", scene.regions};
    imaging::save_png(scene.image, manifest.resolve(rec.image));
    imaging::save_mask_png(scene.seg, manifest.resolve(rec.mask));
    manifest.records.push_back(std::move(rec));
  }
  save_manifest(manifest, out_dir / "manifest.jsonl");
  return manifest;
}

}  // namespace glyphflow::app
