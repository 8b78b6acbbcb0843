#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "glyphflow/app/atlas.hpp"
#include "glyphflow/condition/agc.hpp"
#include "glyphflow/imaging/image.hpp"

namespace glyphflow::app {

using condition::GlyphRegion;
using imaging::BoundingBox;
using imaging::ImageBuffer;
using imaging::Mask;
using imaging::Size;

using Rgb = std::array<double, 3>;

enum class BackgroundStyle {
  Flat,
  Gradient,  // vertical blend from `background` to `background_end`
  Noise,     // flat plus seeded Gaussian noise on non-ink pixels
  BlackOnBlack,
};

const char* to_string(BackgroundStyle s) noexcept;
BackgroundStyle background_style_from_string(const std::string& s);

struct PlacedString {
  std::string text;
  int x = 0;
  int y = 0;
  int scale = 1;
  Rgb color{0.0, 0.0, 0.0};
};

struct SceneSpec {
  Size canvas{128, 128};
  BackgroundStyle style = BackgroundStyle::Flat;
  Rgb background{1.0, 1.0, 1.0};
  Rgb background_end{1.0, 1.0, 1.0};
  double noise_sigma = 0.03;
  std::vector<PlacedString> strings;
  std::uint64_t seed = 0;
};

// Box occupied by `text` drawn at (x, y) with the given scale: one
// 7s x 9s cell per character.
BoundingBox text_box(const std::string& text, int x, int y, int scale);

struct RenderedScene {
  ImageBuffer image;
  Mask seg;  // 1 exactly on glyph-ink pixels
  std::vector<GlyphRegion> regions;
};

// Throws PlacementError when a string leaves the canvas or overlaps another,
// and ParameterError for characters missing from the atlas.
RenderedScene render_scene(const SceneSpec& spec,
                           const GlyphAtlas& atlas = GlyphAtlas::builtin());

}  // namespace glyphflow::app
