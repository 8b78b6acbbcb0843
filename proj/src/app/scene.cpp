#include "glyphflow/app/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "glyphflow/text.hpp"

namespace glyphflow::app {

const char* to_string(BackgroundStyle s) noexcept {
  switch (s) {
    case BackgroundStyle::Flat:
      return "flat";
    case BackgroundStyle::Gradient:
      return "gradient";
    case BackgroundStyle::Noise:
      return "noise";
    case BackgroundStyle::BlackOnBlack:
      return "black-on-black";
  }
  return "?";
}

BackgroundStyle background_style_from_string(const std::string& s) {
  if (s == "flat") return BackgroundStyle::Flat;
  if (s == "gradient") return BackgroundStyle::Gradient;
  if (s == "noise") return BackgroundStyle::Noise;
  if (s == "black-on-black") return BackgroundStyle::BlackOnBlack;
  throw ParameterError("unknown background style: " + s);
}

BoundingBox text_box(const std::string& text, int x, int y, int scale) {
  const auto n = static_cast<int>(text::code_point_count(text));
  return {x, y, x + n * GlyphAtlas::kCellWidth * scale,
          y + GlyphAtlas::kCellHeight * scale};
}

RenderedScene render_scene(const SceneSpec& spec, const GlyphAtlas& atlas) {
  const int w = spec.canvas.width;
  const int h = spec.canvas.height;
  if (w < 1 || h < 1) throw ParameterError("scene canvas must be non-empty");

  RenderedScene out{ImageBuffer(w, h, 3), Mask(w, h), {}};
  for (const PlacedString& s : spec.strings) {
    if (s.scale < 1) throw ParameterError("glyph scale must be at least 1");
    if (s.text.empty()) throw ParameterError("placed strings must be non-empty");
    const BoundingBox box = text_box(s.text, s.x, s.y, s.scale);
    if (!box.within(spec.canvas)) {
      throw PlacementError("string \"" + s.text + "\" does not fit on the canvas");
    }
    for (const GlyphRegion& r : out.regions) {
      if (imaging::intersection_area(r.box, box) > 0) {
        throw PlacementError("string \"" + s.text + "\" overlaps \"" + r.text + "\"");
      }
    }
    out.regions.push_back(
        {box, s.text, static_cast<int>(text::code_point_count(s.text))});
  }

  const bool black = spec.style == BackgroundStyle::BlackOnBlack;
  for (int y = 0; y < h; ++y) {
    const double f = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        double v = spec.background[ci];
        if (spec.style == BackgroundStyle::Gradient) {
          v = (1.0 - f) * spec.background[ci] + f * spec.background_end[ci];
        }
        out.image.at(x, y, c) = black ? 0.0 : v;
      }
    }
  }

  for (std::size_t k = 0; k < spec.strings.size(); ++k) {
    const PlacedString& s = spec.strings[k];
    const std::u32string cps = text::decode_utf8(s.text);
    for (std::size_t i = 0; i < cps.size(); ++i) {
      const GlyphAtlas::Glyph* g = atlas.find(cps[i]);
      if (!g) throw ParameterError("no glyph for a character of \"" + s.text + "\"");
      const int cx = s.x + static_cast<int>(i) * GlyphAtlas::kCellWidth * s.scale +
                     GlyphAtlas::kInkOffset * s.scale;
      const int cy = s.y + GlyphAtlas::kInkOffset * s.scale;
      for (int gy = 0; gy < GlyphAtlas::kInkHeight; ++gy) {
        for (int gx = 0; gx < GlyphAtlas::kInkWidth; ++gx) {
          if (!g->at(gx, gy)) continue;
          for (int py = 0; py < s.scale; ++py) {
            for (int px = 0; px < s.scale; ++px) {
              const int x = cx + gx * s.scale + px;
              const int y = cy + gy * s.scale + py;
              out.seg.at(x, y) = 1.0;
              for (int c = 0; c < 3; ++c) {
                out.image.at(x, y, c) = black ? 0.0 : s.color[static_cast<std::size_t>(c)];
              }
            }
          }
        }
      }
    }
  }

  if (spec.style == BackgroundStyle::Noise) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < 3; ++c) {
          const double n = noise(rng);
          if (out.seg.at(x, y) != 0.0) continue;
          out.image.at(x, y, c) = std::clamp(out.image.at(x, y, c) + n, 0.0, 1.0);
        }
      }
    }
  }
  // Render on the 8-bit lattice so PNG round trips are lossless.
  for (double& v : out.image.data()) v = std::round(v * 255.0) / 255.0;
  return out;
}

}  // namespace glyphflow::app
