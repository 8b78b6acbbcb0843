#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace glyphflow::app {

// Built-in bitmap alphabet: A-Z, 0-9 and 20 dense pseudo-ideographs that
// stand in for high stroke-density CJK characters. Each glyph is a 5x7 ink
// pattern drawn at offset (1,1) inside a 7x9 cell; a scale factor s turns
// every unit into an s x s pixel block.
class GlyphAtlas {
 public:
  static constexpr int kInkWidth = 5;
  static constexpr int kInkHeight = 7;
  static constexpr int kCellWidth = 7;
  static constexpr int kCellHeight = 9;
  static constexpr int kInkOffset = 1;

  struct Glyph {
    char32_t code_point = 0;
    std::array<bool, kInkWidth * kInkHeight> ink{};

    bool at(int x, int y) const { return ink[static_cast<std::size_t>(y * kInkWidth + x)]; }
    int ink_count() const;
  };

  static const GlyphAtlas& builtin();

  // nullptr when the code point has no glyph.
  const Glyph* find(char32_t cp) const;
  std::span<const Glyph> glyphs() const noexcept { return glyphs_; }

  // UTF-8 strings of one character each.
  const std::vector<std::string>& latin() const noexcept { return latin_; }
  const std::vector<std::string>& ideographs() const noexcept { return ideographs_; }

 private:
  GlyphAtlas();

  std::vector<Glyph> glyphs_;
  std::vector<std::string> latin_;
  std::vector<std::string> ideographs_;
};

// Normalized cross-correlation of two equally sized patterns; 0 when either
// has zero variance.
double normalized_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace glyphflow::app
