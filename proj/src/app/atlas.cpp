#include "glyphflow/app/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "glyphflow/text.hpp"

namespace glyphflow::app {

namespace {

struct LatinRows {
  char ch;
  const char* rows[GlyphAtlas::kInkHeight];
};

// clang-format off
constexpr LatinRows kLatin[] = {
  {'A', {" ### ", "#   #", "#   #", "#####", "#   #", "#   #", "#   #"}},
  {'B', {"#### ", "#   #", "#   #", "#### ", "#   #", "#   #", "#### "}},
  {'C', {" ### ", "#   #", "#    ", "#    ", "#    ", "#   #", " ### "}},
  {'D', {"#### ", "#   #", "#   #", "#   #", "#   #", "#   #", "#### "}},
  {'E', {"#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#####"}},
  {'F', {"#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#    "}},
  {'G', {" ### ", "#   #", "#    ", "# ###", "#   #", "#   #", " ####"}},
  {'H', {"#   #", "#   #", "#   #", "#####", "#   #", "#   #", "#   #"}},
  {'I', {" ### ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "}},
  {'J', {"  ###", "   # ", "   # ", "   # ", "   # ", "#  # ", " ##  "}},
  {'K', {"#   #", "#  # ", "# #  ", "##   ", "# #  ", "#  # ", "#   #"}},
  {'L', {"#    ", "#    ", "#    ", "#    ", "#    ", "#    ", "#####"}},
  {'M', {"#   #", "## ##", "# # #", "# # #", "#   #", "#   #", "#   #"}},
  {'N', {"#   #", "#   #", "##  #", "# # #", "#  ##", "#   #", "#   #"}},
  {'O', {" ### ", "#   #", "#   #", "#   #", "#   #", "#   #", " ### "}},
  {'P', {"#### ", "#   #", "#   #", "#### ", "#    ", "#    ", "#    "}},
  {'Q', {" ### ", "#   #", "#   #", "#   #", "# # #", "#  # ", " ## #"}},
  {'R', {"#### ", "#   #", "#   #", "#### ", "# #  ", "#  # ", "#   #"}},
  {'S', {" ####", "#    ", "#    ", " ### ", "    #", "    #", "#### "}},
  {'T', {"#####", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  "}},
  {'U', {"#   #", "#   #", "#   #", "#   #", "#   #", "#   #", " ### "}},
  {'V', {"#   #", "#   #", "#   #", "#   #", "#   #", " # # ", "  #  "}},
  {'W', {"#   #", "#   #", "#   #", "# # #", "# # #", "# # #", " # # "}},
  {'X', {"#   #", "#   #", " # # ", "  #  ", " # # ", "#   #", "#   #"}},
  {'Y', {"#   #", "#   #", " # # ", "  #  ", "  #  ", "  #  ", "  #  "}},
  {'Z', {"#####", "    #", "   # ", "  #  ", " #   ", "#    ", "#####"}},
  {'0', {" ### ", "#   #", "#  ##", "# # #", "##  #", "#   #", " ### "}},
  {'1', {"  #  ", " ##  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "}},
  {'2', {" ### ", "#   #", "    #", "   # ", "  #  ", " #   ", "#####"}},
  {'3', {"#####", "   # ", "  #  ", "   # ", "    #", "#   #", " ### "}},
  {'4', {"   # ", "  ## ", " # # ", "#  # ", "#####", "   # ", "   # "}},
  {'5', {"#####", "#    ", "#### ", "    #", "    #", "#   #", " ### "}},
  {'6', {"  ## ", " #   ", "#    ", "#### ", "#   #", "#   #", " ### "}},
  {'7', {"#####", "    #", "   # ", "  #  ", " #   ", " #   ", " #   "}},
  {'8', {" ### ", "#   #", "#   #", " ### ", "#   #", "#   #", " ### "}},
  {'9', {" ### ", "#   #", "#   #", " ####", "    #", "   # ", " ##  "}},
};
// clang-format on

constexpr const char* kIdeographs[] = {"永", "東", "國", "風", "書", "龍", "電",
                                       "學", "語", "體", "馬", "鳥", "魚", "雲",
                                       "雪", "門", "開", "關", "麗", "鬱"};

std::vector<double> as_pattern(const GlyphAtlas::Glyph& g) {
  return {g.ink.begin(), g.ink.end()};
}

// Dense patterns drawn from a fixed stream, rejecting candidates that
// correlate too strongly with any glyph already in the atlas.
GlyphAtlas::Glyph make_ideograph(char32_t cp, std::mt19937_64& rng,
                                 const std::vector<GlyphAtlas::Glyph>& existing) {
  std::bernoulli_distribution ink(0.68);
  for (;;) {
    GlyphAtlas::Glyph g{cp, {}};
    // A closed frame on the top row keeps every pattern visibly "boxy".
    for (int x = 0; x < GlyphAtlas::kInkWidth; ++x) g.ink[static_cast<std::size_t>(x)] = true;
    for (std::size_t i = GlyphAtlas::kInkWidth; i < g.ink.size(); ++i) g.ink[i] = ink(rng);
    if (g.ink_count() < 22) continue;
    const std::vector<double> p = as_pattern(g);
    const bool distinct = std::all_of(existing.begin(), existing.end(), [&](const auto& e) {
      return std::abs(normalized_correlation(p, as_pattern(e))) < 0.6;
    });
    if (distinct) return g;
  }
}

}  // namespace

int GlyphAtlas::Glyph::ink_count() const {
  return static_cast<int>(std::count(ink.begin(), ink.end(), true));
}

GlyphAtlas::GlyphAtlas() {
  for (const LatinRows& l : kLatin) {
    Glyph g{static_cast<char32_t>(l.ch), {}};
    for (int y = 0; y < kInkHeight; ++y) {
      for (int x = 0; x < kInkWidth; ++x) {
        g.ink[static_cast<std::size_t>(y * kInkWidth + x)] = l.rows[y][x] == '#';
      }
    }
    glyphs_.push_back(g);
    latin_.emplace_back(1, l.ch);
  }
  std::mt19937_64 rng(0x1DE0);
  for (const char* s : kIdeographs) {
    const std::u32string cps = text::decode_utf8(s);
    glyphs_.push_back(make_ideograph(cps.front(), rng, glyphs_));
    ideographs_.emplace_back(s);
  }
}

const GlyphAtlas& GlyphAtlas::builtin() {
  static const GlyphAtlas atlas;
  return atlas;
}

const GlyphAtlas::Glyph* GlyphAtlas::find(char32_t cp) const {
  const auto it = std::find_if(glyphs_.begin(), glyphs_.end(),
                               [cp](const Glyph& g) { return g.code_point == cp; });
  return it == glyphs_.end() ? nullptr : &*it;
}

double normalized_correlation(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  if (n == 0) return 0.0;
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 1e-18 || sbb <= 1e-18) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace glyphflow::app
