#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glyphflow/imaging/image.hpp"

namespace glyphflow::layout {

using imaging::BoundingBox;
using imaging::Size;

// Closed sets of <font_xxx> and <color_xxx> tokens, in declaration order.
class TokenVocab {
 public:
  TokenVocab() = default;
  TokenVocab(std::vector<std::string> fonts, std::vector<std::string> colors);

  // One token per line; blank lines and lines starting with '#' are skipped.
  static TokenVocab parse(std::string_view text);
  static TokenVocab load(const std::filesystem::path& path);

  const std::vector<std::string>& fonts() const noexcept { return fonts_; }
  const std::vector<std::string>& colors() const noexcept { return colors_; }
  bool has_font(std::string_view token) const;
  bool has_color(std::string_view token) const;

  static bool is_font_token(std::string_view token);
  static bool is_color_token(std::string_view token);

 private:
  std::vector<std::string> fonts_;
  std::vector<std::string> colors_;
};

struct LayoutEntry {
  std::string text;
  BoundingBox box;
  std::string font;
  std::string color;

  friend bool operator==(const LayoutEntry&, const LayoutEntry&) = default;
};

struct LayoutSpec {
  std::string rewritten_prompt;
  std::vector<LayoutEntry> entries;
  Size canvas;

  friend bool operator==(const LayoutSpec&, const LayoutSpec&) = default;
};

// A layout together with the user prompt it was derived from (may be empty).
struct LayoutRecord {
  std::string prompt;
  LayoutSpec layout;

  friend bool operator==(const LayoutRecord&, const LayoutRecord&) = default;
};

// Record grammar, one object per line:
//   {"canvas":[W,H],"rewritten_prompt":"...","texts":[...],
//    "bboxes":[[x0,y0,x1,y1],...],"fonts":[...],"colors":[...]}
// plus an optional "prompt". texts/bboxes/fonts/colors are parallel arrays.
//
// Throws ParseError (malformed syntax, missing keys, unequal lengths),
// VocabularyError (token outside the vocabulary) or ConstraintError (empty
// text, or a text that still appears in the rewritten prompt). `line` is
// reported in errors.
LayoutRecord parse_record(std::string_view raw, const TokenVocab& vocab, int line = 1);
LayoutSpec parse_layout(std::string_view raw, const TokenVocab& vocab, int line = 1);

// Canonical single-line form; keys sorted, no trailing newline.
std::string serialize_record(const LayoutRecord& record);
std::string serialize_layout(const LayoutSpec& spec);

std::vector<LayoutRecord> parse_corpus(std::string_view text, const TokenVocab& vocab);
std::vector<LayoutRecord> load_corpus(const std::filesystem::path& path,
                                      const TokenVocab& vocab);
void save_corpus(const std::vector<LayoutRecord>& records,
                 const std::filesystem::path& path);

struct Overlap {
  std::size_t first = 0;
  std::size_t second = 0;
  long long area = 0;
};

struct ValidationReport {
  std::vector<Overlap> overlaps;
  std::vector<std::size_t> out_of_bounds;
  // Pearson correlation of box area against character count; absent with
  // fewer than two entries or zero variance.
  std::optional<double> proportionality;
  bool proportionality_flagged = false;

  std::size_t violations() const noexcept { return overlaps.size() + out_of_bounds.size(); }
};

ValidationReport validate_layout(const LayoutSpec& spec);

struct CorpusConfig {
  Size canvas{512, 512};
  int min_entries = 2;
  int max_entries = 5;
  int max_text_length = 8;
  // Relative spread of box heights around the record's line height.
  double jitter = 0.1;
  int max_attempts = 200;
};

// Records with non-overlapping boxes whose areas scale with character
// count. Throws PlacementError when entries cannot be placed.
std::vector<LayoutRecord> gen_corpus(const TokenVocab& vocab, int n, std::uint64_t seed,
                                     const CorpusConfig& cfg = {});

}  // namespace glyphflow::layout
