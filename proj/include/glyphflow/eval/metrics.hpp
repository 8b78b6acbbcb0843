#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "glyphflow/app/atlas.hpp"
#include "glyphflow/app/manifest.hpp"
#include "glyphflow/condition/agc.hpp"

namespace glyphflow::eval {

using condition::GlyphRegion;
using imaging::ImageBuffer;

// Levenshtein distance over code points.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

// 1 - edit_distance / max(|a|, |b|) over code points; 1 for two empty
// strings.
double ned(std::string_view a, std::string_view b);

// Exact-match rate after trimming surrounding whitespace. Empty input is a
// parameter error.
double sentence_acc(std::span<const std::pair<std::string, std::string>> pairs);

struct RecognizerResult {
  std::vector<std::string> texts;
  std::vector<double> confidence;
};

// Recognizes the text of each annotated region.
class Recognizer {
 public:
  virtual ~Recognizer() = default;
  virtual RecognizerResult recognize(const ImageBuffer& image,
                                     std::span<const GlyphRegion> regions) const = 0;
};

// Matches each 7s x 9s cell of a region against the atlas after measuring
// per-unit contrast to the cell's background margin. Blank cells are
// skipped; regions below one cell in height are unrecognizable.
class TemplateRecognizer final : public Recognizer {
 public:
  explicit TemplateRecognizer(const app::GlyphAtlas& atlas = app::GlyphAtlas::builtin());
  RecognizerResult recognize(const ImageBuffer& image,
                             std::span<const GlyphRegion> regions) const override;

 private:
  const app::GlyphAtlas& atlas_;
};

RecognizerResult toy_recognize(const ImageBuffer& image, std::span<const GlyphRegion> regions,
                               const app::GlyphAtlas& atlas = app::GlyphAtlas::builtin());

struct RegionScore {
  std::string image;
  std::size_t region = 0;
  std::string reference;
  std::string hypothesis;
  double ned = 0.0;
  double confidence = 0.0;
};

struct MetricsReport {
  double sen_acc = 0.0;
  double ned = 0.0;
  std::size_t images = 0;
  std::size_t regions = 0;
  std::size_t exact = 0;
  std::vector<RegionScore> rows;
};

// Aggregates over (reference, hypothesis) rows. The NED mean is summed in
// sorted order so it does not depend on row order.
MetricsReport aggregate(std::vector<RegionScore> rows, std::size_t images);

// Runs the recognizer on every manifest image. When `image_dir` is given,
// images are read from <image_dir>/<file name> instead of the manifest path.
// Missing files raise IoError listing all of them. When `report_path` is
// given a JSON report is written there.
MetricsReport run_benchmark(const app::DatasetManifest& manifest, const Recognizer& recognizer,
                            const std::optional<std::filesystem::path>& image_dir = {},
                            const std::optional<std::filesystem::path>& report_path = {});

void write_report(const MetricsReport& report, const std::filesystem::path& path);

}  // namespace glyphflow::eval
