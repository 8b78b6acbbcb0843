#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "glyphflow/imaging/image.hpp"
#include "glyphflow/imaging/ops.hpp"

namespace glyphflow::condition {

using imaging::BoundingBox;
using imaging::ImageBuffer;
using imaging::Mask;

// One annotated text region. char_count comes from the annotation and must
// match the number of code points in `text`.
struct GlyphRegion {
  BoundingBox box;
  std::string text;
  int char_count = 0;

  long long area() const noexcept { return box.area(); }

  // Throws AnnotationError if the region is not self-consistent.
  void validate() const;

  friend bool operator==(const GlyphRegion&, const GlyphRegion&) = default;
};

// Box area per character. Throws AnnotationError when char_count < 1.
double avg_char_area(const GlyphRegion& region);

struct AgcConfig {
  double threshold = 4900.0;  // pixels^2 per character
  double blur_sigma = 2.0;
  int band_width = 3;
  imaging::CannyParams canny{};
  // Soft segmentations are binarized at this level before use.
  double seg_threshold = 0.5;

  void validate() const;
};

enum class Branch { Large, Small };

const char* to_string(Branch b) noexcept;

// Large iff avg_char_area > threshold.
Branch classify(const GlyphRegion& region, const AgcConfig& cfg);

// How region conditions are built. Adaptive is the full method; the other
// two modes exist for ablations.
enum class ConditionMode {
  Adaptive,         // edge-enhanced masked glyphs / boundary-blurred crops
  RawSegmentation,  // seg ⊙ image for every region
  NoBlur,           // adaptive switch, small crops copied without blur
};

const char* to_string(ConditionMode m) noexcept;
ConditionMode condition_mode_from_string(const std::string& s);

// Condition for one region on the full canvas; zero outside the region box.
ImageBuffer build_region_condition(const ImageBuffer& img, const Mask& seg,
                                   const GlyphRegion& region, const AgcConfig& cfg,
                                   ConditionMode mode = ConditionMode::Adaptive);

struct RegionBranch {
  std::size_t region = 0;
  Branch branch = Branch::Small;
  double avg_char_area = 0.0;
};

struct ConditionMap {
  ImageBuffer image;
  std::vector<RegionBranch> per_region_branch;
  std::vector<std::string> warnings;
};

// Pixel-wise maximum of the parts. Overlapping supports are resolved by the
// max and reported in `warnings`.
ConditionMap compose_condition(std::span<const ImageBuffer> parts);

// Builds every region condition and composes them.
ConditionMap build_condition(const ImageBuffer& img, const Mask& seg,
                             std::span<const GlyphRegion> regions,
                             const AgcConfig& cfg,
                             ConditionMode mode = ConditionMode::Adaptive);

// Per region: the binarized segmentation inside the box for Large regions,
// the filled box for Small ones. Zero elsewhere.
Mask build_gr_mask(const Mask& seg, std::span<const GlyphRegion> regions,
                   const AgcConfig& cfg);

}  // namespace glyphflow::condition
