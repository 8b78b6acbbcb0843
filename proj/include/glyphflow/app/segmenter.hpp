#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "glyphflow/condition/agc.hpp"

namespace glyphflow::app {

using condition::GlyphRegion;
using imaging::ImageBuffer;
using imaging::Mask;

struct SegmentationInput {
  const ImageBuffer& image;
  // Rendered ink mask, when the caller has one.
  const Mask* ground_truth = nullptr;
  std::span<const GlyphRegion> regions;
  std::uint64_t seed = 0;
};

// Produces the segmentation mask consumed by the conditioning stage. A
// learned text segmenter plugs in here.
class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual Mask segment(const SegmentationInput& in) const = 0;
  virtual std::string name() const = 0;
};

// Returns the rendered mask verbatim.
class GroundTruthSegmenter final : public Segmenter {
 public:
  Mask segment(const SegmentationInput& in) const override;
  std::string name() const override { return "ground-truth"; }
};

// Ground truth with ink pixels of small-glyph regions (per-character area at
// or below `threshold`) dropped at `rate`, imitating segmenters that lose
// detail on compact characters.
class SmallGlyphDropoutSegmenter final : public Segmenter {
 public:
  SmallGlyphDropoutSegmenter(double rate, double threshold = 4900.0);
  Mask segment(const SegmentationInput& in) const override;
  std::string name() const override { return "small-glyph-dropout"; }

 private:
  double rate_;
  double threshold_;
};

}  // namespace glyphflow::app
