#include "glyphflow/app/segmenter.hpp"

#include <random>

namespace glyphflow::app {

Mask GroundTruthSegmenter::segment(const SegmentationInput& in) const {
  if (!in.ground_truth) throw ParameterError("ground-truth segmenter needs a reference mask");
  if (in.ground_truth->size() != in.image.size()) {
    throw ShapeError("reference mask does not match the image");
  }
  return *in.ground_truth;
}

SmallGlyphDropoutSegmenter::SmallGlyphDropoutSegmenter(double rate, double threshold)
    : rate_(rate), threshold_(threshold) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ParameterError("dropout rate must be in [0,1]");
}

Mask SmallGlyphDropoutSegmenter::segment(const SegmentationInput& in) const {
  Mask out = GroundTruthSegmenter{}.segment(in);
  std::mt19937_64 rng(in.seed);
  std::bernoulli_distribution drop(rate_);
  for (const GlyphRegion& r : in.regions) {
    if (condition::avg_char_area(r) > threshold_) continue;
    for (int y = r.box.y0; y < r.box.y1; ++y) {
      for (int x = r.box.x0; x < r.box.x1; ++x) {
        if (out.at(x, y) != 0.0 && drop(rng)) out.at(x, y) = 0.0;
      }
    }
  }
  return out;
}

}  // namespace glyphflow::app
