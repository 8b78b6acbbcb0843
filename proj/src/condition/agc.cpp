#include "glyphflow/condition/agc.hpp"

#include <algorithm>
#include <optional>

#include "glyphflow/text.hpp"

namespace glyphflow::condition {

using imaging::Size;

void GlyphRegion::validate() const {
  if (char_count < 1) {
    throw AnnotationError("region \"" + text + "\" has char_count " +
                          std::to_string(char_count));
  }
  if (!box.nonempty()) throw AnnotationError("region \"" + text + "\" has an empty box");
  if (text::code_point_count(text) != static_cast<std::size_t>(char_count)) {
    throw AnnotationError("region \"" + text + "\": char_count " +
                          std::to_string(char_count) +
                          " does not match the text length");
  }
}

double avg_char_area(const GlyphRegion& region) {
  if (region.char_count < 1) {
    throw AnnotationError("char_count must be at least 1 to compute the per-character area");
  }
  return static_cast<double>(region.area()) / static_cast<double>(region.char_count);
}

void AgcConfig::validate() const {
  if (!(threshold > 0.0)) throw ParameterError("AGC threshold must be positive");
  if (!(blur_sigma > 0.0)) throw ParameterError("AGC blur sigma must be positive");
  if (band_width < 1) throw ParameterError("AGC band width must be at least 1");
  if (!(canny.lo >= 0.0 && canny.lo < canny.hi && canny.hi <= 1.0)) {
    throw ParameterError("canny thresholds require 0 <= lo < hi <= 1");
  }
}

const char* to_string(Branch b) noexcept { return b == Branch::Large ? "large" : "small"; }

Branch classify(const GlyphRegion& region, const AgcConfig& cfg) {
  return avg_char_area(region) > cfg.threshold ? Branch::Large : Branch::Small;
}

const char* to_string(ConditionMode m) noexcept {
  switch (m) {
    case ConditionMode::Adaptive:
      return "adaptive";
    case ConditionMode::RawSegmentation:
      return "raw-seg";
    case ConditionMode::NoBlur:
      return "no-blur";
  }
  return "?";
}

ConditionMode condition_mode_from_string(const std::string& s) {
  if (s == "adaptive") return ConditionMode::Adaptive;
  if (s == "raw-seg") return ConditionMode::RawSegmentation;
  if (s == "no-blur") return ConditionMode::NoBlur;
  throw ParameterError("unknown condition mode: " + s);
}

namespace {

void restrict_to_box(ImageBuffer& img, const BoundingBox& box) {
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (box.contains(x, y)) continue;
      for (int c = 0; c < img.channels(); ++c) img.at(x, y, c) = 0.0;
    }
  }
}

ImageBuffer large_branch(const ImageBuffer& img, const Mask& seg_bin,
                         const Mask& edges, const BoundingBox& box) {
  ImageBuffer out = imaging::add_clamped(imaging::mask_to_image(edges, img.channels()),
                                         imaging::mask_apply(seg_bin, img));
  restrict_to_box(out, box);
  return out;
}

ImageBuffer small_branch(const ImageBuffer& img, const BoundingBox& box,
                         const AgcConfig& cfg, bool blur) {
  const Mask pos = imaging::box_mask(box, img.size());
  ImageBuffer out = imaging::mask_apply(pos, img);
  // Boxes too thin for the configured band get the widest band they admit.
  const int widest = (std::min(box.width(), box.height()) - 1) / 2;
  const int band_width = std::min(cfg.band_width, widest);
  if (!blur || band_width < 1) return out;

  const ImageBuffer blurred = imaging::gaussian_blur(out, cfg.blur_sigma);
  const Mask band = imaging::boundary_band(box, band_width, img.size());
  for (int y = box.y0; y < box.y1; ++y) {
    for (int x = box.x0; x < box.x1; ++x) {
      if (band.at(x, y) == 0.0) continue;
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = blurred.at(x, y, c);
    }
  }
  return out;
}

void check_inputs(const ImageBuffer& img, const Mask& seg) {
  if (img.size() != seg.size()) {
    throw ShapeError("segmentation mask does not match the image dimensions");
  }
}

void check_box(const GlyphRegion& region, Size canvas) {
  if (!region.box.within(canvas)) {
    throw ShapeError("region \"" + region.text + "\" lies outside the canvas");
  }
}

ImageBuffer region_condition(const ImageBuffer& img, const Mask& seg_bin,
                             const GlyphRegion& region, const AgcConfig& cfg,
                             ConditionMode mode, std::optional<Mask>& edges_cache) {
  check_box(region, img.size());
  if (mode == ConditionMode::RawSegmentation) {
    ImageBuffer out = imaging::mask_apply(seg_bin, img);
    restrict_to_box(out, region.box);
    return out;
  }
  if (classify(region, cfg) == Branch::Large) {
    if (!edges_cache) edges_cache = imaging::canny(seg_bin, cfg.canny);
    return large_branch(img, seg_bin, *edges_cache, region.box);
  }
  return small_branch(img, region.box, cfg, mode == ConditionMode::Adaptive);
}

}  // namespace

ImageBuffer build_region_condition(const ImageBuffer& img, const Mask& seg,
                                   const GlyphRegion& region, const AgcConfig& cfg,
                                   ConditionMode mode) {
  cfg.validate();
  check_inputs(img, seg);
  std::optional<Mask> edges;
  return region_condition(img, seg.binarized(cfg.seg_threshold), region, cfg, mode, edges);
}

ConditionMap compose_condition(std::span<const ImageBuffer> parts) {
  ConditionMap out;
  if (parts.empty()) return out;
  out.image = parts.front();
  std::size_t overlapping = 0;
  for (std::size_t k = 1; k < parts.size(); ++k) {
    const ImageBuffer& part = parts[k];
    if (part.size() != out.image.size() || part.channels() != out.image.channels()) {
      throw ShapeError("condition parts do not share canvas dimensions");
    }
    auto dst = out.image.data();
    auto src = part.data();
    const auto ch = static_cast<std::size_t>(part.channels());
    for (std::size_t p = 0; p < part.pixel_count(); ++p) {
      bool dst_on = false;
      bool src_on = false;
      for (std::size_t c = 0; c < ch; ++c) {
        dst_on = dst_on || dst[p * ch + c] != 0.0;
        src_on = src_on || src[p * ch + c] != 0.0;
      }
      if (dst_on && src_on) ++overlapping;
      for (std::size_t c = 0; c < ch; ++c) {
        dst[p * ch + c] = std::max(dst[p * ch + c], src[p * ch + c]);
      }
    }
  }
  if (overlapping > 0) {
    out.warnings.push_back("region conditions overlap on " + std::to_string(overlapping) +
                           " pixels; resolved by pixel-wise max");
  }
  return out;
}

ConditionMap build_condition(const ImageBuffer& img, const Mask& seg,
                             std::span<const GlyphRegion> regions,
                             const AgcConfig& cfg, ConditionMode mode) {
  cfg.validate();
  check_inputs(img, seg);
  const Mask seg_bin = seg.binarized(cfg.seg_threshold);
  std::optional<Mask> edges;
  std::vector<ImageBuffer> parts;
  std::vector<RegionBranch> branches;
  parts.reserve(regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i) {
    parts.push_back(region_condition(img, seg_bin, regions[i], cfg, mode, edges));
    branches.push_back({i, classify(regions[i], cfg), avg_char_area(regions[i])});
  }
  ConditionMap out = parts.empty()
                         ? ConditionMap{ImageBuffer(img.width(), img.height(), img.channels()),
                                        {}, {}}
                         : compose_condition(parts);
  out.per_region_branch = std::move(branches);
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t j = i + 1; j < regions.size(); ++j) {
      if (imaging::intersection_area(regions[i].box, regions[j].box) > 0) {
        out.warnings.push_back("boxes of regions " + std::to_string(i) + " and " +
                               std::to_string(j) + " overlap");
      }
    }
  }
  return out;
}

Mask build_gr_mask(const Mask& seg, std::span<const GlyphRegion> regions,
                   const AgcConfig& cfg) {
  cfg.validate();
  const Mask seg_bin = seg.binarized(cfg.seg_threshold);
  Mask out(seg.width(), seg.height());
  for (const GlyphRegion& region : regions) {
    check_box(region, seg.size());
    const bool large = classify(region, cfg) == Branch::Large;
    for (int y = region.box.y0; y < region.box.y1; ++y) {
      for (int x = region.box.x0; x < region.box.x1; ++x) {
        const double v = large ? seg_bin.at(x, y) : 1.0;
        out.at(x, y) = std::max(out.at(x, y), v);
      }
    }
  }
  return out;
}

}  // namespace glyphflow::condition
