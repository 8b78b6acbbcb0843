#pragma once

#include <filesystem>

#include "glyphflow/imaging/image.hpp"

namespace glyphflow::imaging {

// 8-bit grayscale or RGB. Values are divided by 255 on load; palette and
// 16-bit inputs are converted, alpha is dropped.
ImageBuffer load_png(const std::filesystem::path& path);
Mask load_mask_png(const std::filesystem::path& path);

// Values are clamped to [0,1] and rounded to the nearest 8-bit level.
void save_png(const ImageBuffer& img, const std::filesystem::path& path);
void save_mask_png(const Mask& mask, const std::filesystem::path& path);

}  // namespace glyphflow::imaging
