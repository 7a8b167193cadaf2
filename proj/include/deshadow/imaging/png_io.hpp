// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "deshadow/imaging/image.hpp"

namespace deshadow::imaging {

/// 8-bit PNG; grayscale and alpha inputs are converted to RGB. Values map v/255.
Image read_png(const std::filesystem::path& path);
/// Single-channel view of a PNG (luminance of colour files), values v/255, not binarized.
ShadowMask read_png_gray(const std::filesystem::path& path);
/// Dataset mask: read_png_gray binarized at 0.5.
ShadowMask read_mask_png(const std::filesystem::path& path);

/// Values are rounded to the nearest of 256 levels.
void write_png(const std::filesystem::path& path, const Image& img);
void write_png(const std::filesystem::path& path, const ShadowMask& mask);

}  // namespace deshadow::imaging
