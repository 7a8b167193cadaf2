// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

#include "deshadow/imaging/image.hpp"

namespace deshadow::imaging {

/// Bilinear resampling with half-pixel centers (src = (dst + 0.5) * in/out - 0.5,
/// edges clamped). Same-size requests return an exact copy.
Image resize(const Image& img, int height, int width);
/// Nearest-neighbour resampling so binary masks stay binary.
ShadowMask resize(const ShadowMask& mask, int height, int width);

/// |luma(shadow_free) - luma(shadow)| per pixel.
ShadowMask luma_difference(const Image& shadow, const Image& shadow_free);

/// 256-bin histogram of values in [0, 1] (bin = round(255 v)).
std::array<std::uint64_t, 256> histogram256(const ShadowMask& values);

/// Otsu threshold: the bin t maximizing between-class variance of
/// {bins <= t} vs {bins > t}; the first maximum wins. Returns -1 when the
/// histogram has fewer than two occupied bins.
int otsu_threshold(const std::array<std::uint64_t, 256>& hist);

/// Binary shadow mask from a shadow / shadow-free pair: Otsu on the luma
/// difference, pixels whose bin exceeds the threshold are shadow. A constant
/// difference image yields an all-zero mask.
ShadowMask otsu_mask(const Image& shadow, const Image& shadow_free);

/// Separable gaussian blur with edge clamping; sigma 0 returns the input.
ShadowMask gaussian_blur(const ShadowMask& mask, double sigma);

}  // namespace deshadow::imaging
