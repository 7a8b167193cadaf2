// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "deshadow/imaging/image.hpp"

namespace deshadow::imaging {

using Lab = std::array<double, 3>;

/// CIE L*a*b* (D65) of one sRGB triple in [0, 1]:
/// sRGB -> linear -> XYZ -> L*a*b*.
Lab srgb_to_lab(double r, double g, double b);
/// Inverse of srgb_to_lab (no gamut clipping).
std::array<double, 3> lab_to_srgb(const Lab& lab);

/// Interleaved H x W x 3 L*a*b* values.
std::vector<double> rgb_to_lab(const Image& img);

}  // namespace deshadow::imaging
