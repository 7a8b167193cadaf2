// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deshadow/imaging/image.hpp"

namespace deshadow::imaging {

/// Shadow-free texture: a per-channel base colour plus a few low-frequency
/// cosine waves with random direction and phase.
Image smooth_texture(std::uint64_t seed, int h, int w);

/// Random convex polygon (vertices at sorted angles on a random ellipse),
/// rasterized at pixel centres.
ShadowMask convex_polygon_mask(std::uint64_t seed, int h, int w);

/// Shadow-free texture, binary polygon mask, and the shadow image
/// shadow_free * (1 - darkening * blur(mask, softness)) clamped to [0, 1].
Triplet synth_pair(std::uint64_t seed, int h, int w, double darkening, double softness);

/// `count` pairs with ids "synth_000", ... and per-pair seeds derived from `seed`.
std::vector<Triplet> synth_dataset(std::uint64_t seed, int count, int size, double darkening = 0.5,
                                   double softness = 1.0);

}  // namespace deshadow::imaging
