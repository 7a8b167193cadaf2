// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace deshadow::imaging {

/// H x W x 3 sRGB raster, interleaved, values in [0, 1].
struct Image {
    int height = 0;
    int width = 0;
    std::vector<double> pixels;

    Image() = default;
    Image(int h, int w, double fill = 0.0);
    /// Clamps to [0, 1]; throws on non-finite values or a length mismatch.
    static Image from_pixels(int h, int w, std::vector<double> values);

    double& at(int y, int x, int c) { return pixels[index(y, x, c)]; }
    double at(int y, int x, int c) const { return pixels[index(y, x, c)]; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(height) * width; }
    bool same_size(int h, int w) const noexcept { return height == h && width == w; }

private:
    std::size_t index(int y, int x, int c) const noexcept {
        return (static_cast<std::size_t>(y) * width + x) * 3 + c;
    }
};

/// H x W map. Dataset masks are binary (1 = shadow); soft masks lie in (0, 1).
struct ShadowMask {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    ShadowMask() = default;
    ShadowMask(int h, int w, double fill = 0.0);

    double& at(int y, int x) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(height) * width; }
    std::size_t count_on() const;
    bool same_size(int h, int w) const noexcept { return height == h && width == w; }
};

/// 1 where the mask is below 0.5, 0 elsewhere.
ShadowMask invert(const ShadowMask& mask);
/// Values >= threshold become 1, others 0.
ShadowMask binarize(const ShadowMask& mask, double threshold = 0.5);

struct Triplet {
    Image shadow;
    Image shadow_free;
    ShadowMask mask;
    std::string id;
};

/// Rec.601 luma.
inline double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

}  // namespace deshadow::imaging
