// SPDX-License-Identifier: Apache-2.0
#include "deshadow/imaging/image.hpp"

#include <algorithm>
#include <cmath>

#include "deshadow/error.hpp"

namespace deshadow::imaging {

Image::Image(int h, int w, double fill) : height(h), width(w) {
    if (h < 1 || w < 1) throw ContractViolation("Image: extents must be positive");
    pixels.assign(static_cast<std::size_t>(h) * w * 3, fill);
}

Image Image::from_pixels(int h, int w, std::vector<double> values) {
    if (h < 1 || w < 1) throw ContractViolation("Image: extents must be positive");
    if (values.size() != static_cast<std::size_t>(h) * w * 3)
        throw ContractViolation("Image: pixel buffer length does not match " + std::to_string(h) + "x" +
                                std::to_string(w) + "x3");
    for (double& v : values) {
        if (!std::isfinite(v)) throw DataError("Image: non-finite pixel value");
        v = std::clamp(v, 0.0, 1.0);
    }
    Image img;
    img.height = h;
    img.width = w;
    img.pixels = std::move(values);
    return img;
}

ShadowMask::ShadowMask(int h, int w, double fill) : height(h), width(w) {
    if (h < 1 || w < 1) throw ContractViolation("ShadowMask: extents must be positive");
    values.assign(static_cast<std::size_t>(h) * w, fill);
}

std::size_t ShadowMask::count_on() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return v >= 0.5; }));
}

ShadowMask invert(const ShadowMask& mask) {
    ShadowMask out = mask;
    for (double& v : out.values) v = v >= 0.5 ? 0.0 : 1.0;
    return out;
}

ShadowMask binarize(const ShadowMask& mask, double threshold) {
    ShadowMask out = mask;
    for (double& v : out.values) v = v >= threshold ? 1.0 : 0.0;
    return out;
}

}  // namespace deshadow::imaging
