// SPDX-License-Identifier: Apache-2.0
#include "deshadow/imaging/ops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "deshadow/error.hpp"

namespace deshadow::imaging {

namespace {

struct Tap {
    int i0, i1;
    double frac;
};

std::vector<Tap> bilinear_taps(int in, int out) {
    std::vector<Tap> taps(static_cast<std::size_t>(out));
    const double scale = static_cast<double>(in) / out;
    for (int d = 0; d < out; ++d) {
        double src = (d + 0.5) * scale - 0.5;
        src = std::clamp(src, 0.0, static_cast<double>(in - 1));
        const int i0 = static_cast<int>(std::floor(src));
        const int i1 = std::min(i0 + 1, in - 1);
        taps[static_cast<std::size_t>(d)] = {i0, i1, src - i0};
    }
    return taps;
}

void require_positive(int h, int w, const char* op) {
    if (h < 1 || w < 1) throw ContractViolation(std::string(op) + ": target extents must be positive");
}

}  // namespace

Image resize(const Image& img, int height, int width) {
    require_positive(height, width, "resize");
    if (img.same_size(height, width)) return img;
    const auto ty = bilinear_taps(img.height, height);
    const auto tx = bilinear_taps(img.width, width);
    Image out(height, width);
    for (int y = 0; y < height; ++y) {
        const Tap& a = ty[static_cast<std::size_t>(y)];
        for (int x = 0; x < width; ++x) {
            const Tap& b = tx[static_cast<std::size_t>(x)];
            for (int c = 0; c < 3; ++c) {
                const double top = img.at(a.i0, b.i0, c) * (1 - b.frac) + img.at(a.i0, b.i1, c) * b.frac;
                const double bot = img.at(a.i1, b.i0, c) * (1 - b.frac) + img.at(a.i1, b.i1, c) * b.frac;
                out.at(y, x, c) = top * (1 - a.frac) + bot * a.frac;
            }
        }
    }
    return out;
}

ShadowMask resize(const ShadowMask& mask, int height, int width) {
    require_positive(height, width, "resize");
    if (mask.same_size(height, width)) return mask;
    ShadowMask out(height, width);
    for (int y = 0; y < height; ++y) {
        const int sy = std::min(mask.height - 1, static_cast<int>((y + 0.5) * mask.height / height));
        for (int x = 0; x < width; ++x) {
            const int sx = std::min(mask.width - 1, static_cast<int>((x + 0.5) * mask.width / width));
            out.at(y, x) = mask.at(sy, sx);
        }
    }
    return out;
}

ShadowMask luma_difference(const Image& shadow, const Image& shadow_free) {
    if (!shadow.same_size(shadow_free.height, shadow_free.width))
        throw ContractViolation("otsu_mask: shadow and shadow-free images differ in size");
    ShadowMask d(shadow.height, shadow.width);
    for (int y = 0; y < shadow.height; ++y)
        for (int x = 0; x < shadow.width; ++x)
            d.at(y, x) = std::abs(luma(shadow_free.at(y, x, 0), shadow_free.at(y, x, 1), shadow_free.at(y, x, 2)) -
                                  luma(shadow.at(y, x, 0), shadow.at(y, x, 1), shadow.at(y, x, 2)));
    return d;
}

std::array<std::uint64_t, 256> histogram256(const ShadowMask& values) {
    std::array<std::uint64_t, 256> hist{};
    for (double v : values.values) {
        const long bin = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
        ++hist[static_cast<std::size_t>(bin)];
    }
    return hist;
}

int otsu_threshold(const std::array<std::uint64_t, 256>& hist) {
    const auto occupied = std::count_if(hist.begin(), hist.end(), [](std::uint64_t n) { return n > 0; });
    if (occupied < 2) return -1;
    double total = 0.0, sum_all = 0.0;
    for (int i = 0; i < 256; ++i) {
        total += static_cast<double>(hist[static_cast<std::size_t>(i)]);
        sum_all += i * static_cast<double>(hist[static_cast<std::size_t>(i)]);
    }
    double w0 = 0.0, sum0 = 0.0, best = -1.0;
    int best_t = -1;
    for (int t = 0; t < 255; ++t) {
        w0 += static_cast<double>(hist[static_cast<std::size_t>(t)]);
        sum0 += t * static_cast<double>(hist[static_cast<std::size_t>(t)]);
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double between = (w0 / total) * (w1 / total) * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {
            best = between;
            best_t = t;
        }
    }
    return best_t;
}

ShadowMask otsu_mask(const Image& shadow, const Image& shadow_free) {
    const ShadowMask diff = luma_difference(shadow, shadow_free);
    const int t = otsu_threshold(histogram256(diff));
    ShadowMask mask(diff.height, diff.width, 0.0);
    if (t < 0) return mask;
    for (std::size_t i = 0; i < diff.values.size(); ++i)
        mask.values[i] = std::lround(std::clamp(diff.values[i], 0.0, 1.0) * 255.0) > t ? 1.0 : 0.0;
    return mask;
}

ShadowMask gaussian_blur(const ShadowMask& mask, double sigma) {
    if (sigma < 0.0) throw ContractViolation("gaussian_blur: negative sigma");
    if (sigma == 0.0) return mask;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double norm = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = v;
        norm += v;
    }
    for (double& v : kernel) v /= norm;

    const int h = mask.height, w = mask.width;
    ShadowMask tmp(h, w), out(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i)
                s += kernel[static_cast<std::size_t>(i + radius)] * mask.at(y, std::clamp(x + i, 0, w - 1));
            tmp.at(y, x) = s;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i)
                s += kernel[static_cast<std::size_t>(i + radius)] * tmp.at(std::clamp(y + i, 0, h - 1), x);
            out.at(y, x) = std::clamp(s, 0.0, 1.0);
        }
    return out;
}

}  // namespace deshadow::imaging
