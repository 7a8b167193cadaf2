// SPDX-License-Identifier: Apache-2.0
//
// Brute-force metric references written from the textbook formulas, sharing
// no code with the library.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "deshadow/imaging/image.hpp"
#include "deshadow/nn/rng.hpp"

namespace test {

using deshadow::imaging::Image;
using deshadow::imaging::ShadowMask;
namespace nn = deshadow::nn;

inline Image random_image(int h, int w, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    nn::Rng rng(seed);
    Image img(h, w);
    for (double& v : img.pixels) v = rng.uniform(lo, hi);
    return img;
}

inline ShadowMask random_mask(int h, int w, std::uint64_t seed) {
    nn::Rng rng(seed);
    ShadowMask m(h, w);
    for (double& v : m.values) v = rng.uniform() < 0.35 ? 1.0 : 0.0;
    return m;
}

// sRGB -> L*a*b* written from the standard formulas, white = M (1, 1, 1).
inline std::array<double, 3> lab_oracle(double r, double g, double b) {
    auto lin = [](double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); };
    const double m[3][3] = {{0.4124564, 0.3575761, 0.1804375},
                            {0.2126729, 0.7151522, 0.0721750},
                            {0.0193339, 0.1191920, 0.9503041}};
    const double rgb[3] = {lin(r), lin(g), lin(b)};
    double xyz[3], white[3];
    for (int i = 0; i < 3; ++i) {
        xyz[i] = m[i][0] * rgb[0] + m[i][1] * rgb[1] + m[i][2] * rgb[2];
        white[i] = m[i][0] + m[i][1] + m[i][2];
    }
    auto f = [](double t) {
        const double d = 6.0 / 29.0;
        return t > d * d * d ? std::pow(t, 1.0 / 3.0) : t / (3 * d * d) + 4.0 / 29.0;
    };
    const double fx = f(xyz[0] / white[0]), fy = f(xyz[1] / white[1]), fz = f(xyz[2] / white[2]);
    return {116 * fy - 16, 500 * (fx - fy), 200 * (fy - fz)};
}

inline double rmse_oracle(const Image& a, const Image& b, const ShadowMask& region) {
    double acc = 0;
    int n = 0;
    for (int y = 0; y < a.height; ++y)
        for (int x = 0; x < a.width; ++x) {
            if (region.at(y, x) < 0.5) continue;
            const auto la = lab_oracle(a.at(y, x, 0), a.at(y, x, 1), a.at(y, x, 2));
            const auto lb = lab_oracle(b.at(y, x, 0), b.at(y, x, 1), b.at(y, x, 2));
            for (int c = 0; c < 3; ++c) acc += (la[c] - lb[c]) * (la[c] - lb[c]);
            ++n;
        }
    return std::sqrt(acc / (3.0 * n));
}

inline double mse_oracle(const Image& a, const Image& b, const ShadowMask& region, int* count = nullptr) {
    double acc = 0;
    int n = 0;
    for (int y = 0; y < a.height; ++y)
        for (int x = 0; x < a.width; ++x) {
            if (region.at(y, x) < 0.5) continue;
            for (int c = 0; c < 3; ++c) acc += std::pow(a.at(y, x, c) - b.at(y, x, c), 2);
            ++n;
        }
    if (count) *count = n;
    return acc / (3.0 * n);
}

inline double psnr_oracle(const Image& a, const Image& b, const ShadowMask& region) {
    const double mse = mse_oracle(a, b, region);
    return mse == 0 ? 100.0 : std::min(100.0, -10.0 * std::log10(mse));
}

// Wang et al. SSIM, computed window by window around every centre whose
// 11 x 11 neighbourhood lies inside the image.
inline double ssim_oracle(const Image& a, const Image& b, const ShadowMask& region) {
    auto luma = [](const Image& img, int y, int x) {
        return 0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) + 0.114 * img.at(y, x, 2);
    };
    double wsum = 0;
    double w[11][11];
    for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
            w[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / 4.5);
            wsum += w[i][j];
        }
    const double c1 = 1e-4, c2 = 9e-4;
    double acc = 0;
    int n = 0;
    for (int cy = 5; cy + 5 < a.height; ++cy)
        for (int cx = 5; cx + 5 < a.width; ++cx) {
            if (region.at(cy, cx) < 0.5) continue;
            double mx = 0, my = 0;
            for (int i = 0; i < 11; ++i)
                for (int j = 0; j < 11; ++j) {
                    mx += w[i][j] / wsum * luma(a, cy + i - 5, cx + j - 5);
                    my += w[i][j] / wsum * luma(b, cy + i - 5, cx + j - 5);
                }
            double vx = 0, vy = 0, cov = 0;
            for (int i = 0; i < 11; ++i)
                for (int j = 0; j < 11; ++j) {
                    const double dx = luma(a, cy + i - 5, cx + j - 5) - mx;
                    const double dy = luma(b, cy + i - 5, cx + j - 5) - my;
                    vx += w[i][j] / wsum * dx * dx;
                    vy += w[i][j] / wsum * dy * dy;
                    cov += w[i][j] / wsum * dx * dy;
                }
            acc += (2 * mx * my + c1) * (2 * cov + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++n;
        }
    return acc / n;
}

}  // namespace test
