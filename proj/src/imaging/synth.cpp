// SPDX-License-Identifier: Apache-2.0
#include "deshadow/imaging/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "deshadow/error.hpp"
#include "deshadow/imaging/ops.hpp"
#include "deshadow/nn/rng.hpp"

namespace deshadow::imaging {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Image smooth_texture(std::uint64_t seed, int h, int w) {
    nn::Rng rng(mix(seed ^ 0x7465787475726500ULL));
    struct Wave {
        double fx, fy, phase, amp;
    };
    std::array<double, 3> base{};
    std::array<std::array<Wave, 3>, 3> waves{};
    for (int c = 0; c < 3; ++c) {
        base[c] = rng.uniform(0.45, 0.75);
        for (auto& wv : waves[c]) {
            const double angle = rng.uniform(0.0, kTwoPi);
            const double cycles = rng.uniform(0.5, 2.0);
            wv = {std::cos(angle) * cycles, std::sin(angle) * cycles, rng.uniform(0.0, kTwoPi), rng.uniform(0.03, 0.07)};
        }
    }
    Image img(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double u = (x + 0.5) / w, v = (y + 0.5) / h;
            for (int c = 0; c < 3; ++c) {
                double value = base[c];
                for (const auto& wv : waves[c]) value += wv.amp * std::cos(kTwoPi * (wv.fx * u + wv.fy * v) + wv.phase);
                img.at(y, x, c) = std::clamp(value, 0.0, 1.0);
            }
        }
    return img;
}

ShadowMask convex_polygon_mask(std::uint64_t seed, int h, int w) {
    nn::Rng rng(mix(seed ^ 0x706f6c79676f6e00ULL));
    const double cx = rng.uniform(0.35, 0.65) * w, cy = rng.uniform(0.35, 0.65) * h;
    const double rx = rng.uniform(0.18, 0.32) * w, ry = rng.uniform(0.18, 0.32) * h;
    const int n = 3 + static_cast<int>(rng.below(6));
    std::vector<double> angles(static_cast<std::size_t>(n));
    for (double& a : angles) a = rng.uniform(0.0, kTwoPi);
    std::sort(angles.begin(), angles.end());
    std::vector<std::array<double, 2>> pts;
    for (double a : angles) pts.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});

    // Points on an ellipse in angular order form a convex polygon; inside test
    // is "same side of every edge".
    ShadowMask mask(h, w, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double px = x + 0.5, py = y + 0.5;
            bool inside = true;
            for (int i = 0; i < n && inside; ++i) {
                const auto& a = pts[static_cast<std::size_t>(i)];
                const auto& b = pts[static_cast<std::size_t>((i + 1) % n)];
                const double cross = (b[0] - a[0]) * (py - a[1]) - (b[1] - a[1]) * (px - a[0]);
                inside = cross >= 0.0;
            }
            mask.at(y, x) = inside ? 1.0 : 0.0;
        }
    return mask;
}

Triplet synth_pair(std::uint64_t seed, int h, int w, double darkening, double softness) {
    if (!(darkening >= 0.0 && darkening < 1.0)) throw ContractViolation("synth_pair: darkening must lie in [0, 1)");
    if (!(softness >= 0.0)) throw ContractViolation("synth_pair: softness must be non-negative");
    Triplet t;
    t.shadow_free = smooth_texture(seed, h, w);
    t.mask = convex_polygon_mask(seed, h, w);
    const ShadowMask soft = gaussian_blur(t.mask, softness);
    t.shadow = t.shadow_free;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double factor = 1.0 - darkening * soft.at(y, x);
            for (int c = 0; c < 3; ++c) t.shadow.at(y, x, c) = std::clamp(t.shadow_free.at(y, x, c) * factor, 0.0, 1.0);
        }
    return t;
}

std::vector<Triplet> synth_dataset(std::uint64_t seed, int count, int size, double darkening, double softness) {
    if (count < 0) throw ContractViolation("synth_dataset: negative count");
    std::vector<Triplet> out;
    for (int i = 0; i < count; ++i) {
        Triplet t = synth_pair(mix(seed * 0x100000001b3ULL + static_cast<std::uint64_t>(i)), size, size, darkening,
                               softness);
        char id[32];
        std::snprintf(id, sizeof id, "synth_%03d", i);
        t.id = id;
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace deshadow::imaging
