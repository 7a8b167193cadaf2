// SPDX-License-Identifier: Apache-2.0
#include "deshadow/imaging/color.hpp"

#include <cmath>

namespace deshadow::imaging {

namespace {

// Linear sRGB -> XYZ, D65.
constexpr double kM[3][3] = {{0.4124564, 0.3575761, 0.1804375},
                             {0.2126729, 0.7151522, 0.0721750},
                             {0.0193339, 0.1191920, 0.9503041}};
// White point as the image of linear (1, 1, 1), so sRGB white is exactly neutral.
constexpr double kWhite[3] = {kM[0][0] + kM[0][1] + kM[0][2], kM[1][0] + kM[1][1] + kM[1][2],
                              kM[2][0] + kM[2][1] + kM[2][2]};
constexpr double kDelta = 6.0 / 29.0;

double to_linear(double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); }
double from_linear(double c) { return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055; }

double f(double t) { return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0; }
double f_inv(double t) { return t > kDelta ? t * t * t : 3.0 * kDelta * kDelta * (t - 4.0 / 29.0); }

}  // namespace

Lab srgb_to_lab(double r, double g, double b) {
    const double lin[3] = {to_linear(r), to_linear(g), to_linear(b)};
    double xyz[3];
    for (int i = 0; i < 3; ++i) xyz[i] = kM[i][0] * lin[0] + kM[i][1] * lin[1] + kM[i][2] * lin[2];
    const double fx = f(xyz[0] / kWhite[0]);
    const double fy = f(xyz[1] / kWhite[1]);
    const double fz = f(xyz[2] / kWhite[2]);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

std::array<double, 3> lab_to_srgb(const Lab& lab) {
    const double fy = (lab[0] + 16.0) / 116.0;
    const double fx = fy + lab[1] / 500.0;
    const double fz = fy - lab[2] / 200.0;
    const double xyz[3] = {kWhite[0] * f_inv(fx), kWhite[1] * f_inv(fy), kWhite[2] * f_inv(fz)};
    static const auto inv = [] {
        std::array<std::array<double, 3>, 3> m{};
        const double det = kM[0][0] * (kM[1][1] * kM[2][2] - kM[1][2] * kM[2][1]) -
                           kM[0][1] * (kM[1][0] * kM[2][2] - kM[1][2] * kM[2][0]) +
                           kM[0][2] * (kM[1][0] * kM[2][1] - kM[1][1] * kM[2][0]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                // Cofactor transpose: inv[i][j] = C[j][i] / det.
                const int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
                m[i][j] = (kM[r0][c0] * kM[r1][c1] - kM[r0][c1] * kM[r1][c0]) / det;
            }
        return m;
    }();
    std::array<double, 3> rgb{};
    for (int i = 0; i < 3; ++i) rgb[i] = from_linear(inv[i][0] * xyz[0] + inv[i][1] * xyz[1] + inv[i][2] * xyz[2]);
    return rgb;
}

std::vector<double> rgb_to_lab(const Image& img) {
    std::vector<double> out(img.pixels.size());
    for (std::size_t i = 0; i + 2 < img.pixels.size(); i += 3) {
        const Lab lab = srgb_to_lab(img.pixels[i], img.pixels[i + 1], img.pixels[i + 2]);
        out[i] = lab[0];
        out[i + 1] = lab[1];
        out[i + 2] = lab[2];
    }
    return out;
}

}  // namespace deshadow::imaging
