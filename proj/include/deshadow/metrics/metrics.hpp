// SPDX-License-Identifier: Apache-2.0
//
// Region-partitioned image quality metrics. A region is a ShadowMask whose
// pixels >= 0.5 are selected; the shadow region of a dataset mask is the mask
// itself, the non-shadow region its inverse.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "deshadow/imaging/image.hpp"

namespace deshadow::metrics {

using imaging::Image;
using imaging::ShadowMask;

enum class LabConvention {
    rmse,  // sqrt(mean over region pixels and channels of squared L*a*b* error)
    mae,   // mean over region pixels of the per-pixel sum of |L*a*b* error|
};

LabConvention parse_convention(const std::string& text);  // "rmse-lab" | "mae-lab"
std::string to_string(LabConvention c);

inline constexpr double kPsnrCap = 100.0;
inline constexpr int kSsimWindow = 11;

ShadowMask whole_region(int height, int width);

double rmse_lab(const Image& pred, const Image& gt, const ShadowMask& region,
                LabConvention convention = LabConvention::rmse);
/// 10 log10(1 / MSE) over region pixels and RGB channels, capped at kPsnrCap.
double psnr(const Image& pred, const Image& gt, const ShadowMask& region);
/// Gaussian-window SSIM on luma (11 x 11, sigma 1.5, K1 0.01, K2 0.03, L 1).
/// The map is defined at pixels whose window fits inside the image and is
/// averaged over the region pixels among those.
double ssim(const Image& pred, const Image& gt, const ShadowMask& region);
/// Mean absolute RGB error over region pixels and channels.
double region_l1(const Image& pred, const Image& gt, const ShadowMask& region);

/// Dense SSIM map over valid window centres: (H - 10) x (W - 10).
ShadowMask ssim_map(const Image& pred, const Image& gt);

struct RegionScores {
    double rmse_lab = 0.0;
    double psnr = 0.0;
    double ssim = 0.0;
};

struct RegionReport {
    RegionScores all, shadow, non_shadow;
    std::size_t shadow_pixels = 0;
    std::size_t non_shadow_pixels = 0;
};

RegionReport evaluate(const Image& pred, const Image& gt, const ShadowMask& mask,
                      LabConvention convention = LabConvention::rmse);

/// Field-wise mean of several reports.
RegionReport mean_report(const std::vector<RegionReport>& reports);

struct NamedReport {
    std::string id;
    RegionReport report;
};

/// Fixed-width table: one row per image plus a trailing "mean" row.
std::string format_table(const std::vector<NamedReport>& rows, LabConvention convention);
/// One JSON object per line. Field order: id, convention, all, shadow,
/// non_shadow (each {rmse, psnr, ssim}), shadow_pixels, non_shadow_pixels.
std::string json_line(const NamedReport& row, LabConvention convention);

}  // namespace deshadow::metrics
