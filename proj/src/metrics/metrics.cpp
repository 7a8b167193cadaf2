// SPDX-License-Identifier: Apache-2.0
#include "deshadow/metrics/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "deshadow/error.hpp"
#include "deshadow/imaging/color.hpp"

namespace deshadow::metrics {

namespace {

void require_pair(const Image& pred, const Image& gt, const ShadowMask& region, const char* op) {
    if (!pred.same_size(gt.height, gt.width) || !region.same_size(gt.height, gt.width))
        throw ContractViolation(std::string(op) + ": prediction, ground truth and region differ in size");
}

std::size_t require_nonempty(const ShadowMask& region, const char* op) {
    const std::size_t n = region.count_on();
    if (n == 0) throw DataError(std::string(op) + ": region selects no pixels");
    return n;
}

std::array<double, kSsimWindow * kSsimWindow> gaussian_window() {
    std::array<double, kSsimWindow * kSsimWindow> w{};
    constexpr int r = kSsimWindow / 2;
    constexpr double sigma = 1.5;
    double norm = 0.0;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            w[static_cast<std::size_t>((dy + r) * kSsimWindow + dx + r)] = v;
            norm += v;
        }
    for (double& v : w) v /= norm;
    return w;
}

ShadowMask luma_plane(const Image& img) {
    ShadowMask out(img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(y, x) = imaging::luma(img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2));
    return out;
}

}  // namespace

LabConvention parse_convention(const std::string& text) {
    if (text == "rmse-lab") return LabConvention::rmse;
    if (text == "mae-lab") return LabConvention::mae;
    throw ContractViolation("unknown metric convention '" + text + "' (expected rmse-lab or mae-lab)");
}

std::string to_string(LabConvention c) { return c == LabConvention::rmse ? "rmse-lab" : "mae-lab"; }

ShadowMask whole_region(int height, int width) { return ShadowMask(height, width, 1.0); }

double rmse_lab(const Image& pred, const Image& gt, const ShadowMask& region, LabConvention convention) {
    require_pair(pred, gt, region, "rmse_lab");
    const std::size_t n = require_nonempty(region, "rmse_lab");
    const auto a = imaging::rgb_to_lab(pred);
    const auto b = imaging::rgb_to_lab(gt);
    double acc = 0.0;
    for (std::size_t i = 0; i < region.values.size(); ++i) {
        if (region.values[i] < 0.5) continue;
        for (std::size_t c = 0; c < 3; ++c) {
            const double d = a[3 * i + c] - b[3 * i + c];
            acc += convention == LabConvention::rmse ? d * d : std::abs(d);
        }
    }
    return convention == LabConvention::rmse ? std::sqrt(acc / (3.0 * static_cast<double>(n)))
                                             : acc / static_cast<double>(n);
}

double psnr(const Image& pred, const Image& gt, const ShadowMask& region) {
    require_pair(pred, gt, region, "psnr");
    const std::size_t n = require_nonempty(region, "psnr");
    double acc = 0.0;
    for (std::size_t i = 0; i < region.values.size(); ++i) {
        if (region.values[i] < 0.5) continue;
        for (std::size_t c = 0; c < 3; ++c) {
            const double d = pred.pixels[3 * i + c] - gt.pixels[3 * i + c];
            acc += d * d;
        }
    }
    const double mse = acc / (3.0 * static_cast<double>(n));
    if (mse == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

ShadowMask ssim_map(const Image& pred, const Image& gt) {
    if (!pred.same_size(gt.height, gt.width)) throw ContractViolation("ssim: images differ in size");
    if (gt.height < kSsimWindow || gt.width < kSsimWindow)
        throw DataError("ssim: image is smaller than the 11x11 window");
    static const auto window = gaussian_window();
    constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    const ShadowMask a = luma_plane(pred), b = luma_plane(gt);
    const int oh = gt.height - kSsimWindow + 1, ow = gt.width - kSsimWindow + 1;
    ShadowMask out(oh, ow);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
            for (int dy = 0; dy < kSsimWindow; ++dy)
                for (int dx = 0; dx < kSsimWindow; ++dx) {
                    const double w = window[static_cast<std::size_t>(dy * kSsimWindow + dx)];
                    const double va = a.at(y + dy, x + dx), vb = b.at(y + dy, x + dx);
                    ma += w * va;
                    mb += w * vb;
                    saa += w * va * va;
                    sbb += w * vb * vb;
                    sab += w * va * vb;
                }
            const double var_a = saa - ma * ma, var_b = sbb - mb * mb, cov = sab - ma * mb;
            out.at(y, x) = ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
        }
    return out;
}

double ssim(const Image& pred, const Image& gt, const ShadowMask& region) {
    require_pair(pred, gt, region, "ssim");
    require_nonempty(region, "ssim");
    const ShadowMask map = ssim_map(pred, gt);
    constexpr int r = kSsimWindow / 2;
    double acc = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            if (region.at(y + r, x + r) < 0.5) continue;
            acc += map.at(y, x);
            ++n;
        }
    if (n == 0) throw DataError("ssim: region has no pixel whose 11x11 window fits inside the image");
    return acc / static_cast<double>(n);
}

double region_l1(const Image& pred, const Image& gt, const ShadowMask& region) {
    require_pair(pred, gt, region, "region_l1");
    const std::size_t n = require_nonempty(region, "region_l1");
    double acc = 0.0;
    for (std::size_t i = 0; i < region.values.size(); ++i) {
        if (region.values[i] < 0.5) continue;
        for (std::size_t c = 0; c < 3; ++c) acc += std::abs(pred.pixels[3 * i + c] - gt.pixels[3 * i + c]);
    }
    return acc / (3.0 * static_cast<double>(n));
}

RegionReport evaluate(const Image& pred, const Image& gt, const ShadowMask& mask, LabConvention convention) {
    const ShadowMask shadow = imaging::binarize(mask);
    const ShadowMask non_shadow = imaging::invert(mask);
    const ShadowMask all = whole_region(gt.height, gt.width);
    auto scores = [&](const ShadowMask& region) {
        return RegionScores{rmse_lab(pred, gt, region, convention), psnr(pred, gt, region), ssim(pred, gt, region)};
    };
    RegionReport r;
    r.all = scores(all);
    r.shadow = scores(shadow);
    r.non_shadow = scores(non_shadow);
    r.shadow_pixels = shadow.count_on();
    r.non_shadow_pixels = non_shadow.count_on();
    return r;
}

RegionReport mean_report(const std::vector<RegionReport>& reports) {
    if (reports.empty()) throw ContractViolation("mean_report: no reports");
    RegionReport m;
    auto add = [](RegionScores& into, const RegionScores& s) {
        into.rmse_lab += s.rmse_lab;
        into.psnr += s.psnr;
        into.ssim += s.ssim;
    };
    for (const auto& r : reports) {
        add(m.all, r.all);
        add(m.shadow, r.shadow);
        add(m.non_shadow, r.non_shadow);
        m.shadow_pixels += r.shadow_pixels;
        m.non_shadow_pixels += r.non_shadow_pixels;
    }
    const double n = static_cast<double>(reports.size());
    for (RegionScores* s : {&m.all, &m.shadow, &m.non_shadow}) {
        s->rmse_lab /= n;
        s->psnr /= n;
        s->ssim /= n;
    }
    return m;
}

std::string format_table(const std::vector<NamedReport>& rows, LabConvention convention) {
    std::ostringstream os;
    const std::string lab = convention == LabConvention::rmse ? "RMSE" : "MAE";
    char line[256];
    std::snprintf(line, sizeof line, "%-20s | %9s %8s %7s | %9s %8s %7s | %9s %8s %7s\n", "image",
                  ("all-" + lab).c_str(), "all-PSNR", "all-SSIM", ("S-" + lab).c_str(), "S-PSNR", "S-SSIM",
                  ("NS-" + lab).c_str(), "NS-PSNR", "NS-SSIM");
    os << line;
    auto emit = [&](const std::string& id, const RegionReport& r) {
        std::snprintf(line, sizeof line, "%-20s | %9.4f %8.3f %7.4f | %9.4f %8.3f %7.4f | %9.4f %8.3f %7.4f\n",
                      id.c_str(), r.all.rmse_lab, r.all.psnr, r.all.ssim, r.shadow.rmse_lab, r.shadow.psnr,
                      r.shadow.ssim, r.non_shadow.rmse_lab, r.non_shadow.psnr, r.non_shadow.ssim);
        os << line;
    };
    std::vector<RegionReport> all;
    for (const auto& row : rows) {
        emit(row.id, row.report);
        all.push_back(row.report);
    }
    if (!all.empty()) emit("mean", mean_report(all));
    return os.str();
}

std::string json_line(const NamedReport& row, LabConvention convention) {
    auto scores = [](const RegionScores& s) {
        nlohmann::ordered_json j;
        j["rmse"] = s.rmse_lab;
        j["psnr"] = s.psnr;
        j["ssim"] = s.ssim;
        return j;
    };
    nlohmann::ordered_json j;
    j["id"] = row.id;
    j["convention"] = to_string(convention);
    j["all"] = scores(row.report.all);
    j["shadow"] = scores(row.report.shadow);
    j["non_shadow"] = scores(row.report.non_shadow);
    j["shadow_pixels"] = row.report.shadow_pixels;
    j["non_shadow_pixels"] = row.report.non_shadow_pixels;
    return j.dump();
}

}  // namespace deshadow::metrics
