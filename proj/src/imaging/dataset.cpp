// SPDX-License-Identifier: Apache-2.0
#include "deshadow/imaging/dataset.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "deshadow/error.hpp"
#include "deshadow/imaging/png_io.hpp"

namespace deshadow::imaging {

namespace fs = std::filesystem;

namespace {

struct Dirs {
    fs::path shadow, mask, shadow_free;
};

std::optional<fs::path> find_suffix_dir(const fs::path& root, const std::string& suffix) {
    std::vector<fs::path> hits;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && entry.path().filename().string().ends_with(suffix)) hits.push_back(entry.path());
    if (hits.size() > 1) throw DataError("dataset root '" + root.string() + "' has several '*" + suffix + "' folders");
    if (hits.empty()) return std::nullopt;
    return hits.front();
}

std::optional<Dirs> locate(const fs::path& root, Layout layout, bool require_shadow_free) {
    std::optional<fs::path> s, m, f;
    if (layout == Layout::istd) {
        s = find_suffix_dir(root, "_A");
        m = find_suffix_dir(root, "_B");
        f = find_suffix_dir(root, "_C");
    } else {
        auto sub = [&](const char* name) -> std::optional<fs::path> {
            const fs::path p = root / name;
            return fs::is_directory(p) ? std::optional<fs::path>(p) : std::nullopt;
        };
        s = sub("shadow");
        m = sub("mask");
        f = sub("shadow_free");
    }
    if (!s && !m && !f) return std::nullopt;
    const char* names[3] = {layout == Layout::istd ? "*_A" : "shadow", layout == Layout::istd ? "*_B" : "mask",
                            layout == Layout::istd ? "*_C" : "shadow_free"};
    const std::optional<fs::path>* found[3] = {&s, &m, &f};
    for (int i = 0; i < 3; ++i)
        if (!*found[i] && (i < 2 || require_shadow_free))
            throw DataError("dataset root '" + root.string() + "' lacks the '" + names[i] + "' folder");
    return Dirs{*s, *m, f.value_or(fs::path())};
}

std::map<std::string, fs::path> list_pngs(const fs::path& dir) {
    std::map<std::string, fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext != ".png") continue;
        out.emplace(entry.path().stem().string(), entry.path());
    }
    return out;
}

}  // namespace

Layout parse_layout(const std::string& text) {
    if (text == "istd") return Layout::istd;
    if (text == "srd") return Layout::srd;
    throw ContractViolation("unknown dataset layout '" + text + "' (expected istd or srd)");
}

std::vector<Triplet> load_dataset(const fs::path& root, Layout layout, bool require_shadow_free) {
    if (!fs::is_directory(root)) throw DataError("dataset root '" + root.string() + "' is not a directory");
    const auto dirs = locate(root, layout, require_shadow_free);
    if (!dirs) return {};

    const auto shadows = list_pngs(dirs->shadow);
    const auto masks = list_pngs(dirs->mask);
    const bool with_free = !dirs->shadow_free.empty();
    const auto frees = with_free ? list_pngs(dirs->shadow_free) : std::map<std::string, fs::path>();

    auto check_orphans = [](const std::map<std::string, fs::path>& from,
                            const std::map<std::string, fs::path>& a, const std::map<std::string, fs::path>& b) {
        for (const auto& [stem, path] : from)
            if (!a.count(stem) || !b.count(stem))
                throw DataError("orphan dataset file '" + path.string() + "' has no matching counterpart");
    };
    if (with_free) {
        check_orphans(shadows, masks, frees);
        check_orphans(masks, shadows, frees);
        check_orphans(frees, shadows, masks);
    } else {
        check_orphans(shadows, masks, masks);
        check_orphans(masks, shadows, shadows);
    }

    std::vector<Triplet> out;
    out.reserve(shadows.size());
    for (const auto& [stem, path] : shadows) {
        Triplet t;
        t.id = stem;
        t.shadow = read_png(path);
        t.mask = read_mask_png(masks.at(stem));
        if (with_free) t.shadow_free = read_png(frees.at(stem));
        if ((with_free && !t.shadow_free.same_size(t.shadow.height, t.shadow.width)) ||
            !t.mask.same_size(t.shadow.height, t.shadow.width))
            throw DataError("triplet '" + stem + "' has images of different sizes");
        out.push_back(std::move(t));
    }
    return out;
}

void write_istd(const fs::path& root, const std::vector<Triplet>& triplets) {
    const fs::path a = root / "train_A", b = root / "train_B", c = root / "train_C";
    for (const auto& d : {a, b, c}) fs::create_directories(d);
    for (const auto& t : triplets) {
        const std::string file = t.id + ".png";
        write_png(a / file, t.shadow);
        write_png(b / file, t.mask);
        write_png(c / file, t.shadow_free);
    }
}

}  // namespace deshadow::imaging
