// SPDX-License-Identifier: Apache-2.0
//
// On-disk layouts:
//   istd: <root>/<split>_A/<stem>.png  shadow image
//         <root>/<split>_B/<stem>.png  binary mask
//         <root>/<split>_C/<stem>.png  shadow-free image
//   srd:  <root>/shadow/, <root>/shadow_free/, <root>/mask/
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "deshadow/imaging/image.hpp"

namespace deshadow::imaging {

enum class Layout { istd, srd };

Layout parse_layout(const std::string& text);

/// Triplets matched by file stem, sorted lexicographically by stem. An empty
/// root yields an empty list; a file without all counterparts is a DataError
/// naming that file. Without `require_shadow_free` a missing shadow-free
/// folder is accepted and the triplets carry an empty shadow_free image.
std::vector<Triplet> load_dataset(const std::filesystem::path& root, Layout layout = Layout::istd,
                                  bool require_shadow_free = true);

/// Writes triplets in the istd layout under <root>/train_{A,B,C}.
void write_istd(const std::filesystem::path& root, const std::vector<Triplet>& triplets);

}  // namespace deshadow::imaging
