// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "deshadow/imaging/image.hpp"
#include "deshadow/model/branches.hpp"

namespace deshadow::train {

nn::Tensor<float> image_tensor(const imaging::Image& img);
nn::Tensor<float> mask_tensor(const imaging::ShadowMask& mask);
/// Clamps to [0, 1].
imaging::Image tensor_image(const nn::Tensor<float>& t);
imaging::ShadowMask tensor_mask(const nn::Tensor<float>& t);

struct Restoration {
    imaging::Image reconstruction;                        // identical-mapping output
    std::vector<imaging::Image> passes;                   // passes[t] is iteration t + 1
    std::vector<std::vector<imaging::ShadowMask>> soft_masks;  // per pass, per site
};

/// Runs both branches without recording gradients. Inputs of another size
/// are resized to the network resolution and outputs resized back.
Restoration restore(const model::DualBranchNet<float>& net, const imaging::Image& shadow,
                    const imaging::ShadowMask& mask, int k);

}  // namespace deshadow::train
