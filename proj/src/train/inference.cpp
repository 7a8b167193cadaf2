// SPDX-License-Identifier: Apache-2.0
#include "deshadow/train/inference.hpp"

#include "deshadow/imaging/ops.hpp"

namespace deshadow::train {

nn::Tensor<float> image_tensor(const imaging::Image& img) {
    return model::to_chw<float>(img.pixels, img.height, img.width, 3);
}

nn::Tensor<float> mask_tensor(const imaging::ShadowMask& mask) {
    return model::to_chw<float>(mask.values, mask.height, mask.width, 1);
}

imaging::Image tensor_image(const nn::Tensor<float>& t) {
    return imaging::Image::from_pixels(t.dim(1), t.dim(2), model::to_hwc(t, true));
}

imaging::ShadowMask tensor_mask(const nn::Tensor<float>& t) {
    imaging::ShadowMask m(t.dim(1), t.dim(2));
    m.values = model::to_hwc(t, true);
    return m;
}

Restoration restore(const model::DualBranchNet<float>& net, const imaging::Image& shadow,
                    const imaging::ShadowMask& mask, int k) {
    nn::NoGradGuard no_grad;
    const int s = net.spec().input_size;
    const int h = shadow.height, w = shadow.width;
    const bool rescale = !shadow.same_size(s, s);
    const imaging::Image in = rescale ? imaging::resize(shadow, s, s) : shadow;
    const imaging::ShadowMask m = imaging::binarize(rescale ? imaging::resize(mask, s, s) : mask);

    const auto imb = net.imb_forward(image_tensor(in));
    const auto trace = net.idb_iterate(image_tensor(in), mask_tensor(m), imb.taps, k);

    auto back = [&](imaging::Image img) { return rescale ? imaging::resize(img, h, w) : img; };
    Restoration out;
    out.reconstruction = back(tensor_image(imb.reconstruction.value()));
    for (const auto& pass : trace.passes) {
        out.passes.push_back(back(tensor_image(pass.output.value())));
        std::vector<imaging::ShadowMask> masks;
        for (const auto& sm : pass.soft_masks) masks.push_back(tensor_mask(sm.value()));
        out.soft_masks.push_back(std::move(masks));
    }
    return out;
}

}  // namespace deshadow::train
