// SPDX-License-Identifier: Apache-2.0
//
// Differentiable layer primitives. All activations are C x H x W; there is no
// batch axis, batches are formed by accumulating per-sample gradients.
#pragma once

#include <cstdint>
#include <vector>

#include "deshadow/nn/autodiff.hpp"

namespace deshadow::nn {

/// While alive, folds the branch taken at every kink of the piecewise-linear
/// ops (ReLU, clamp, L1 residual sign) on this thread into a digest. Two
/// forwards with equal digests ran on the same linear piece.
class BranchRecorder {
public:
    BranchRecorder();
    ~BranchRecorder();
    BranchRecorder(const BranchRecorder&) = delete;
    BranchRecorder& operator=(const BranchRecorder&) = delete;

    std::uint64_t digest() const noexcept { return hash_; }
    void record(bool branch) noexcept { hash_ = (hash_ ^ static_cast<std::uint64_t>(branch)) * 0x100000001b3ULL; }
    static BranchRecorder* active() noexcept;

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
    BranchRecorder* previous_;
};

/// Output extent of a strided window: floor((in + 2 pad - k) / stride) + 1.
int conv_out_extent(int in, int kernel, int stride, int pad);
/// Output extent of a transposed convolution: (in - 1) stride - 2 pad + k.
int conv_transpose_out_extent(int in, int kernel, int stride, int pad);

/// Cross-correlation with zero padding. kernel: C_out x C_in x k x k, bias: C_out.
template <class T>
Var<T> conv2d(const Var<T>& input, const Var<T>& kernel, const Var<T>& bias, int stride, int pad);

/// Fractionally strided convolution (the adjoint of conv2d w.r.t. its input).
/// kernel: C_in x C_out x k x k, bias: C_out.
template <class T>
Var<T> conv_transpose2d(const Var<T>& input, const Var<T>& kernel, const Var<T>& bias, int stride, int pad);

template <class T>
Var<T> relu(const Var<T>& x);

/// Logistic function. Saturated outputs are pinned inside the open interval
/// (0, 1) so downstream soft masks never reach the endpoints.
template <class T>
Var<T> sigmoid(const Var<T>& x);

template <class T>
Var<T> add(const Var<T>& a, const Var<T>& b);

template <class T>
Var<T> mul(const Var<T>& a, const Var<T>& b);

template <class T>
Var<T> concat_channels(const std::vector<Var<T>>& xs);

/// Channels [begin, begin + count) of a C x H x W tensor.
template <class T>
Var<T> slice_channels(const Var<T>& x, int begin, int count);

/// Arithmetic mean over the channel axis: C x H x W -> 1 x H x W.
template <class T>
Var<T> channel_mean(const Var<T>& x);

/// Clamp to [0, 1]; gradient passes where the input is inside the interval.
template <class T>
Var<T> clamp01(const Var<T>& x);

/// Cuts the graph: same value, no history.
template <class T>
Var<T> detach(const Var<T>& x);

template <class T>
Var<T> scale(const Var<T>& x, T factor);

/// Mean absolute difference over all elements.
template <class T>
Var<T> l1_loss(const Var<T>& pred, const Var<T>& target);

/// sum_i x_i w_i with constant weights; used to reduce tensors for gradient checks.
template <class T>
Var<T> weighted_sum(const Var<T>& x, const Tensor<T>& weights);

}  // namespace deshadow::nn
