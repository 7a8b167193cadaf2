// SPDX-License-Identifier: Apache-2.0
#include "deshadow/nn/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace deshadow::nn {

namespace {

template <class T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MapMat = Eigen::Map<RowMat<T>>;
template <class T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;
// Column block of a row-major matrix.
template <class T>
using BlockMap = Eigen::Map<RowMat<T>, 0, Eigen::OuterStride<>>;
template <class T>
using ConstBlockMap = Eigen::Map<const RowMat<T>, 0, Eigen::OuterStride<>>;

struct Window {
    int channels, height, width;  // the strided (input-side) tensor
    int kernel, stride, pad;
    int out_h, out_w;             // window grid
};

// Window-grid rows handled per GEMM so the column buffer stays cache resident.
int tile_rows(const Window& g) {
    constexpr int target_cols = 256;
    return std::max(1, target_cols / g.out_w);
}

// cols[(c*k + ky)*k + kx][(oy - oy0)*out_w + ox] = x[c][oy*s - p + ky][ox*s - p + kx], oy in [oy0, oy1)
template <class T>
void im2col(const T* x, const Window& g, int oy0, int oy1, T* cols) {
    const int k = g.kernel;
    const std::size_t plane = static_cast<std::size_t>(oy1 - oy0) * static_cast<std::size_t>(g.out_w);
    for (int c = 0; c < g.channels; ++c) {
        const T* xc = x + static_cast<std::size_t>(c) * g.height * g.width;
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                T* row = cols + (static_cast<std::size_t>(c) * k * k + static_cast<std::size_t>(ky) * k + kx) * plane;
                for (int oy = oy0; oy < oy1; ++oy) {
                    const int iy = oy * g.stride - g.pad + ky;
                    T* dst = row + static_cast<std::size_t>(oy - oy0) * g.out_w;
                    if (iy < 0 || iy >= g.height) {
                        std::fill(dst, dst + g.out_w, T{0});
                        continue;
                    }
                    const T* src = xc + static_cast<std::size_t>(iy) * g.width;
                    if (g.stride == 1) {
                        const int lo = std::max(0, g.pad - kx);
                        const int hi = std::min(g.out_w, g.width + g.pad - kx);
                        std::fill(dst, dst + lo, T{0});
                        if (hi > lo) std::copy(src + lo - g.pad + kx, src + hi - g.pad + kx, dst + lo);
                        std::fill(dst + std::max(lo, hi), dst + g.out_w, T{0});
                        continue;
                    }
                    for (int ox = 0; ox < g.out_w; ++ox) {
                        const int ix = ox * g.stride - g.pad + kx;
                        dst[ox] = (ix >= 0 && ix < g.width) ? src[ix] : T{0};
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: scatter-accumulate columns back onto the strided tensor.
template <class T>
void col2im(const T* cols, const Window& g, int oy0, int oy1, T* x) {
    const int k = g.kernel;
    const std::size_t plane = static_cast<std::size_t>(oy1 - oy0) * static_cast<std::size_t>(g.out_w);
    for (int c = 0; c < g.channels; ++c) {
        T* xc = x + static_cast<std::size_t>(c) * g.height * g.width;
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const T* row =
                    cols + (static_cast<std::size_t>(c) * k * k + static_cast<std::size_t>(ky) * k + kx) * plane;
                for (int oy = oy0; oy < oy1; ++oy) {
                    const int iy = oy * g.stride - g.pad + ky;
                    if (iy < 0 || iy >= g.height) continue;
                    const T* src = row + static_cast<std::size_t>(oy - oy0) * g.out_w;
                    T* dst = xc + static_cast<std::size_t>(iy) * g.width;
                    for (int ox = 0; ox < g.out_w; ++ox) {
                        const int ix = ox * g.stride - g.pad + kx;
                        if (ix >= 0 && ix < g.width) dst[ix] += src[ox];
                    }
                }
            }
        }
    }
}

template <class T>
void require_finite(const Tensor<T>& t, const char* op) {
    if (!t.all_finite()) throw NumericalError(std::string(op) + ": produced non-finite values");
}

void require_rank(const Shape& s, int rank, const char* op, const char* what) {
    if (static_cast<int>(s.size()) != rank)
        throw ContractViolation(std::string(op) + ": " + what + " must have rank " + std::to_string(rank) +
                                ", got " + shape_str(s));
}

void require_conv_args(int kernel, int stride, int pad, const char* op) {
    if (kernel < 1 || stride < 1 || pad < 0 || pad >= kernel)
        throw ContractViolation(std::string(op) + ": unsupported kernel/stride/padding " + std::to_string(kernel) +
                                "/" + std::to_string(stride) + "/" + std::to_string(pad));
}

template <class T>
void add_bias(Tensor<T>& y, const Tensor<T>& bias) {
    const std::size_t plane = static_cast<std::size_t>(y.dim(1)) * y.dim(2);
    for (int c = 0; c < y.dim(0); ++c) {
        T* p = y.ptr() + c * plane;
        const T b = bias[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < plane; ++i) p[i] += b;
    }
}

template <class T>
Tensor<T> bias_grad(const Tensor<T>& gy) {
    const std::size_t plane = static_cast<std::size_t>(gy.dim(1)) * gy.dim(2);
    Tensor<T> gb({gy.dim(0)});
    for (int c = 0; c < gy.dim(0); ++c) {
        const T* p = gy.ptr() + c * plane;
        T s{0};
        for (std::size_t i = 0; i < plane; ++i) s += p[i];
        gb[static_cast<std::size_t>(c)] = s;
    }
    return gb;
}

}  // namespace

namespace {
thread_local BranchRecorder* active_recorder = nullptr;
}  // namespace

BranchRecorder::BranchRecorder() : previous_(active_recorder) { active_recorder = this; }
BranchRecorder::~BranchRecorder() { active_recorder = previous_; }
BranchRecorder* BranchRecorder::active() noexcept { return active_recorder; }

int conv_out_extent(int in, int kernel, int stride, int pad) {
    const int span = in + 2 * pad - kernel;
    if (span < 0) return 0;
    return span / stride + 1;
}

int conv_transpose_out_extent(int in, int kernel, int stride, int pad) { return (in - 1) * stride - 2 * pad + kernel; }

template <class T>
Var<T> conv2d(const Var<T>& input, const Var<T>& kernel, const Var<T>& bias, int stride, int pad) {
    const char* op = "conv2d";
    require_rank(input.shape(), 3, op, "input");
    require_rank(kernel.shape(), 4, op, "kernel");
    require_conv_args(kernel.shape()[2], stride, pad, op);
    const int c_in = input.shape()[0], h = input.shape()[1], w = input.shape()[2];
    const int c_out = kernel.shape()[0], k = kernel.shape()[2];
    if (kernel.shape()[1] != c_in || kernel.shape()[3] != k)
        throw ContractViolation("conv2d: kernel " + shape_str(kernel.shape()) + " incompatible with input " +
                                shape_str(input.shape()));
    if (bias.shape() != Shape{c_out})
        throw ContractViolation("conv2d: bias shape " + shape_str(bias.shape()) + " expected [" +
                                std::to_string(c_out) + "]");
    if (h + 2 * pad < k || w + 2 * pad < k)
        throw ContractViolation("conv2d: padded input " + shape_str(input.shape()) + " smaller than kernel");

    const Window g{c_in, h, w, k, stride, pad, conv_out_extent(h, k, stride, pad), conv_out_extent(w, k, stride, pad)};
    const int kk = c_in * k * k;
    const int n = g.out_h * g.out_w;

    const int rows = tile_rows(g);
    std::vector<T> cols(static_cast<std::size_t>(kk) * rows * g.out_w);
    Tensor<T> y({c_out, g.out_h, g.out_w});
    ConstMapMat<T> wmat(kernel.value().ptr(), c_out, kk);
    for (int oy0 = 0; oy0 < g.out_h; oy0 += rows) {
        const int oy1 = std::min(g.out_h, oy0 + rows);
        const int cols_n = (oy1 - oy0) * g.out_w;
        im2col(input.value().ptr(), g, oy0, oy1, cols.data());
        BlockMap<T>(y.ptr() + oy0 * g.out_w, c_out, cols_n, Eigen::OuterStride<>(n)).noalias() =
            wmat * ConstMapMat<T>(cols.data(), kk, cols_n);
    }
    add_bias(y, bias.value());
    require_finite(y, op);

    return make_result<T>(std::move(y), {input, kernel, bias}, [g, c_out, kk, n, rows](Node<T>& self) {
        Node<T>& x = *self.parents[0];
        Node<T>& wt = *self.parents[1];
        Node<T>& b = *self.parents[2];
        if (b.requires_grad) b.accumulate(bias_grad(self.grad));
        std::vector<T> cols(static_cast<std::size_t>(kk) * rows * g.out_w);
        ConstMapMat<T> wmat(wt.value.ptr(), c_out, kk);
        for (int oy0 = 0; oy0 < g.out_h; oy0 += rows) {
            const int oy1 = std::min(g.out_h, oy0 + rows);
            const int cols_n = (oy1 - oy0) * g.out_w;
            ConstBlockMap<T> gy(self.grad.ptr() + oy0 * g.out_w, c_out, cols_n, Eigen::OuterStride<>(n));
            if (wt.requires_grad) {
                im2col(x.value.ptr(), g, oy0, oy1, cols.data());
                MapMat<T>(wt.grad_buffer().ptr(), c_out, kk).noalias() +=
                    gy * ConstMapMat<T>(cols.data(), kk, cols_n).transpose();
            }
            if (x.requires_grad) {
                MapMat<T>(cols.data(), kk, cols_n).noalias() = wmat.transpose() * gy;
                col2im(cols.data(), g, oy0, oy1, x.grad_buffer().ptr());
            }
        }
    });
}

template <class T>
Var<T> conv_transpose2d(const Var<T>& input, const Var<T>& kernel, const Var<T>& bias, int stride, int pad) {
    const char* op = "conv_transpose2d";
    require_rank(input.shape(), 3, op, "input");
    require_rank(kernel.shape(), 4, op, "kernel");
    require_conv_args(kernel.shape()[2], stride, pad, op);
    const int c_in = input.shape()[0], h = input.shape()[1], w = input.shape()[2];
    const int c_out = kernel.shape()[1], k = kernel.shape()[2];
    if (kernel.shape()[0] != c_in || kernel.shape()[3] != k)
        throw ContractViolation("conv_transpose2d: kernel " + shape_str(kernel.shape()) +
                                " incompatible with input " + shape_str(input.shape()));
    if (bias.shape() != Shape{c_out})
        throw ContractViolation("conv_transpose2d: bias shape " + shape_str(bias.shape()) + " expected [" +
                                std::to_string(c_out) + "]");
    const int out_h = conv_transpose_out_extent(h, k, stride, pad);
    const int out_w = conv_transpose_out_extent(w, k, stride, pad);
    if (out_h <= 0 || out_w <= 0) throw ContractViolation("conv_transpose2d: empty output");

    // The output plays the role of the strided tensor; the input is the window grid.
    const Window g{c_out, out_h, out_w, k, stride, pad, h, w};
    const int kk = c_out * k * k;
    const int n = h * w;

    const int rows = tile_rows(g);
    std::vector<T> cols(static_cast<std::size_t>(kk) * rows * w);
    Tensor<T> y({c_out, out_h, out_w});
    ConstMapMat<T> wmat(kernel.value().ptr(), c_in, kk);
    for (int r0 = 0; r0 < h; r0 += rows) {
        const int r1 = std::min(h, r0 + rows);
        const int cols_n = (r1 - r0) * w;
        MapMat<T>(cols.data(), kk, cols_n).noalias() =
            wmat.transpose() * ConstBlockMap<T>(input.value().ptr() + r0 * w, c_in, cols_n, Eigen::OuterStride<>(n));
        col2im(cols.data(), g, r0, r1, y.ptr());
    }
    add_bias(y, bias.value());
    require_finite(y, op);

    return make_result<T>(std::move(y), {input, kernel, bias}, [g, c_in, kk, n, rows](Node<T>& self) {
        Node<T>& x = *self.parents[0];
        Node<T>& wt = *self.parents[1];
        Node<T>& b = *self.parents[2];
        if (b.requires_grad) b.accumulate(bias_grad(self.grad));
        std::vector<T> cols(static_cast<std::size_t>(kk) * rows * g.out_w);
        ConstMapMat<T> wmat(wt.value.ptr(), c_in, kk);
        for (int r0 = 0; r0 < g.out_h; r0 += rows) {
            const int r1 = std::min(g.out_h, r0 + rows);
            const int cols_n = (r1 - r0) * g.out_w;
            im2col(self.grad.ptr(), g, r0, r1, cols.data());
            ConstMapMat<T> gcols(cols.data(), kk, cols_n);
            if (wt.requires_grad)
                MapMat<T>(wt.grad_buffer().ptr(), c_in, kk).noalias() +=
                    ConstBlockMap<T>(x.value.ptr() + r0 * g.out_w, c_in, cols_n, Eigen::OuterStride<>(n)) *
                    gcols.transpose();
            if (x.requires_grad)
                BlockMap<T>(x.grad_buffer().ptr() + r0 * g.out_w, c_in, cols_n, Eigen::OuterStride<>(n)).noalias() +=
                    wmat * gcols;
        }
    });
}

template <class T>
Var<T> relu(const Var<T>& x) {
    Tensor<T> y = x.value();
    if (auto* rec = BranchRecorder::active())
        for (T v : y.data()) rec->record(v > T{0});
    for (T& v : y.data()) v = v > T{0} ? v : T{0};
    return make_result<T>(std::move(y), {x}, [](Node<T>& self) {
        Node<T>& in = *self.parents[0];
        T* g = in.grad_buffer().ptr();
        const T* gy = self.grad.ptr();
        const T* xv = in.value.ptr();
        for (std::size_t i = 0, n = in.value.size(); i < n; ++i)
            if (xv[i] > T{0}) g[i] += gy[i];
    });
}

template <class T>
Var<T> sigmoid(const Var<T>& x) {
    constexpr T lo = std::numeric_limits<T>::min();
    const T hi = std::nextafter(T{1}, T{0});
    Tensor<T> y = x.value();
    for (T& v : y.data()) {
        const T s = v >= T{0} ? T{1} / (T{1} + std::exp(-v)) : std::exp(v) / (T{1} + std::exp(v));
        v = std::clamp(s, lo, hi);
    }
    require_finite(y, "sigmoid");
    return make_result<T>(std::move(y), {x}, [](Node<T>& self) {
        Node<T>& in = *self.parents[0];
        T* g = in.grad_buffer().ptr();
        const T* gy = self.grad.ptr();
        const T* s = self.value.ptr();
        for (std::size_t i = 0, n = self.value.size(); i < n; ++i) g[i] += gy[i] * s[i] * (T{1} - s[i]);
    });
}

template <class T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
    require_same_shape(a.shape(), b.shape(), "add");
    Tensor<T> y = a.value();
    const T* bv = b.value().ptr();
    T* yv = y.ptr();
    for (std::size_t i = 0, n = y.size(); i < n; ++i) yv[i] += bv[i];
    require_finite(y, "add");
    return make_result<T>(std::move(y), {a, b}, [](Node<T>& self) {
        for (auto& p : self.parents)
            if (p->requires_grad) p->accumulate(self.grad);
    });
}

template <class T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
    require_same_shape(a.shape(), b.shape(), "mul");
    Tensor<T> y = a.value();
    const T* bv = b.value().ptr();
    T* yv = y.ptr();
    for (std::size_t i = 0, n = y.size(); i < n; ++i) yv[i] *= bv[i];
    require_finite(y, "mul");
    return make_result<T>(std::move(y), {a, b}, [](Node<T>& self) {
        Node<T>& pa = *self.parents[0];
        Node<T>& pb = *self.parents[1];
        const T* gy = self.grad.ptr();
        const std::size_t n = self.value.size();
        if (pa.requires_grad) {
            T* g = pa.grad_buffer().ptr();
            for (std::size_t i = 0; i < n; ++i) g[i] += gy[i] * pb.value[i];
        }
        if (pb.requires_grad) {
            T* g = pb.grad_buffer().ptr();
            for (std::size_t i = 0; i < n; ++i) g[i] += gy[i] * pa.value[i];
        }
    });
}

template <class T>
Var<T> concat_channels(const std::vector<Var<T>>& xs) {
    if (xs.empty()) throw ContractViolation("concat_channels: empty input list");
    for (const auto& x : xs) require_rank(x.shape(), 3, "concat_channels", "input");
    const int h = xs[0].shape()[1], w = xs[0].shape()[2];
    int channels = 0;
    for (const auto& x : xs) {
        if (x.shape()[1] != h || x.shape()[2] != w)
            throw ContractViolation("concat_channels: spatial mismatch " + shape_str(xs[0].shape()) + " vs " +
                                    shape_str(x.shape()));
        channels += x.shape()[0];
    }
    Tensor<T> y({channels, h, w});
    std::size_t offset = 0;
    for (const auto& x : xs) {
        std::copy(x.value().ptr(), x.value().ptr() + x.value().size(), y.ptr() + offset);
        offset += x.value().size();
    }
    return make_result<T>(std::move(y), xs, [](Node<T>& self) {
        std::size_t off = 0;
        for (auto& p : self.parents) {
            const std::size_t n = p->value.size();
            if (p->requires_grad) {
                T* g = p->grad_buffer().ptr();
                const T* src = self.grad.ptr() + off;
                for (std::size_t i = 0; i < n; ++i) g[i] += src[i];
            }
            off += n;
        }
    });
}

template <class T>
Var<T> slice_channels(const Var<T>& x, int begin, int count) {
    require_rank(x.shape(), 3, "slice_channels", "input");
    if (begin < 0 || count < 1 || begin + count > x.shape()[0])
        throw ContractViolation("slice_channels: range [" + std::to_string(begin) + ", " +
                                std::to_string(begin + count) + ") outside " + shape_str(x.shape()));
    const std::size_t plane = static_cast<std::size_t>(x.shape()[1]) * x.shape()[2];
    Tensor<T> y({count, x.shape()[1], x.shape()[2]});
    const T* src = x.value().ptr() + begin * plane;
    std::copy(src, src + y.size(), y.ptr());
    return make_result<T>(std::move(y), {x}, [begin, plane](Node<T>& self) {
        T* g = self.parents[0]->grad_buffer().ptr() + begin * plane;
        const T* gy = self.grad.ptr();
        for (std::size_t i = 0, n = self.value.size(); i < n; ++i) g[i] += gy[i];
    });
}

template <class T>
Var<T> channel_mean(const Var<T>& x) {
    require_rank(x.shape(), 3, "channel_mean", "input");
    const int c = x.shape()[0];
    const std::size_t plane = static_cast<std::size_t>(x.shape()[1]) * x.shape()[2];
    Tensor<T> y({1, x.shape()[1], x.shape()[2]});
    const T* xv = x.value().ptr();
    // Accumulate in double so the mean of values below 1 never rounds up to 1.
    for (std::size_t i = 0; i < plane; ++i) {
        double s = 0.0;
        for (int ch = 0; ch < c; ++ch) s += static_cast<double>(xv[ch * plane + i]);
        y[i] = static_cast<T>(s / c);
    }
    return make_result<T>(std::move(y), {x}, [c, plane](Node<T>& self) {
        T* g = self.parents[0]->grad_buffer().ptr();
        const T* gy = self.grad.ptr();
        const T inv = T{1} / static_cast<T>(c);
        for (int ch = 0; ch < c; ++ch)
            for (std::size_t i = 0; i < plane; ++i) g[ch * plane + i] += gy[i] * inv;
    });
}

template <class T>
Var<T> clamp01(const Var<T>& x) {
    Tensor<T> y = x.value();
    if (auto* rec = BranchRecorder::active())
        for (T v : y.data()) {
            rec->record(v < T{0});
            rec->record(v > T{1});
        }
    for (T& v : y.data()) v = std::clamp(v, T{0}, T{1});
    return make_result<T>(std::move(y), {x}, [](Node<T>& self) {
        Node<T>& in = *self.parents[0];
        T* g = in.grad_buffer().ptr();
        const T* gy = self.grad.ptr();
        const T* xv = in.value.ptr();
        for (std::size_t i = 0, n = in.value.size(); i < n; ++i)
            if (xv[i] >= T{0} && xv[i] <= T{1}) g[i] += gy[i];
    });
}

template <class T>
Var<T> detach(const Var<T>& x) {
    return Var<T>(x.value(), false);
}

template <class T>
Var<T> scale(const Var<T>& x, T factor) {
    Tensor<T> y = x.value();
    for (T& v : y.data()) v *= factor;
    require_finite(y, "scale");
    return make_result<T>(std::move(y), {x}, [factor](Node<T>& self) {
        T* g = self.parents[0]->grad_buffer().ptr();
        const T* gy = self.grad.ptr();
        for (std::size_t i = 0, n = self.value.size(); i < n; ++i) g[i] += gy[i] * factor;
    });
}

template <class T>
Var<T> l1_loss(const Var<T>& pred, const Var<T>& target) {
    require_same_shape(pred.shape(), target.shape(), "l1_loss");
    const std::size_t n = pred.value().size();
    double s = 0.0;
    auto* rec = BranchRecorder::active();
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(pred.value()[i]) - static_cast<double>(target.value()[i]);
        if (rec) {
            rec->record(d > 0.0);
            rec->record(d < 0.0);
        }
        s += std::abs(d);
    }
    Tensor<T> y({1}, static_cast<T>(s / static_cast<double>(n)));
    require_finite(y, "l1_loss");
    return make_result<T>(std::move(y), {pred, target}, [n](Node<T>& self) {
        Node<T>& p = *self.parents[0];
        Node<T>& t = *self.parents[1];
        const T scale_by = self.grad[0] / static_cast<T>(n);
        auto sign = [](T d) { return d > T{0} ? T{1} : (d < T{0} ? T{-1} : T{0}); };
        if (p.requires_grad) {
            T* g = p.grad_buffer().ptr();
            for (std::size_t i = 0; i < n; ++i) g[i] += scale_by * sign(p.value[i] - t.value[i]);
        }
        if (t.requires_grad) {
            T* g = t.grad_buffer().ptr();
            for (std::size_t i = 0; i < n; ++i) g[i] -= scale_by * sign(p.value[i] - t.value[i]);
        }
    });
}

template <class T>
Var<T> weighted_sum(const Var<T>& x, const Tensor<T>& weights) {
    require_same_shape(x.shape(), weights.shape(), "weighted_sum");
    double s = 0.0;
    for (std::size_t i = 0, n = weights.size(); i < n; ++i)
        s += static_cast<double>(x.value()[i]) * static_cast<double>(weights[i]);
    Tensor<T> y({1}, static_cast<T>(s));
    return make_result<T>(std::move(y), {x}, [weights](Node<T>& self) {
        T* g = self.parents[0]->grad_buffer().ptr();
        const T gy = self.grad[0];
        for (std::size_t i = 0, n = weights.size(); i < n; ++i) g[i] += gy * weights[i];
    });
}

#define DESHADOW_INSTANTIATE_OPS(T)                                                      \
    template Var<T> conv2d(const Var<T>&, const Var<T>&, const Var<T>&, int, int);           \
    template Var<T> conv_transpose2d(const Var<T>&, const Var<T>&, const Var<T>&, int, int); \
    template Var<T> relu(const Var<T>&);                                                  \
    template Var<T> sigmoid(const Var<T>&);                                               \
    template Var<T> add(const Var<T>&, const Var<T>&);                                    \
    template Var<T> mul(const Var<T>&, const Var<T>&);                                    \
    template Var<T> concat_channels(const std::vector<Var<T>>&);                          \
    template Var<T> slice_channels(const Var<T>&, int, int);                              \
    template Var<T> channel_mean(const Var<T>&);                                          \
    template Var<T> clamp01(const Var<T>&);                                               \
    template Var<T> detach(const Var<T>&);                                                \
    template Var<T> scale(const Var<T>&, T);                                              \
    template Var<T> l1_loss(const Var<T>&, const Var<T>&);                                \
    template Var<T> weighted_sum(const Var<T>&, const Tensor<T>&);

DESHADOW_INSTANTIATE_OPS(float)
DESHADOW_INSTANTIATE_OPS(double)

}  // namespace deshadow::nn
