// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the unit tests: random fixtures and direct-summation
// reference implementations that do not share code with the library.
#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "deshadow/nn/rng.hpp"
#include "deshadow/nn/tensor.hpp"

namespace test {

using deshadow::nn::Shape;
using deshadow::nn::Tensor;

template <class T = double>
Tensor<T> random_tensor(Shape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    deshadow::nn::Rng rng(seed);
    Tensor<T> t(std::move(shape));
    for (T& v : t.data()) v = static_cast<T>(rng.uniform(lo, hi));
    return t;
}

// Values in [lo, hi] with magnitude at least `gap` (keeps ReLU/abs away from kinks).
inline Tensor<double> random_away_from_zero(Shape shape, std::uint64_t seed, double gap = 0.1) {
    deshadow::nn::Rng rng(seed);
    Tensor<double> t(std::move(shape));
    for (double& v : t.data()) {
        const double m = rng.uniform(gap, 1.0);
        v = rng.uniform() < 0.5 ? -m : m;
    }
    return t;
}

// Sliding-window cross-correlation by definition.
inline Tensor<double> conv_reference(const Tensor<double>& x, const Tensor<double>& w, const Tensor<double>& b,
                                     int stride, int pad) {
    const int ci = x.dim(0), h = x.dim(1), wd = x.dim(2), co = w.dim(0), k = w.dim(2);
    const int oh = (h + 2 * pad - k) / stride + 1, ow = (wd + 2 * pad - k) / stride + 1;
    Tensor<double> y({co, oh, ow});
    for (int o = 0; o < co; ++o)
        for (int i = 0; i < oh; ++i)
            for (int j = 0; j < ow; ++j) {
                double s = b[static_cast<std::size_t>(o)];
                for (int c = 0; c < ci; ++c)
                    for (int ky = 0; ky < k; ++ky)
                        for (int kx = 0; kx < k; ++kx) {
                            const int yy = i * stride + ky - pad, xx = j * stride + kx - pad;
                            if (yy < 0 || yy >= h || xx < 0 || xx >= wd) continue;
                            s += w[((static_cast<std::size_t>(o) * ci + c) * k + ky) * k + kx] * x.at(c, yy, xx);
                        }
                y.at(o, i, j) = s;
            }
    return y;
}

// Transposed convolution as scatter-accumulate; kernel is C_in x C_out x k x k.
inline Tensor<double> conv_transpose_reference(const Tensor<double>& x, const Tensor<double>& w,
                                               const Tensor<double>& b, int stride, int pad) {
    const int ci = x.dim(0), h = x.dim(1), wd = x.dim(2), co = w.dim(1), k = w.dim(2);
    const int oh = (h - 1) * stride - 2 * pad + k, ow = (wd - 1) * stride - 2 * pad + k;
    Tensor<double> y({co, oh, ow});
    for (int o = 0; o < co; ++o)
        for (int i = 0; i < oh; ++i)
            for (int j = 0; j < ow; ++j) y.at(o, i, j) = b[static_cast<std::size_t>(o)];
    for (int c = 0; c < ci; ++c)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < wd; ++j)
                for (int o = 0; o < co; ++o)
                    for (int ky = 0; ky < k; ++ky)
                        for (int kx = 0; kx < k; ++kx) {
                            const int yy = i * stride + ky - pad, xx = j * stride + kx - pad;
                            if (yy < 0 || yy >= oh || xx < 0 || xx >= ow) continue;
                            y.at(o, yy, xx) += x.at(c, i, j) * w[((static_cast<std::size_t>(c) * co + o) * k + ky) * k + kx];
                        }
    return y;
}

template <class T>
double max_abs_diff(const Tensor<T>& a, const Tensor<T>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(static_cast<double>(a[i]) - b[i]));
    return m;
}

// Fresh directory under the system temp folder, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace test
