// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "deshadow/error.hpp"

namespace deshadow::nn {

using Shape = std::vector<int>;

std::string shape_str(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

/// Dense row-major tensor. Activations are C x H x W (no batch axis),
/// conv kernels are C_out x C_in x k x k.
template <class T>
class Tensor {
public:
    using value_type = T;

    Tensor() = default;
    explicit Tensor(Shape shape, T fill = T{0});
    Tensor(Shape shape, std::vector<T> data);

    const Shape& shape() const noexcept { return shape_; }
    int rank() const noexcept { return static_cast<int>(shape_.size()); }
    int dim(int axis) const { return shape_.at(static_cast<std::size_t>(axis)); }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }
    T* ptr() noexcept { return data_.data(); }
    const T* ptr() const noexcept { return data_.data(); }

    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    // C x H x W accessors.
    T& at(int c, int y, int x) { return data_[index3(c, y, x)]; }
    const T& at(int c, int y, int x) const { return data_[index3(c, y, x)]; }

    void fill(T value);
    bool all_finite() const noexcept;

    /// Returns the tensor converted to another scalar type.
    template <class U>
    Tensor<U> cast() const {
        std::vector<U> out(data_.begin(), data_.end());
        return Tensor<U>(shape_, std::move(out));
    }

    /// Bitwise comparison, including shape.
    bool bit_equal(const Tensor& other) const noexcept;

private:
    std::size_t index3(int c, int y, int x) const noexcept {
        return (static_cast<std::size_t>(c) * static_cast<std::size_t>(shape_[1]) + static_cast<std::size_t>(y)) *
                   static_cast<std::size_t>(shape_[2]) +
               static_cast<std::size_t>(x);
    }

    Shape shape_;
    std::vector<T> data_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

/// FNV-1a digest over shape and raw value bytes.
template <class T>
std::uint64_t digest(const Tensor<T>& t);

/// Throws ContractViolation naming `op` when shapes differ.
void require_same_shape(const Shape& a, const Shape& b, const char* op);

}  // namespace deshadow::nn
