// SPDX-License-Identifier: Apache-2.0
#include "deshadow/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace deshadow::nn {

std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

std::size_t shape_numel(const Shape& shape) {
    std::size_t n = 1;
    for (int e : shape) {
        if (e <= 0) throw ContractViolation("tensor extents must be positive, got " + shape_str(shape));
        n *= static_cast<std::size_t>(e);
    }
    return n;
}

void require_same_shape(const Shape& a, const Shape& b, const char* op) {
    if (a != b) throw ContractViolation(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
}

template <class T>
Tensor<T>::Tensor(Shape shape, T fill) : shape_(std::move(shape)), data_(shape_numel(shape_), fill) {}

template <class T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_numel(shape_))
        throw ContractViolation("tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                                shape_str(shape_));
}

template <class T>
void Tensor<T>::fill(T value) {
    std::fill(data_.begin(), data_.end(), value);
}

template <class T>
bool Tensor<T>::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
}

template <class T>
bool Tensor<T>::bit_equal(const Tensor& other) const noexcept {
    return shape_ == other.shape_ &&
           (data_.empty() || std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(T)) == 0);
}

template <class T>
std::uint64_t digest(const Tensor<T>& t) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (int e : t.shape()) feed(&e, sizeof e);
    feed(t.ptr(), t.size() * sizeof(T));
    return h;
}

template std::uint64_t digest(const Tensor<float>&);
template std::uint64_t digest(const Tensor<double>&);

template class Tensor<float>;
template class Tensor<double>;

}  // namespace deshadow::nn
