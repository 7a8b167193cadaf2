// SPDX-License-Identifier: Apache-2.0
//
// Reverse-mode differentiation over a dynamically recorded graph. Every op
// in ops.hpp returns a Var whose node remembers its parents and a closure
// that pushes the node's gradient into them. Nodes that do not depend on any
// grad-requiring leaf record nothing, so a frozen branch runs graph-free.
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "deshadow/nn/tensor.hpp"

namespace deshadow::nn {

template <class T>
struct Node {
    Tensor<T> value;
    Tensor<T> grad;  // allocated on first accumulation
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;

    /// Adds `g` into this node's grad, allocating it on first use.
    void accumulate(const Tensor<T>& g);
    Tensor<T>& grad_buffer();
};

/// Handle to a graph node. Copies share the node.
template <class T>
class Var {
public:
    Var() = default;
    explicit Var(Tensor<T> value, bool requires_grad = false);

    static Var from_node(std::shared_ptr<Node<T>> node) {
        Var v;
        v.node_ = std::move(node);
        return v;
    }

    bool defined() const noexcept { return static_cast<bool>(node_); }
    const Tensor<T>& value() const { return node_->value; }
    Tensor<T>& mutable_value() { return node_->value; }
    const Shape& shape() const { return node_->value.shape(); }
    const Tensor<T>& grad() const { return node_->grad; }
    bool requires_grad() const noexcept { return node_ && node_->requires_grad; }
    void set_requires_grad(bool on) { node_->requires_grad = on; }
    const std::shared_ptr<Node<T>>& node() const noexcept { return node_; }

    /// Scalar value of a single-element tensor.
    T item() const;

    /// Clears the accumulated gradient (keeps the buffer).
    void zero_grad();

private:
    std::shared_ptr<Node<T>> node_;
};

/// True while graph recording is enabled on this thread.
bool grad_enabled() noexcept;

/// Disables graph recording for its lifetime (evaluation, frozen forwards).
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool previous_;
};

/// Builds the output node of an op. The backward closure is attached only
/// when recording is enabled and some parent requires grad.
template <class T>
Var<T> make_result(Tensor<T> value, std::vector<Var<T>> parents, std::function<void(Node<T>&)> backward_fn);

/// Runs reverse-mode accumulation from a scalar loss into every reachable
/// grad-requiring leaf. Leaf grads accumulate across calls.
template <class T>
void backward(const Var<T>& loss);

/// Named leaf tensor owned by a model.
template <class T>
class Parameter {
public:
    Parameter(std::string name, Tensor<T> value, bool frozen = false);

    const std::string& name() const noexcept { return name_; }
    const Var<T>& var() const noexcept { return var_; }
    const Tensor<T>& value() const { return var_.value(); }
    Tensor<T>& mutable_value() { return var_.mutable_value(); }
    const Tensor<T>& grad() const { return var_.grad(); }
    Tensor<T>& mutable_grad() { return var_.node()->grad; }
    bool frozen() const noexcept { return frozen_; }
    void set_frozen(bool frozen);
    void zero_grad() { var_.zero_grad(); }

private:
    std::string name_;
    Var<T> var_;
    bool frozen_;
};

/// Insertion-ordered collection of parameters addressed by hierarchical name.
template <class T>
class ParameterStore {
public:
    Parameter<T>& add(std::string name, Tensor<T> value, bool frozen = false);

    bool contains(const std::string& name) const;
    Parameter<T>& get(const std::string& name);
    const Parameter<T>& get(const std::string& name) const;

    std::vector<std::unique_ptr<Parameter<T>>>& items() noexcept { return params_; }
    const std::vector<std::unique_ptr<Parameter<T>>>& items() const noexcept { return params_; }
    std::size_t size() const noexcept { return params_.size(); }
    std::size_t scalar_count() const;

    /// Freezes or unfreezes every parameter whose name starts with `prefix`.
    void set_frozen_prefix(const std::string& prefix, bool frozen);
    void zero_grad();

private:
    std::vector<std::unique_ptr<Parameter<T>>> params_;
};

extern template class Var<float>;
extern template class Var<double>;
extern template class Parameter<float>;
extern template class Parameter<double>;
extern template class ParameterStore<float>;
extern template class ParameterStore<double>;

}  // namespace deshadow::nn
