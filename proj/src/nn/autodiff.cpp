// SPDX-License-Identifier: Apache-2.0
#include "deshadow/nn/autodiff.hpp"

#include <algorithm>
#include <unordered_set>
#include <utility>

namespace deshadow::nn {

namespace {
thread_local bool t_grad_enabled = true;
}

bool grad_enabled() noexcept { return t_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) { t_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

template <class T>
Tensor<T>& Node<T>::grad_buffer() {
    if (grad.empty()) grad = Tensor<T>(value.shape());
    return grad;
}

template <class T>
void Node<T>::accumulate(const Tensor<T>& g) {
    require_same_shape(value.shape(), g.shape(), "accumulate");
    Tensor<T>& buf = grad_buffer();
    T* dst = buf.ptr();
    const T* src = g.ptr();
    for (std::size_t i = 0, n = buf.size(); i < n; ++i) dst[i] += src[i];
}

template <class T>
Var<T>::Var(Tensor<T> value, bool requires_grad) : node_(std::make_shared<Node<T>>()) {
    node_->value = std::move(value);
    node_->requires_grad = requires_grad;
}

template <class T>
T Var<T>::item() const {
    if (node_->value.size() != 1)
        throw ContractViolation("item(): tensor of shape " + shape_str(node_->value.shape()) + " is not a scalar");
    return node_->value[0];
}

template <class T>
void Var<T>::zero_grad() {
    if (node_ && !node_->grad.empty()) node_->grad.fill(T{0});
}

template <class T>
Var<T> make_result(Tensor<T> value, std::vector<Var<T>> parents, std::function<void(Node<T>&)> backward_fn) {
    auto node = std::make_shared<Node<T>>();
    node->value = std::move(value);
    if (grad_enabled()) {
        const bool needs = std::any_of(parents.begin(), parents.end(), [](const Var<T>& p) { return p.requires_grad(); });
        if (needs) {
            node->requires_grad = true;
            node->parents.reserve(parents.size());
            for (auto& p : parents) node->parents.push_back(p.node());
            node->backward_fn = std::move(backward_fn);
        }
    }
    return Var<T>::from_node(std::move(node));
}

template <class T>
void backward(const Var<T>& loss) {
    if (!loss.defined()) throw ContractViolation("backward: undefined loss");
    if (loss.value().size() != 1)
        throw ContractViolation("backward: loss must be scalar, got shape " + shape_str(loss.shape()));
    if (!loss.requires_grad()) throw ContractViolation("backward: loss has no recorded forward graph");

    // Iterative post-order DFS gives a topological order (parents first).
    std::vector<Node<T>*> order;
    std::unordered_set<Node<T>*> visited;
    std::vector<std::pair<Node<T>*, std::size_t>> stack;
    stack.emplace_back(loss.node().get(), 0);
    visited.insert(loss.node().get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node<T>* parent = node->parents[next++].get();
            if (parent->requires_grad && visited.insert(parent).second) stack.emplace_back(parent, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    loss.node()->accumulate(Tensor<T>(loss.shape(), T{1}));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node<T>* node = *it;
        if (node->backward_fn && !node->grad.empty()) node->backward_fn(*node);
    }
    // Release interior gradients; leaves keep theirs for the optimizer.
    for (Node<T>* node : order)
        if (node->backward_fn) node->grad = Tensor<T>();
}

template <class T>
Parameter<T>::Parameter(std::string name, Tensor<T> value, bool frozen)
    : name_(std::move(name)), var_(std::move(value), !frozen), frozen_(frozen) {}

template <class T>
void Parameter<T>::set_frozen(bool frozen) {
    frozen_ = frozen;
    var_.set_requires_grad(!frozen);
}

template <class T>
Parameter<T>& ParameterStore<T>::add(std::string name, Tensor<T> value, bool frozen) {
    if (contains(name)) throw ContractViolation("duplicate parameter name: " + name);
    params_.push_back(std::make_unique<Parameter<T>>(std::move(name), std::move(value), frozen));
    return *params_.back();
}

template <class T>
bool ParameterStore<T>::contains(const std::string& name) const {
    return std::any_of(params_.begin(), params_.end(), [&](const auto& p) { return p->name() == name; });
}

template <class T>
Parameter<T>& ParameterStore<T>::get(const std::string& name) {
    for (auto& p : params_)
        if (p->name() == name) return *p;
    throw ContractViolation("unknown parameter: " + name);
}

template <class T>
const Parameter<T>& ParameterStore<T>::get(const std::string& name) const {
    for (const auto& p : params_)
        if (p->name() == name) return *p;
    throw ContractViolation("unknown parameter: " + name);
}

template <class T>
std::size_t ParameterStore<T>::scalar_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p->value().size();
    return n;
}

template <class T>
void ParameterStore<T>::set_frozen_prefix(const std::string& prefix, bool frozen) {
    for (auto& p : params_)
        if (p->name().starts_with(prefix)) p->set_frozen(frozen);
}

template <class T>
void ParameterStore<T>::zero_grad() {
    for (auto& p : params_) p->zero_grad();
}

template struct Node<float>;
template struct Node<double>;
template class Var<float>;
template class Var<double>;
template class Parameter<float>;
template class Parameter<double>;
template class ParameterStore<float>;
template class ParameterStore<double>;
template Var<float> make_result(Tensor<float>, std::vector<Var<float>>, std::function<void(Node<float>&)>);
template Var<double> make_result(Tensor<double>, std::vector<Var<double>>, std::function<void(Node<double>&)>);
template void backward(const Var<float>&);
template void backward(const Var<double>&);

}  // namespace deshadow::nn
