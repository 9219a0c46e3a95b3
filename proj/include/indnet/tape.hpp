#pragma once

// Reverse-mode differentiation trace. Every primitive appends a node holding
// its output value plus forward and backward closures; backward() walks the
// nodes in reverse record order. A tape belongs to one thread.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "indnet/errors.hpp"
#include "indnet/tensor.hpp"

namespace indnet {

template <typename T>
class Tape;

/// Handle to a node on a tape.
template <typename T>
class Var {
  public:
    Var() = default;
    Var(Tape<T>* tape, std::size_t id) : tape_(tape), id_(id) {}

    Tape<T>& tape() const { return *tape_; }
    std::size_t id() const noexcept { return id_; }
    bool valid() const noexcept { return tape_ != nullptr; }

    const Shape& shape() const { return tape_->shape(id_); }
    std::size_t size() const { return shape().size(); }
    std::span<const T> value() const { return tape_->value(id_); }
    T item() const;
    T operator[](std::size_t i) const { return value()[i]; }
    std::vector<T> to_vector() const {
        auto v = value();
        return {v.begin(), v.end()};
    }
    /// Gradient of the last backward() loss w.r.t. this node; zeros if unreached.
    std::vector<T> grad() const;

  private:
    Tape<T>* tape_ = nullptr;
    std::size_t id_ = 0;
};

template <typename T>
class Tape {
  public:
    using Step = std::function<void(Tape&, std::size_t self)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var<T> constant(Shape shape, std::vector<T> values);
    Var<T> zeros(Shape shape) {
        const std::size_t n = shape.size();
        return constant(std::move(shape), std::vector<T>(n, T(0)));
    }
    Var<T> scalar(T v) { return constant(Shape{1}, {v}); }

    /// Leaf viewing a parameter's storage. Recording the same parameter twice
    /// returns the same node. The parameter must outlive the tape and must not
    /// be modified while the tape is in use.
    Var<T> parameter(const Parameter<T>& p);

    /// Appends a primitive. `forward` fills the node's value from its inputs and
    /// runs immediately; `backward` adds the node's gradient into its inputs.
    Var<T> record(Shape shape, std::vector<std::size_t> inputs, Step forward, Step backward);

    /// Populates node gradients of `loss`, which must be shape {1}.
    void backward(Var<T> loss);

    /// Adds parameter-leaf gradients from the last backward() into the owners'
    /// grad buffers. Parameters are matched by address; others are ignored.
    void accumulate_grads(std::span<Parameter<T>* const> params) const;

    /// Re-executes every recorded primitive in order from the current leaf values.
    void replay();

    std::size_t size() const noexcept { return nodes_.size(); }

    const Shape& shape(std::size_t id) const { return nodes_[id].shape; }
    std::span<const T> value(std::size_t id) const {
        const Node& n = nodes_[id];
        return {n.external != nullptr ? n.external : n.storage.data(), n.shape.size()};
    }
    std::span<T> out(std::size_t id) { return nodes_[id].storage; }
    bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
    bool has_grad(std::size_t id) const { return !nodes_[id].grad.empty(); }
    /// Gradient buffer of a node, allocated as zeros on first access.
    std::span<T> grad(std::size_t id);
    const std::vector<std::size_t>& inputs(std::size_t id) const { return nodes_[id].inputs; }

  private:
    struct Node {
        Shape shape;
        std::vector<T> storage;
        const T* external = nullptr;
        const Parameter<T>* param = nullptr;
        std::vector<T> grad;
        std::vector<std::size_t> inputs;
        Step forward;
        Step backward;
        bool requires_grad = false;
    };

    std::vector<Node> nodes_;
    std::unordered_map<const Parameter<T>*, std::size_t> param_nodes_;
};

template <typename T>
T Var<T>::item() const {
    if (!shape().is_scalar()) throw DimensionError("item() on non-scalar tensor of shape " + shape().str());
    return value()[0];
}

template <typename T>
std::vector<T> Var<T>::grad() const {
    if (!tape_->has_grad(id_)) return std::vector<T>(size(), T(0));
    auto g = tape_->grad(id_);
    return {g.begin(), g.end()};
}

template <typename T>
Var<T> Tape<T>::constant(Shape shape, std::vector<T> values) {
    if (values.size() != shape.size()) {
        throw DimensionError("constant of shape " + shape.str() + " given " + std::to_string(values.size()) +
                             " values");
    }
    Node n;
    n.shape = std::move(shape);
    n.storage = std::move(values);
    nodes_.push_back(std::move(n));
    return {this, nodes_.size() - 1};
}

template <typename T>
Var<T> Tape<T>::parameter(const Parameter<T>& p) {
    if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return {this, it->second};
    if (p.value.size() != p.shape.size()) {
        throw DimensionError("parameter " + p.name + " holds " + std::to_string(p.value.size()) +
                             " values for shape " + p.shape.str());
    }
    Node n;
    n.shape = p.shape;
    n.external = p.value.data();
    n.param = &p;
    n.requires_grad = p.trainable;
    nodes_.push_back(std::move(n));
    param_nodes_.emplace(&p, nodes_.size() - 1);
    return {this, nodes_.size() - 1};
}

template <typename T>
Var<T> Tape<T>::record(Shape shape, std::vector<std::size_t> inputs, Step forward, Step backward) {
    Node n;
    n.storage.assign(shape.size(), T(0));
    n.shape = std::move(shape);
    for (std::size_t in : inputs) n.requires_grad = n.requires_grad || nodes_[in].requires_grad;
    n.inputs = std::move(inputs);
    n.forward = std::move(forward);
    if (n.requires_grad) n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    const std::size_t id = nodes_.size() - 1;
    nodes_[id].forward(*this, id);
    return {this, id};
}

template <typename T>
std::span<T> Tape<T>::grad(std::size_t id) {
    Node& n = nodes_[id];
    if (n.grad.empty()) n.grad.assign(n.shape.size(), T(0));
    return n.grad;
}

template <typename T>
void Tape<T>::backward(Var<T> loss) {
    if (&loss.tape() != this) throw ContractError("backward: loss belongs to another tape");
    if (!loss.shape().is_scalar()) {
        throw ContractError("backward: loss must be scalar, got shape " + loss.shape().str());
    }
    for (Node& n : nodes_) n.grad.clear();
    grad(loss.id())[0] = T(1);
    for (std::size_t id = loss.id() + 1; id-- > 0;) {
        Node& n = nodes_[id];
        if (n.grad.empty() || !n.backward) continue;
        n.backward(*this, id);
    }
}

template <typename T>
void Tape<T>::accumulate_grads(std::span<Parameter<T>* const> params) const {
    for (Parameter<T>* p : params) {
        auto it = param_nodes_.find(p);
        if (it == param_nodes_.end()) continue;
        const Node& n = nodes_[it->second];
        if (n.grad.empty() || !p->trainable) continue;
        if (p->grad.size() != n.grad.size()) p->grad.assign(n.grad.size(), T(0));
        for (std::size_t i = 0; i < n.grad.size(); ++i) p->grad[i] += n.grad[i];
    }
}

template <typename T>
void Tape<T>::replay() {
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        Node& n = nodes_[id];
        if (n.param != nullptr) n.external = n.param->value.data();
        if (n.forward) {
            std::fill(n.storage.begin(), n.storage.end(), T(0));
            n.forward(*this, id);
        }
    }
}

}  // namespace indnet
