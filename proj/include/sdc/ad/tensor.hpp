#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sdc::ad {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

// Graph recording is on by default; NoGradGuard turns it off for the current
// thread (inference, frozen branches, metric evaluation).
bool grad_enabled();

class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool previous_;
};

template <typename T>
struct Node {
    Shape shape;
    std::vector<T> value;
    std::vector<T> grad;  // empty until something flows into it
    bool requires_grad = false;
    bool released = false;  // set once backward has consumed this node
    const char* op = "leaf";
    std::vector<std::shared_ptr<Node>> inputs;
    // Reads this->grad and accumulates into the inputs that require grad.
    std::function<void(Node&)> backward_fn;

    bool is_leaf() const { return op == std::string_view("leaf"); }
    std::span<T> grad_buffer();
};

// Shared handle to a node. Copies alias the same storage.
template <typename T>
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, T value, bool requires_grad = false);
    static Tensor from(Shape shape, std::vector<T> data, bool requires_grad = false);
    static Tensor scalar(T value);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    std::size_t dim(std::size_t i) const { return node_->shape.at(i); }
    std::size_t rank() const { return node_->shape.size(); }
    std::size_t numel() const { return node_->value.size(); }

    std::span<const T> data() const { return node_->value; }
    // Direct write access, meant for leaves (initialisation, optimiser steps).
    std::span<T> mutable_data() { return node_->value; }
    T item() const;

    bool requires_grad() const { return node_->requires_grad; }
    void set_requires_grad(bool on);
    bool has_grad() const { return !node_->grad.empty(); }
    std::span<const T> grad() const { return node_->grad; }
    std::span<T> mutable_grad() { return node_->grad_buffer(); }
    void zero_grad();

    // Reverse-mode sweep from this scalar. Throws NotAScalar for non-scalars
    // and StaleGraph when part of the graph was already consumed.
    void backward();

    // Same values, cut out of the graph (stop-gradient).
    Tensor detach() const;

    Node<T>* node() const { return node_.get(); }
    const std::shared_ptr<Node<T>>& shared() const { return node_; }

private:
    std::shared_ptr<Node<T>> node_;
};

// Builds a result node. The backward closure is attached only when recording
// is enabled and at least one input requires grad.
template <typename T>
Tensor<T> make_result(const char* op, Shape shape, std::vector<T> value, std::vector<Tensor<T>> inputs,
                      std::function<void(Node<T>&)> backward_fn);

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace sdc::ad
