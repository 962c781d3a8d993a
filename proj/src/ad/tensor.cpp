#include "sdc/ad/tensor.hpp"

#include <cmath>
#include <unordered_set>

#include "sdc/error.hpp"

namespace sdc::ad {
namespace {
thread_local bool g_grad_enabled = true;
}

std::size_t numel(const Shape& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

std::string to_string(const Shape& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? ", " : "") + std::to_string(shape[i]);
    return s + "]";
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

template <typename T>
std::span<T> Node<T>::grad_buffer() {
    if (grad.empty()) grad.assign(value.size(), T(0));
    return grad;
}

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
    return full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T value, bool requires_grad) {
    std::vector<T> data(ad::numel(shape), value);
    return from(std::move(shape), std::move(data), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::from(Shape shape, std::vector<T> data, bool requires_grad) {
    if (ad::numel(shape) != data.size())
        fail(ErrorKind::ShapeMismatch, "tensor data of size " + std::to_string(data.size()) +
                                           " does not fill shape " + ad::to_string(shape));
    auto node = std::make_shared<Node<T>>();
    node->shape = std::move(shape);
    node->value = std::move(data);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value) {
    return from({1}, {value});
}

template <typename T>
T Tensor<T>::item() const {
    if (numel() != 1) fail(ErrorKind::NotAScalar, "item() on tensor of shape " + ad::to_string(shape()));
    return node_->value[0];
}

template <typename T>
void Tensor<T>::set_requires_grad(bool on) {
    node_->requires_grad = on;
}

template <typename T>
void Tensor<T>::zero_grad() {
    std::fill(node_->grad.begin(), node_->grad.end(), T(0));
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
    auto node = std::make_shared<Node<T>>();
    node->shape = node_->shape;
    node->value = node_->value;
    return Tensor(std::move(node));
}

template <typename T>
void Tensor<T>::backward() {
    if (numel() != 1) fail(ErrorKind::NotAScalar, "backward() needs a scalar, got " + ad::to_string(shape()));
    if (!node_->requires_grad) return;
    if (node_->is_leaf()) {
        node_->grad_buffer()[0] += T(1);
        return;
    }

    // Iterative post-order DFS gives a topological order (inputs first). The
    // order holds owning pointers because releasing a node drops its inputs.
    std::vector<std::shared_ptr<Node<T>>> order;
    std::unordered_set<Node<T>*> seen;
    std::vector<std::pair<std::shared_ptr<Node<T>>, std::size_t>> stack{{node_, 0}};
    seen.insert(node_.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (node->released)
            fail(ErrorKind::StaleGraph, std::string("backward through already-consumed '") + node->op +
                                            "' node; run the forward pass again");
        if (next < node->inputs.size()) {
            const auto& child = node->inputs[next++];
            if (child->requires_grad && !child->is_leaf() && seen.insert(child.get()).second)
                stack.emplace_back(child, 0);
            continue;
        }
        order.push_back(node);
        stack.pop_back();
    }

    auto& root_grad = node_->grad;
    root_grad.assign(1, T(1));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node<T>* node = it->get();
        if (node->backward_fn && !node->grad.empty()) node->backward_fn(*node);
        node->backward_fn = nullptr;
        node->released = true;
        node->grad.clear();
        node->grad.shrink_to_fit();
        node->inputs.clear();
    }
}

template <typename T>
Tensor<T> make_result(const char* op, Shape shape, std::vector<T> value, std::vector<Tensor<T>> inputs,
                      std::function<void(Node<T>&)> backward_fn) {
    auto node = std::make_shared<Node<T>>();
    node->op = op;
    node->shape = std::move(shape);
    node->value = std::move(value);
    if (grad_enabled()) {
        bool needs = false;
        for (const auto& in : inputs) needs = needs || in.requires_grad();
        if (needs) {
            node->requires_grad = true;
            node->backward_fn = std::move(backward_fn);
            node->inputs.reserve(inputs.size());
            for (auto& in : inputs) node->inputs.push_back(in.shared());
        }
    }
    return Tensor<T>(std::move(node));
}

template struct Node<float>;
template struct Node<double>;
template class Tensor<float>;
template class Tensor<double>;
template Tensor<float> make_result(const char*, Shape, std::vector<float>, std::vector<Tensor<float>>,
                                   std::function<void(Node<float>&)>);
template Tensor<double> make_result(const char*, Shape, std::vector<double>, std::vector<Tensor<double>>,
                                    std::function<void(Node<double>&)>);

}  // namespace sdc::ad
