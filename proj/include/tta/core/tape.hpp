#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "tta/core/tensor.hpp"

namespace tta {

/// Handle to a node recorded on a Tape.
struct Var {
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    std::size_t id = npos;
    bool valid() const { return id != npos; }
};

/// Reverse-mode recording of one forward computation.
///
/// Nodes are appended in evaluation order, so the node list is already a
/// topological order. Parameter leaves are bound to a Tensor owned by a
/// network; backward() adds (+=) the leaf gradient into that tensor's grad
/// buffer, leaving parameter values untouched. The bound tensors must outlive
/// the tape.
class Tape {
public:
    /// Receives the tape and the index of the node whose grad is ready.
    using BackwardFn = std::function<void(Tape&, std::size_t)>;

    Var constant(Tensor value);
    Var parameter(Tensor& param);

    Var record(Tensor value, std::vector<Var> parents, BackwardFn backward);

    const Tensor& value(Var v) const;
    bool requires_grad(Var v) const;
    std::size_t size() const { return nodes_.size(); }

    /// Gradient of the most recent backward() w.r.t. node v.
    const std::vector<double>& grad(Var v) const;
    /// Mutable gradient accessor for op implementations.
    std::vector<double>& grad_of(Var v);

    /// Propagates d(scalar)/d(node) and accumulates into bound parameters.
    void backward(Var scalar);

private:
    struct Node {
        Tensor value;
        std::vector<double> grad;
        std::vector<Var> parents;
        BackwardFn backward;
        Tensor* bound = nullptr;
        bool requires_grad = false;
    };

    const Node& node(Var v) const;

    std::vector<Node> nodes_;
};

}  // namespace tta
