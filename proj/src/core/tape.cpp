#include "tta/core/tape.hpp"

#include <algorithm>
#include <string>

#include "tta/core/error.hpp"

namespace tta {

Var Tape::constant(Tensor value) {
    value.grad.reset();
    nodes_.push_back(Node{std::move(value), {}, {}, {}, nullptr, false});
    return Var{nodes_.size() - 1};
}

Var Tape::parameter(Tensor& param) {
    Tensor copy(param.shape, param.data);
    nodes_.push_back(Node{std::move(copy), {}, {}, {}, &param, true});
    return Var{nodes_.size() - 1};
}

Var Tape::record(Tensor value, std::vector<Var> parents, BackwardFn backward) {
    bool needs = false;
    for (Var p : parents) needs = needs || node(p).requires_grad;
    nodes_.push_back(Node{std::move(value), {}, std::move(parents),
                          needs ? std::move(backward) : BackwardFn{}, nullptr, needs});
    return Var{nodes_.size() - 1};
}

const Tape::Node& Tape::node(Var v) const {
    if (!v.valid() || v.id >= nodes_.size()) {
        throw Error("tape: variable does not belong to this tape");
    }
    return nodes_[v.id];
}

const Tensor& Tape::value(Var v) const { return node(v).value; }

bool Tape::requires_grad(Var v) const { return node(v).requires_grad; }

const std::vector<double>& Tape::grad(Var v) const { return node(v).grad; }

std::vector<double>& Tape::grad_of(Var v) {
    node(v);
    Node& n = nodes_[v.id];
    if (n.grad.size() != n.value.size()) n.grad.assign(n.value.size(), 0.0);
    return n.grad;
}

void Tape::backward(Var scalar) {
    if (!scalar.valid() || scalar.id >= nodes_.size()) {
        throw Error("backward: no forward pass recorded this loss");
    }
    if (nodes_[scalar.id].value.size() != 1) {
        throw ShapeError("backward: loss must be a scalar, got shape " +
                         to_string(nodes_[scalar.id].value.shape));
    }
    for (std::size_t i = 0; i <= scalar.id; ++i) nodes_[i].grad.clear();
    grad_of(scalar)[0] = 1.0;

    for (std::size_t i = scalar.id + 1; i-- > 0;) {
        Node& n = nodes_[i];
        if (!n.requires_grad || n.grad.empty()) continue;
        if (n.backward) n.backward(*this, i);
        if (n.bound) {
            auto& dst = n.bound->ensure_grad();
            for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += n.grad[k];
        }
    }
}

}  // namespace tta
