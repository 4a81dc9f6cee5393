#include "tta/nsp/losses.hpp"

#include <string>

#include "tta/core/error.hpp"
#include "tta/core/ops.hpp"

namespace tta::nsp {
namespace {

void expect_matching(const Tape& tape, Var a, Var b, const char* what) {
    if (tape.value(a).shape != tape.value(b).shape) {
        throw ShapeError(std::string(what) + ": prediction batches differ in shape " + to_string(tape.value(a).shape) +
                         " vs " + to_string(tape.value(b).shape));
    }
}

}  // namespace

Var embedding_loss(Tape& tape, Var probs, Var probs_shifted, std::span<const int> labels) {
    expect_matching(tape, probs, probs_shifted, "embedding_loss");
    const Tensor& p = tape.value(probs);
    if (p.rank() != 2 || labels.size() != p.dim(0)) {
        throw ShapeError("embedding_loss: " + std::to_string(labels.size()) + " labels for predictions " +
                         to_string(p.shape));
    }
    const std::size_t n = p.dim(0), c = p.dim(1);
    Tensor onehot({n, c});
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= c) throw Error("embedding_loss: label out of range");
        onehot.data[i * c + static_cast<std::size_t>(labels[i])] = 1.0;
    }
    const Var y = tape.constant(std::move(onehot));
    return ops::add(tape, ops::cross_entropy(tape, y, probs), ops::cross_entropy(tape, y, probs_shifted));
}

Var aux_entropy_loss(Tape& tape, Var probs, double w_ent, double w_div) {
    const Tensor& p = tape.value(probs);
    if (p.rank() != 2 || p.dim(0) == 0) throw Error("aux_entropy_loss: empty batch");
    const Var individual = ops::scale(tape, ops::mean_entropy(tape, probs), w_ent);
    const Var diversity = ops::scale(tape, ops::mean_entropy(tape, ops::mean_rows(tape, probs)), -w_div);
    return ops::add(tape, individual, diversity);
}

Var aux_selfsup_loss(Tape& tape, Var probs, Var probs_shifted, bool stop_gradient) {
    expect_matching(tape, probs, probs_shifted, "aux_selfsup_loss");
    return ops::cross_entropy(tape, stop_gradient ? ops::detach(tape, probs) : probs, probs_shifted);
}

Var aux_total(Tape& tape, Var probs, Var probs_shifted, const AuxWeights& weights, bool stop_gradient) {
    const Var ent = aux_entropy_loss(tape, probs, weights.entropy, weights.diversity);
    if (weights.selfsup == 0.0) return ent;
    return ops::add(tape, ent,
                    ops::scale(tape, aux_selfsup_loss(tape, probs, probs_shifted, stop_gradient), weights.selfsup));
}

}  // namespace tta::nsp
