#include "tta/adapt/losses.hpp"

#include "tta/core/error.hpp"
#include "tta/core/ops.hpp"

namespace tta::adapt {

Var main_entropy_loss(Tape& tape, Var probs, double w_ent, double w_div) {
    const Tensor& p = tape.value(probs);
    if (p.rank() != 2 || p.dim(0) == 0) throw Error("main_entropy_loss: empty batch");
    const Var individual = ops::scale(tape, ops::mean_entropy(tape, probs), w_ent);
    const Var diversity = ops::scale(tape, ops::mean_entropy(tape, ops::mean_rows(tape, probs)), -w_div);
    return ops::add(tape, individual, diversity);
}

}  // namespace tta::adapt
