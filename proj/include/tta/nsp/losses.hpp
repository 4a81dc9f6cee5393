#pragma once

#include <span>

#include "tta/core/tape.hpp"

namespace tta::nsp {

/// (1/N) sum_i [CE(y_i, p_i) + CE(y_i, p'_i)] with one-hot targets y.
Var embedding_loss(Tape& tape, Var probs, Var probs_shifted, std::span<const int> labels);

/// w_ent * (1/N) sum_i H(p_i) - w_div * H(mean_i p_i).
Var aux_entropy_loss(Tape& tape, Var probs, double w_ent, double w_div);

/// -(1/N) sum_i sum_k p_ik log p'_ik. With stop_gradient the original
/// prediction p is a fixed target and only p' receives gradient.
Var aux_selfsup_loss(Tape& tape, Var probs, Var probs_shifted, bool stop_gradient = true);

struct AuxWeights {
    double entropy = 0.8;
    double diversity = 0.25;
    double selfsup = 0.1;
};

/// aux_entropy_loss + selfsup * aux_selfsup_loss.
Var aux_total(Tape& tape, Var probs, Var probs_shifted, const AuxWeights& weights, bool stop_gradient = true);

}  // namespace tta::nsp
