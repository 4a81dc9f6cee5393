#pragma once

#include "tta/core/tape.hpp"

namespace tta::adapt {

/// w_ent * (1/N) sum_i H(p_i) - w_div * H(mean_i p_i) on softmax outputs.
Var main_entropy_loss(Tape& tape, Var probs, double w_ent, double w_div);

}  // namespace tta::adapt
