#pragma once

#include <span>
#include <vector>

#include "tta/core/tape.hpp"

namespace tta::ops {

/// Floor applied inside every log of a probability.
inline constexpr double kLogFloor = 1e-12;

// Layers ---------------------------------------------------------------------

/// x[N x in] * W[out x in]^T + b[out]
Var linear(Tape& tape, Var x, Var weight, Var bias);

/// 3x3 convolution, stride 1, zero padding 1. x[N x C x H x W], W[O x C x 3 x 3], b[O].
Var conv3x3(Tape& tape, Var x, Var weight, Var bias);

struct BatchNormOptions {
    bool use_batch_stats = true;
    /// Running estimates; read when use_batch_stats is false, blended into when update_running.
    std::vector<double>* running_mean = nullptr;
    std::vector<double>* running_var = nullptr;
    bool update_running = false;
    double momentum = 0.1;
    double eps = 1e-5;
};

/// Per-feature normalization of x[N x F] or per-channel of x[N x C x H x W].
/// Batch statistics use the population variance; the running variance is
/// updated with the unbiased estimate.
Var batch_norm(Tape& tape, Var x, Var gamma, Var beta, const BatchNormOptions& opts);

Var relu(Tape& tape, Var x);
/// 2x2 average pooling with stride 2; H and W must be even.
Var avg_pool2(Tape& tape, Var x);
/// [N x ...] -> [N x prod(...)]
Var flatten(Tape& tape, Var x);

// Arithmetic -----------------------------------------------------------------

Var add(Tape& tape, Var a, Var b);
Var scale(Tape& tape, Var a, double factor);
Var sum(Tape& tape, Var a);
Var mean(Tape& tape, Var a);
/// Same value, no gradient flows back through it.
Var detach(Tape& tape, Var a);

// Probabilistic heads ----------------------------------------------------------

/// Row-wise softmax(x / tau).
Var softmax(Tape& tape, Var logits, double tau = 1.0);

/// Row i, column k: cos(z_i, prototypes_k) / tau. Prototypes are constants.
/// Rows (or prototypes) with norm below 1e-12 have similarity 0.
Var cosine_logits(Tape& tape, Var z, const Tensor& prototypes, double tau);

/// (1/N) sum_i H(p_i) with H(p) = -sum_k p_k log max(p_k, kLogFloor).
Var mean_entropy(Tape& tape, Var probs);

/// Batch-mean distribution [1 x C].
Var mean_rows(Tape& tape, Var probs);

/// (1/N) sum_i -sum_k target_ik log max(q_ik, kLogFloor).
Var cross_entropy(Tape& tape, Var target, Var q);

/// Mean negative log-likelihood of integer labels under softmax(logits).
Var softmax_cross_entropy(Tape& tape, Var logits, std::span<const int> labels);

}  // namespace tta::ops
