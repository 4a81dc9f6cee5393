#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tta {

/// p_k = exp((x_k - max x) / tau) / sum. Throws for tau <= 0.
std::vector<double> stable_softmax(std::span<const double> logits, double tau = 1.0);

/// Natural-log entropy; terms use log max(p, 1e-12), so 0 log 0 = 0.
/// Throws on negative entries or when p does not sum to 1 within 1e-6.
double entropy(std::span<const double> p);

/// -sum_k p_k log max(q_k, 1e-12); same validation as entropy().
double cross_entropy(std::span<const double> p, std::span<const double> q);

/// Index of the largest entry; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> values);

}  // namespace tta
