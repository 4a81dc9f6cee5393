#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tta/core/model.hpp"
#include "tta/core/tensor.hpp"

namespace tta {

/// Evaluates the loss at the current parameter values. When `with_grad` is
/// true it must also backpropagate, accumulating into the parameters' grads.
using LossFn = std::function<double(bool with_grad)>;

struct GradCheckOptions {
    double eps = 1e-3;
    /// Upper bound on the number of scalar parameters probed.
    std::size_t max_probes = 400;
    std::uint64_t seed = 0;
};

struct GradProbe {
    std::size_t tensor = 0;
    std::size_t index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_error = 0.0;
};

/// Per-probe comparison behind numeric_gradient_check. After the single
/// with_grad call, loss_fn is called twice per probe (+eps, then -eps), in
/// probe order.
std::vector<GradProbe> gradient_probes(std::span<Tensor* const> params, const LossFn& loss_fn,
                                       const GradCheckOptions& options = {});

/// Central differences against the analytic gradient on a sampled subset of
/// scalars. Returns max |a - n| / max(|a|, |n|, 1e-8). Parameter values are
/// restored bit-exactly.
double numeric_gradient_check(std::span<Tensor* const> params, const LossFn& loss_fn,
                              const GradCheckOptions& options = {});

double numeric_gradient_check(Model& model, const LossFn& loss_fn, const GradCheckOptions& options = {});

}  // namespace tta
