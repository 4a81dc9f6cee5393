#include "tta/core/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "tta/core/rng.hpp"

namespace tta {

std::vector<GradProbe> gradient_probes(std::span<Tensor* const> params, const LossFn& loss_fn,
                                       const GradCheckOptions& options) {
    for (Tensor* p : params) p->zero_grad();
    loss_fn(true);

    std::vector<std::pair<std::size_t, std::size_t>> probes;
    for (std::size_t t = 0; t < params.size(); ++t)
        for (std::size_t i = 0; i < params[t]->size(); ++i) probes.emplace_back(t, i);
    if (probes.size() > options.max_probes) {
        Rng rng(options.seed);
        auto order = rng.permutation(probes.size());
        order.resize(options.max_probes);
        std::sort(order.begin(), order.end());
        std::vector<std::pair<std::size_t, std::size_t>> picked;
        for (std::size_t k : order) picked.push_back(probes[k]);
        probes = std::move(picked);
    }

    std::vector<GradProbe> out;
    for (auto [t, i] : probes) {
        Tensor& p = *params[t];
        const double original = p.data[i];
        p.data[i] = original + options.eps;
        const double up = loss_fn(false);
        p.data[i] = original - options.eps;
        const double down = loss_fn(false);
        p.data[i] = original;
        const double numeric = (up - down) / (2.0 * options.eps);
        const double analytic = (*p.grad)[i];
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        out.push_back({t, i, analytic, numeric, std::abs(analytic - numeric) / denom});
    }
    return out;
}

double numeric_gradient_check(std::span<Tensor* const> params, const LossFn& loss_fn,
                              const GradCheckOptions& options) {
    double worst = 0.0;
    for (const GradProbe& p : gradient_probes(params, loss_fn, options)) worst = std::max(worst, p.rel_error);
    return worst;
}

double numeric_gradient_check(Model& model, const LossFn& loss_fn, const GradCheckOptions& options) {
    auto params = model.net().parameters();
    return numeric_gradient_check(std::span<Tensor* const>(params), loss_fn, options);
}

}  // namespace tta
