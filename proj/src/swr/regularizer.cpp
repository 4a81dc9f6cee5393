#include "tta/swr/regularizer.hpp"

#include <cmath>

#include "tta/core/error.hpp"

namespace tta::swr {
namespace {

// Calls fn(unit, flat offset within the snapshot, penalty) for each parametric unit.
template <typename ModelT, typename Fn>
void for_each_penalized(ModelT& model, const ThetaStar& theta_star, const PenaltyVector& penalty, Fn fn) {
    check_layout(penalty, model);
    auto& units = model.units();
    if (theta_star.units.size() != units.size()) throw Error("theta*: unit count does not match the model");
    std::size_t l = 0;
    for (std::size_t u = 0; u < units.size(); ++u) {
        if (theta_star.units[u].size() != units[u].parameter_count()) {
            throw Error("theta*: layout of unit '" + units[u].name + "' does not match the model");
        }
        if (!units[u].parametric()) continue;
        fn(units[u], theta_star.units[u], penalty.penalties[l++]);
    }
}

}  // namespace

ThetaStar ThetaStar::capture(const Model& model, ThetaStarPolicy policy) {
    ThetaStar ts;
    ts.policy = policy;
    for (const LayerUnit& u : model.units()) ts.units.push_back(flat_parameters(u));
    return ts;
}

double swr_value(const Model& model, const ThetaStar& theta_star, const PenaltyVector& penalty, double lambda) {
    double total = 0.0;
    for_each_penalized(model, theta_star, penalty, [&](const LayerUnit& unit, const std::vector<double>& anchor, double w) {
        double sq = 0.0;
        std::size_t k = 0;
        for (const Tensor& p : unit.params)
            for (double v : p.data) {
                const double d = v - anchor[k++];
                sq += d * d;
            }
        total += w * sq;
    });
    return lambda * total;
}

double swr_regularization(Model& model, const ThetaStar& theta_star, const PenaltyVector& penalty, double lambda) {
    double total = 0.0;
    for_each_penalized(model, theta_star, penalty, [&](LayerUnit& unit, const std::vector<double>& anchor, double w) {
        double sq = 0.0;
        std::size_t k = 0;
        for (Tensor& p : unit.params) {
            auto& g = p.ensure_grad();
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double d = p.data[i] - anchor[k++];
                sq += d * d;
                g[i] += 2.0 * lambda * w * d;
            }
        }
        total += w * sq;
    });
    return lambda * total;
}

void swr_proximal_step(Model& model, const ThetaStar& theta_star, const PenaltyVector& penalty, double lambda,
                       double lr) {
    for_each_penalized(model, theta_star, penalty, [&](LayerUnit& unit, const std::vector<double>&, double) {
        for (const Tensor& p : unit.params) {
            if (!p.grad) throw Error("swr step: unit '" + unit.name + "' has no gradients");
            for (double g : *p.grad)
                if (!std::isfinite(g)) throw NumericError("swr step: non-finite gradient in unit '" + unit.name + "'");
        }
    });
    for_each_penalized(model, theta_star, penalty, [&](LayerUnit& unit, const std::vector<double>& anchor, double w) {
        const double c = 2.0 * lr * lambda * w;
        std::size_t k = 0;
        for (Tensor& p : unit.params)
            for (std::size_t i = 0; i < p.size(); ++i, ++k) {
                const double plain = p.data[i] - lr * (*p.grad)[i];
                p.data[i] = c == 0.0 ? plain : (plain + c * anchor[k]) / (1.0 + c);
            }
    });
}

void advance_theta_star(ThetaStar& theta_star, const Model& model) {
    if (theta_star.policy == ThetaStarPolicy::update_prev) theta_star = ThetaStar::capture(model, theta_star.policy);
}

}  // namespace tta::swr
