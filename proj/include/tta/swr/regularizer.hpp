#pragma once

#include <vector>

#include "tta/core/model.hpp"
#include "tta/swr/penalty.hpp"

namespace tta::swr {

/// Parameter snapshot the regularizer pulls toward. One flat vector per unit
/// (empty for activation units).
struct ThetaStar {
    std::vector<std::vector<double>> units;
    ThetaStarPolicy policy = ThetaStarPolicy::update_prev;

    static ThetaStar capture(const Model& model, ThetaStarPolicy policy);
    bool operator==(const ThetaStar&) const = default;
};

/// Returns lambda * sum_l w_l * ||theta_l - theta*_l||^2 and adds
/// 2 * lambda * w_l * (theta_l - theta*_l) into each parameter's gradient.
double swr_regularization(Model& model, const ThetaStar& theta_star, const PenaltyVector& penalty, double lambda);

/// Loss value only; gradients untouched.
double swr_value(const Model& model, const ThetaStar& theta_star, const PenaltyVector& penalty, double lambda);

/// One SGD step on (loss whose gradient sits in the parameters) + regularizer,
/// taken implicitly in the regularizer:
///   theta <- (theta - lr * g + c * theta*) / (1 + c),  c = 2 * lr * lambda * w_l
/// which minimizes the regularizer plus the linearized loss around theta.
/// With c = 0 this is exactly apply_update. Gradients are checked for
/// finiteness before any parameter moves.
void swr_proximal_step(Model& model, const ThetaStar& theta_star, const PenaltyVector& penalty, double lambda,
                       double lr);

/// update_prev: re-capture the current parameters; freeze_source: unchanged.
void advance_theta_star(ThetaStar& theta_star, const Model& model);

}  // namespace tta::swr
