#include "tta/core/functional.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tta/core/error.hpp"
#include "tta/core/ops.hpp"

namespace tta {
namespace {

void validate_distribution(std::span<const double> p, const char* what) {
    double total = 0.0;
    for (double v : p) {
        if (v < 0.0 || std::isnan(v)) throw Error(std::string(what) + ": negative or NaN probability");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-6) {
        throw Error(std::string(what) + ": probabilities sum to " + std::to_string(total));
    }
}

}  // namespace

std::vector<double> stable_softmax(std::span<const double> logits, double tau) {
    if (!(tau > 0.0)) throw Error("stable_softmax: temperature must be positive");
    if (logits.empty()) return {};
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double z = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        p[k] = std::exp((logits[k] - mx) / tau);
        z += p[k];
    }
    for (double& v : p) v /= z;
    return p;
}

double entropy(std::span<const double> p) {
    validate_distribution(p, "entropy");
    double h = 0.0;
    for (double v : p) h -= v * std::log(std::max(v, ops::kLogFloor));
    return h;
}

double cross_entropy(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw ShapeError("cross_entropy: length mismatch");
    validate_distribution(p, "cross_entropy");
    validate_distribution(q, "cross_entropy");
    double ce = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) ce -= p[k] * std::log(std::max(q[k], ops::kLogFloor));
    return ce;
}

std::size_t argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k] > values[best]) best = k;
    return best;
}

}  // namespace tta
