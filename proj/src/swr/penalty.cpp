#include "tta/swr/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tta/core/error.hpp"
#include "tta/core/ops.hpp"
#include "tta/core/rng.hpp"

namespace tta::swr {
namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view name, const E (&values)[N], const char* what) {
    for (E v : values)
        if (to_string(v) == name) return v;
    throw Error(std::string("unknown ") + what + " '" + std::string(name) + "'");
}

constexpr Flip kFlips[] = {Flip::none, Flip::vertical, Flip::horizontal};
constexpr ManualCurve kCurves[] = {ManualCurve::none, ManualCurve::constant, ManualCurve::linear_ramp,
                                   ManualCurve::step};
constexpr ThetaStarPolicy kPolicies[] = {ThetaStarPolicy::update_prev, ThetaStarPolicy::freeze_source};

void apply_flip(std::vector<double>& w, Flip flip) {
    if (flip == Flip::vertical)
        for (double& v : w) v = 1.0 - v;
    else if (flip == Flip::horizontal)
        std::reverse(w.begin(), w.end());
}

std::vector<std::string> parametric_names(const Model& model) {
    std::vector<std::string> names;
    for (std::size_t i : model.net().parametric_units()) names.push_back(model.units()[i].name);
    return names;
}

}  // namespace

std::string_view to_string(Flip flip) {
    switch (flip) {
        case Flip::none: return "none";
        case Flip::vertical: return "vertical";
        case Flip::horizontal: return "horizontal";
    }
    return "?";
}

std::string_view to_string(ManualCurve curve) {
    switch (curve) {
        case ManualCurve::none: return "none";
        case ManualCurve::constant: return "constant";
        case ManualCurve::linear_ramp: return "linear_ramp";
        case ManualCurve::step: return "step";
    }
    return "?";
}

std::string_view to_string(ThetaStarPolicy policy) {
    return policy == ThetaStarPolicy::update_prev ? "update_prev" : "freeze_source";
}

Flip parse_flip(std::string_view name) { return parse_enum(name, kFlips, "flip"); }
ManualCurve parse_manual_curve(std::string_view name) { return parse_enum(name, kCurves, "manual curve"); }
ThetaStarPolicy parse_theta_star_policy(std::string_view name) {
    return parse_enum(name, kPolicies, "theta* policy");
}

void SwrVariant::validate() const {
    if (exponent < 1 || exponent > 3) throw Error("swr variant: exponent must be 1, 2 or 3");
    if (manual_curve == ManualCurve::constant && !(constant_value >= 0.0 && constant_value <= 1.0)) {
        throw Error("swr variant: constant curve value must lie in [0, 1]");
    }
}

SwrVariant parse_variant(std::string_view text) {
    SwrVariant v;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error("swr variant: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
        try {
            if (key == "exponent") {
                std::size_t used = 0;
                v.exponent = std::stoi(value, &used);
                if (used != value.size()) throw Error("trailing characters");
            } else if (key == "flip") {
                v.flip = parse_flip(value);
            } else if (key == "curve") {
                v.manual_curve = parse_manual_curve(value);
            } else if (key == "constant") {
                std::size_t used = 0;
                v.constant_value = std::stod(value, &used);
                if (used != value.size()) throw Error("trailing characters");
            } else if (key == "theta_star") {
                v.theta_star_policy = parse_theta_star_policy(value);
            } else {
                throw Error("unknown key");
            }
        } catch (const std::exception& e) {
            throw Error("swr variant: bad entry '" + item + "': " + e.what());
        }
    }
    v.validate();
    return v;
}

std::string format_variant(const SwrVariant& v) {
    std::ostringstream out;
    out.precision(17);
    out << "exponent=" << v.exponent << ",flip=" << to_string(v.flip) << ",curve=" << to_string(v.manual_curve)
        << ",constant=" << v.constant_value << ",theta_star=" << to_string(v.theta_star_policy);
    return out.str();
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ShapeError("cosine_similarity: lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " differ");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (na < 1e-12 || nb < 1e-12) return 0.0;
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

std::vector<double> penalties_from_similarities(std::span<const double> s, const SwrVariant& variant) {
    variant.validate();
    if (s.empty()) throw Error("penalty vector: no parametric units");
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    std::vector<double> w(s.size(), 1.0);
    if (*hi > *lo) {
        const double range = *hi - *lo;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double nu = (s[i] - *lo) / range;
            double p = nu;
            for (int e = 1; e < variant.exponent; ++e) p *= nu;
            w[i] = std::clamp(p, 0.0, 1.0);
        }
    }
    apply_flip(w, variant.flip);
    return w;
}

std::vector<double> manual_penalties(std::size_t units, std::size_t encoder_units, const SwrVariant& variant) {
    variant.validate();
    if (units == 0) throw Error("penalty vector: no parametric units");
    std::vector<double> w(units, 0.0);
    for (std::size_t l = 0; l < units; ++l) {
        switch (variant.manual_curve) {
            case ManualCurve::constant: w[l] = variant.constant_value; break;
            case ManualCurve::linear_ramp:
                w[l] = units == 1 ? 1.0 : static_cast<double>(l) / static_cast<double>(units - 1);
                break;
            case ManualCurve::step: w[l] = l < encoder_units ? 0.0 : 1.0; break;
            case ManualCurve::none: throw Error("manual_penalties: variant has no manual curve");
        }
    }
    apply_flip(w, variant.flip);
    return w;
}

PenaltyVector compute_penalty_vector(const Model& model, const data::Dataset& source,
                                     std::span<const std::size_t> indices, const data::TransformSpec& transform,
                                     const SwrVariant& variant, std::uint64_t seed) {
    variant.validate();
    PenaltyVector out;
    out.unit_names = parametric_names(model);
    out.variant = variant;
    out.n_samples = indices.size();
    const std::size_t units = out.unit_names.size();
    if (units == 0) throw Error("compute_penalty_vector: model has no parametric units");

    if (variant.manual_curve != ManualCurve::none) {
        std::size_t encoder_units = 0;
        for (std::size_t i : model.net().parametric_units()) encoder_units += model.in_encoder(i);
        out.penalties = manual_penalties(units, encoder_units, variant);
        out.similarities = out.penalties;
        return out;
    }
    if (indices.empty()) throw Error("compute_penalty_vector: n_samples must be at least 1");
    transform.validate();

    Model replica = model;
    replica.set_bn_mode(BnMode::running);
    const auto gradients = [&replica](const data::Image& img, int label) {
        const std::vector<data::Image> one = {img};
        const int labels[] = {label};
        replica.zero_grads();
        Tape tape;
        const auto pass = replica.forward(tape, data::stack(one), Mode::eval);
        tape.backward(ops::softmax_cross_entropy(tape, pass.logits, labels));
        return layer_grad_vectors(replica.net()).vectors;
    };

    std::vector<double> sums(units, 0.0);
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const std::size_t i = indices[k];
        if (i >= source.size()) throw Error("compute_penalty_vector: sample index out of range");
        Rng rng(derive_seed(seed, k));
        const auto g = gradients(source.images[i], source.labels[i]);
        const auto g_shifted = gradients(data::apply_transform(source.images[i], transform, rng), source.labels[i]);
        for (std::size_t l = 0; l < units; ++l) sums[l] += cosine_similarity(g[l], g_shifted[l]);
    }
    out.similarities.resize(units);
    for (std::size_t l = 0; l < units; ++l) out.similarities[l] = sums[l] / static_cast<double>(indices.size());
    out.penalties = penalties_from_similarities(out.similarities, variant);
    return out;
}

PenaltyVector compute_penalty_vector(const Model& model, const data::Dataset& source,
                                     const data::TransformSpec& transform, std::size_t n_samples,
                                     const SwrVariant& variant, std::uint64_t seed) {
    if (source.size() == 0) throw Error("compute_penalty_vector: empty source dataset");
    std::vector<std::size_t> indices;
    indices.reserve(n_samples);
    for (std::uint64_t round = 0; indices.size() < n_samples; ++round) {
        Rng rng(derive_seed(seed ^ 0x70656e616c7479ULL, round));
        for (std::size_t i : rng.permutation(source.size())) {
            if (indices.size() == n_samples) break;
            indices.push_back(i);
        }
    }
    return compute_penalty_vector(model, source, indices, transform, variant, seed);
}

void check_layout(const PenaltyVector& penalty, const Model& model) {
    const auto names = parametric_names(model);
    if (names != penalty.unit_names || penalty.penalties.size() != names.size()) {
        throw Error("penalty vector does not match the model's parametric units");
    }
}

}  // namespace tta::swr
