#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tta/core/digest.hpp"
#include "tta/core/model.hpp"
#include "tta/data/dataset.hpp"
#include "tta/data/transform.hpp"

namespace tta::swr {

enum class Flip : std::uint8_t { none = 0, vertical = 1, horizontal = 2 };
enum class ManualCurve : std::uint8_t { none = 0, constant = 1, linear_ramp = 2, step = 3 };
enum class ThetaStarPolicy : std::uint8_t { update_prev = 0, freeze_source = 1 };

std::string_view to_string(Flip flip);
std::string_view to_string(ManualCurve curve);
std::string_view to_string(ThetaStarPolicy policy);
Flip parse_flip(std::string_view name);
ManualCurve parse_manual_curve(std::string_view name);
ThetaStarPolicy parse_theta_star_policy(std::string_view name);

/// How similarities become penalties.
///
/// Similarity-based: nu = min-max(s), w = nu^exponent, then the flip
/// (vertical: w -> 1 - w; horizontal: reverse the unit order).
/// Manual curves replace the similarity computation:
///   constant     w_l = constant_value
///   linear_ramp  w_l = l / (L - 1)
///   step         0 for encoder units, 1 for classifier units
/// and the flip is applied afterwards.
struct SwrVariant {
    int exponent = 2;
    Flip flip = Flip::none;
    ManualCurve manual_curve = ManualCurve::none;
    double constant_value = 1.0;
    ThetaStarPolicy theta_star_policy = ThetaStarPolicy::update_prev;

    void validate() const;
    bool operator==(const SwrVariant&) const = default;
};

/// Parses "exponent=1,flip=vertical,curve=step,constant=0.5,theta_star=freeze_source";
/// omitted keys keep their defaults.
SwrVariant parse_variant(std::string_view text);
std::string format_variant(const SwrVariant& variant);

struct PenaltyVector {
    std::vector<std::string> unit_names;
    std::vector<double> similarities;
    std::vector<double> penalties;
    SwrVariant variant;
    std::size_t n_samples = 0;
    Digest source_hash{};

    std::size_t size() const { return penalties.size(); }
    bool operator==(const PenaltyVector&) const = default;
};

/// Cosine of the angle between a and b; 0 when either norm is below 1e-12.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Min-max, exponent, flip. A constant input (max == min) maps to all ones
/// before the flip.
std::vector<double> penalties_from_similarities(std::span<const double> similarities, const SwrVariant& variant);

/// Manual curve over `units` parametric units; `encoder_units` of them form
/// the encoder.
std::vector<double> manual_penalties(std::size_t units, std::size_t encoder_units, const SwrVariant& variant);

inline constexpr std::size_t kDefaultPenaltySamples = 1024;

/// Averages, per parametric unit, the cosine between the cross-entropy
/// gradient on x and on T(x) over the given source examples. Works on a
/// private replica evaluated one example at a time with running batchnorm
/// statistics, so `model` is never touched. The transform for example i
/// uses seed derive_seed(seed, i).
PenaltyVector compute_penalty_vector(const Model& model, const data::Dataset& source,
                                     std::span<const std::size_t> indices, const data::TransformSpec& transform,
                                     const SwrVariant& variant, std::uint64_t seed);

/// Same, drawing `n_samples` indices from a seeded permutation of the
/// dataset (cycling through fresh permutations when n_samples > size).
PenaltyVector compute_penalty_vector(const Model& model, const data::Dataset& source,
                                     const data::TransformSpec& transform, std::size_t n_samples,
                                     const SwrVariant& variant, std::uint64_t seed);

/// Throws unless the penalty vector names exactly the model's parametric units.
void check_layout(const PenaltyVector& penalty, const Model& model);

}  // namespace tta::swr
