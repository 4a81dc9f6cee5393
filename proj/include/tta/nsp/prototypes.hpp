#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tta/core/digest.hpp"
#include "tta/core/tape.hpp"
#include "tta/core/tensor.hpp"

namespace tta::nsp {

enum class PrototypeSource : std::uint8_t { projection_z = 0, representation_h = 1, classifier_weights = 2 };

std::string_view to_string(PrototypeSource source);
PrototypeSource parse_prototype_source(std::string_view name);

inline constexpr double kDefaultMomentum = 0.99;
inline constexpr double kDefaultTemperature = 0.1;

/// One prototype per class, stored as the rows of a [C x D] tensor.
struct PrototypeBank {
    Tensor prototypes;
    double alpha = kDefaultMomentum;
    double tau = kDefaultTemperature;
    PrototypeSource source = PrototypeSource::projection_z;
    Digest source_hash{};

    std::size_t num_classes() const { return prototypes.rank() == 2 ? prototypes.dim(0) : 0; }
    std::size_t dim() const { return prototypes.rank() == 2 ? prototypes.dim(1) : 0; }

    /// q_k <- alpha * q_k + (1 - alpha) * z.
    void ema_update(std::size_t k, std::span<const double> z);

    /// Bitwise comparison of the prototypes.
    bool operator==(const PrototypeBank& other) const;
};

/// softmax_k(cos(z, q_k) / tau). A zero-norm z gives the uniform distribution.
std::vector<double> nsp_predict(std::span<const double> z, const PrototypeBank& bank);

/// Row-wise NSP distribution for a [N x D] projection node. Prototypes enter
/// as constants.
Var nsp_predict(Tape& tape, Var z, const PrototypeBank& bank);

}  // namespace tta::nsp
