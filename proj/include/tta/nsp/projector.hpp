#pragma once

#include <cstddef>
#include <cstdint>

#include "tta/core/digest.hpp"
#include "tta/core/network.hpp"

namespace tta::nsp {

inline constexpr std::size_t kDefaultProjectorWidth = 512;

/// depth 0: no projector, z = h.
/// depth 1: one linear layer h -> width.
/// depth d >= 2: (d - 1) blocks of linear -> batchnorm -> relu at `width`,
///               then a final linear layer to `width`.
struct ProjectorSpec {
    std::size_t depth = 2;
    std::size_t width = kDefaultProjectorWidth;

    void validate() const;
    bool operator==(const ProjectorSpec&) const = default;
};

class Projector {
public:
    Projector() = default;
    Projector(std::size_t input_dim, ProjectorSpec spec, std::uint64_t seed);
    /// Rebuilds a projector around existing units (deserialization).
    Projector(std::size_t input_dim, ProjectorSpec spec, Sequential net);

    /// Identity when depth is 0.
    Var forward(Tape& tape, Var h, Mode mode, BnMode bn_mode, bool trainable);

    const ProjectorSpec& spec() const { return spec_; }
    std::size_t depth() const { return spec_.depth; }
    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return spec_.depth == 0 ? input_dim_ : spec_.width; }

    Sequential& net() { return net_; }
    const Sequential& net() const { return net_; }

    /// Hash of the source checkpoint this projector was trained against.
    const Digest& source_hash() const { return source_hash_; }
    void set_source_hash(const Digest& hash) { source_hash_ = hash; }

    bool operator==(const Projector& other) const;

private:
    std::size_t input_dim_ = 0;
    ProjectorSpec spec_{0, kDefaultProjectorWidth};
    Sequential net_;
    Digest source_hash_{};
};

}  // namespace tta::nsp
