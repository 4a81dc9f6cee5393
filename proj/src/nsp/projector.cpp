#include "tta/nsp/projector.hpp"

#include <string>

#include "tta/core/error.hpp"

namespace tta::nsp {

void ProjectorSpec::validate() const {
    if (depth > 3) throw Error("projector depth must be in [0, 3]");
    if (depth > 0 && width == 0) throw Error("projector width must be positive");
}

Projector::Projector(std::size_t input_dim, ProjectorSpec spec, std::uint64_t seed)
    : input_dim_(input_dim), spec_(spec) {
    spec_.validate();
    if (input_dim == 0) throw Error("projector input dimension must be positive");
    std::vector<LayerUnit> units;
    std::size_t in = input_dim;
    for (std::size_t b = 1; b < spec_.depth; ++b) {
        const std::string id = std::to_string(b);
        units.push_back(LayerUnit::linear("proj_fc" + id, in, spec_.width));
        units.push_back(LayerUnit::batchnorm("proj_bn" + id, spec_.width));
        units.push_back(LayerUnit::act("proj_relu" + id, ActivationKind::relu));
        in = spec_.width;
    }
    if (spec_.depth > 0) units.push_back(LayerUnit::linear("proj_out", in, spec_.width));
    net_ = Sequential(std::move(units));
    net_.initialize(seed);
}

Projector::Projector(std::size_t input_dim, ProjectorSpec spec, Sequential net)
    : input_dim_(input_dim), spec_(spec), net_(std::move(net)) {
    spec_.validate();
    const std::size_t expected = spec_.depth == 0 ? 0 : 3 * (spec_.depth - 1) + 1;
    if (net_.units().size() != expected) throw Error("projector: unit count does not match depth");
}

Var Projector::forward(Tape& tape, Var h, Mode mode, BnMode bn_mode, bool trainable) {
    if (spec_.depth == 0) return h;
    return net_.forward(tape, h, mode, bn_mode, trainable);
}

bool Projector::operator==(const Projector& other) const {
    if (input_dim_ != other.input_dim_ || !(spec_ == other.spec_) || source_hash_ != other.source_hash_) return false;
    const auto& a = net_.units();
    const auto& b = other.net_.units();
    if (a.size() != b.size()) return false;
    for (std::size_t u = 0; u < a.size(); ++u) {
        if (a[u].name != b[u].name || a[u].params.size() != b[u].params.size() ||
            a[u].running_mean != b[u].running_mean || a[u].running_var != b[u].running_var) {
            return false;
        }
        for (std::size_t p = 0; p < a[u].params.size(); ++p)
            if (!same_values(a[u].params[p], b[u].params[p])) return false;
    }
    return true;
}

}  // namespace tta::nsp
