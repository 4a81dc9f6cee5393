#pragma once

#include "tta/adapt/online.hpp"
#include "tta/adapt/pretrain.hpp"
#include "tta/nsp/training.hpp"
#include "tta/swr/penalty.hpp"

namespace tta::adapt::testing {

inline Digest fake_hash(std::uint8_t tag) {
    Digest d{};
    d.fill(tag);
    return d;
}

/// Small but fully wired source artifacts. Built once per process.
inline const SourceArtifacts& small_artifacts() {
    static const SourceArtifacts artifacts = [] {
        const data::Dataset source = data::generate_source_dataset(11, 30, 5);
        SourceArtifacts a;
        a.model = make_cnn(CnnSpec{}, 21);
        pretrain_source(a.model, source, {8, 0.1, 50}, 22);
        a.model_hash = fake_hash(0xab);
        a.penalty = swr::compute_penalty_vector(a.model, source, data::TransformSpec::shift_default(), 64, {}, 23);
        a.penalty.source_hash = a.model_hash;
        nsp::NspTrainingConfig nc;
        nc.projector = {2, 32};
        nc.epochs = 2;
        nsp::NspArtifacts n = nsp::train_projector_and_prototypes(a.model, source, nc, 24);
        a.projector = n.projector;
        a.bank = n.bank;
        a.projector.set_source_hash(a.model_hash);
        a.bank.source_hash = a.model_hash;
        return a;
    }();
    return artifacts;
}

inline const data::Dataset& small_target() {
    static const data::Dataset target = data::generate_source_dataset(12, 20, 5);
    return target;
}

inline data::TargetStream small_stream(std::uint64_t seed, std::size_t batch = 20) {
    return data::TargetStream(small_target(), {data::CorruptionKind::gaussian_noise, 5}, seed, batch);
}

inline bool same_params(const Sequential& a, const Sequential& b) {
    if (a.units().size() != b.units().size()) return false;
    for (std::size_t u = 0; u < a.units().size(); ++u) {
        const auto& pa = a.units()[u].params;
        const auto& pb = b.units()[u].params;
        if (pa.size() != pb.size()) return false;
        for (std::size_t i = 0; i < pa.size(); ++i)
            if (!same_values(pa[i], pb[i])) return false;
        if (a.units()[u].running_mean != b.units()[u].running_mean) return false;
        if (a.units()[u].running_var != b.units()[u].running_var) return false;
    }
    return true;
}

}  // namespace tta::adapt::testing
