#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tta/core/model.hpp"
#include "tta/data/dataset.hpp"
#include "tta/data/transform.hpp"
#include "tta/nsp/projector.hpp"
#include "tta/nsp/prototypes.hpp"

namespace tta::nsp {

struct NspTrainingConfig {
    ProjectorSpec projector;
    PrototypeSource source = PrototypeSource::projection_z;
    data::TransformSpec transform = data::TransformSpec::projector_default();
    std::size_t epochs = 20;
    std::size_t batch_size = 50;
    double lr = 0.05;
    double alpha = kDefaultMomentum;
    double tau = kDefaultTemperature;
};

struct NspArtifacts {
    Projector projector;
    PrototypeBank bank;
    /// Mean cos(z, q_y) over the source set after initialization (entry 0)
    /// and after each epoch.
    std::vector<double> alignment;
};

/// Trains the projector with the embedding loss and builds the prototype
/// bank by EMA of source projections. The model is only read.
///
/// Phase 1 walks shuffled batches until every class has a first projection
/// and sets q_k to it. Phase 2 runs `epochs` passes; per batch the loss uses
/// the current bank, then the projector steps, then each original projection
/// updates its class prototype in batch order.
///
/// Depth 0 skips projector training and keeps the EMA of h. The
/// classifier_weights source copies the rows of the final linear layer and
/// needs depth 0.
NspArtifacts train_projector_and_prototypes(const Model& model, const data::Dataset& source,
                                            const NspTrainingConfig& config, std::uint64_t seed);

/// Mean cos(z, q_y) over the dataset with the projector in eval mode on
/// batch statistics.
double prototype_alignment(const Model& model, const Projector& projector, const PrototypeBank& bank,
                           const data::Dataset& source, std::size_t batch_size);

}  // namespace tta::nsp
