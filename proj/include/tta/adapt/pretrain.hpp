#pragma once

#include <cstddef>
#include <cstdint>

#include "tta/core/model.hpp"
#include "tta/data/dataset.hpp"

namespace tta::adapt {

struct PretrainConfig {
    std::size_t epochs = 20;
    double lr = 0.1;
    std::size_t batch_size = 50;
};

struct PretrainReport {
    double final_loss = 0.0;
    /// Accuracy on the training set with running batchnorm statistics.
    double train_accuracy = 0.0;
};

/// Cross-entropy SGD on shuffled mini-batches (batch statistics, running
/// estimates updated). A non-finite loss throws NumericError naming the
/// epoch and batch.
PretrainReport pretrain_source(Model& model, const data::Dataset& dataset, const PretrainConfig& config,
                               std::uint64_t seed);

/// Fraction of correct argmax predictions in eval mode with `bn_mode`.
double accuracy(Model& model, const data::Dataset& dataset, BnMode bn_mode, std::size_t batch_size = 100);

}  // namespace tta::adapt
