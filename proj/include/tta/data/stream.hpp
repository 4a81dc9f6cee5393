#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tta/core/tensor.hpp"
#include "tta/data/corruption.hpp"
#include "tta/data/dataset.hpp"

namespace tta::adapt {
class MetricsRecorder;
}

namespace tta::data {

class HiddenLabels;
/// Ground truth for the supervised oracle mode only.
std::span<const int> reveal_for_supervision(const HiddenLabels& labels);

/// Ground-truth labels travelling with a batch. Only the metrics recorder and
/// the supervised oracle can read them.
class HiddenLabels {
public:
    HiddenLabels() = default;
    explicit HiddenLabels(std::vector<int> values) : values_(std::move(values)) {}
    std::size_t size() const { return values_.size(); }

private:
    std::vector<int> values_;
    friend class tta::adapt::MetricsRecorder;
    friend std::span<const int> reveal_for_supervision(const HiddenLabels& labels);
};

struct StreamBatch {
    std::size_t batch_index = 0;
    Tensor images;                     // [N x 3 x H x W]
    std::vector<std::size_t> indices;  // positions in the source dataset
    HiddenLabels labels;
};

/// Corrupted, shuffled, batched single-pass view of a dataset.
/// Each example is corrupted once with seed derive_seed(seed, index); the
/// order is shuffled once. A trailing batch smaller than two is dropped.
class TargetStream {
public:
    TargetStream(const Dataset& dataset, const CorruptionSpec& corruption, std::uint64_t seed,
                 std::size_t batch_size);

    /// Next batch, or nullopt once exhausted. Calling again after exhaustion throws.
    std::optional<StreamBatch> next();

    /// Fresh stream over the same corrupted images, shuffled for `epoch`
    /// (epoch 0 reproduces the original order).
    TargetStream reshuffled(std::size_t epoch) const;

    std::size_t batch_size() const { return batch_size_; }
    std::size_t batch_count() const { return order_.size() / batch_size_ + (tail() >= 2 ? 1 : 0); }
    /// Number of examples the stream will yield.
    std::size_t example_count() const;
    std::uint64_t seed() const { return seed_; }
    const CorruptionSpec& corruption() const { return corruption_; }
    std::size_t num_classes() const { return num_classes_; }

private:
    struct Pool {
        std::vector<Image> images;
        std::vector<int> labels;
    };

    TargetStream(std::shared_ptr<const Pool> pool, const CorruptionSpec& corruption, std::uint64_t seed,
                 std::size_t batch_size, std::size_t num_classes, std::size_t epoch);
    std::size_t tail() const { return order_.size() % batch_size_; }

    std::shared_ptr<const Pool> pool_;
    CorruptionSpec corruption_;
    std::uint64_t seed_ = 0;
    std::size_t batch_size_ = 0;
    std::size_t num_classes_ = 0;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
    std::size_t emitted_ = 0;
    bool exhausted_ = false;
};

}  // namespace tta::data
