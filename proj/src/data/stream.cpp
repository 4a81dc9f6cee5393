#include "tta/data/stream.hpp"

#include "tta/core/error.hpp"
#include "tta/core/rng.hpp"

namespace tta::data {
namespace {

constexpr std::uint64_t kCorruptionStream = 0x636f7272;
constexpr std::uint64_t kShuffleStream = 0x73687566;

}  // namespace

std::span<const int> reveal_for_supervision(const HiddenLabels& labels) { return labels.values_; }

TargetStream::TargetStream(const Dataset& dataset, const CorruptionSpec& corruption, std::uint64_t seed,
                           std::size_t batch_size) {
    if (dataset.size() == 0) throw Error("target stream: empty dataset");
    if (batch_size < 2) throw Error("target stream: batch_size must be at least 2");
    corruption.validate();
    auto pool = std::make_shared<Pool>();
    pool->images.reserve(dataset.size());
    const std::uint64_t corruption_seed = derive_seed(seed, kCorruptionStream);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        Rng rng(derive_seed(corruption_seed, i));
        pool->images.push_back(corrupt(dataset.images[i], corruption, rng));
    }
    pool->labels = dataset.labels;
    *this = TargetStream(std::move(pool), corruption, seed, batch_size, dataset.num_classes, 0);
}

TargetStream::TargetStream(std::shared_ptr<const Pool> pool, const CorruptionSpec& corruption, std::uint64_t seed,
                           std::size_t batch_size, std::size_t num_classes, std::size_t epoch)
    : pool_(std::move(pool)), corruption_(corruption), seed_(seed), batch_size_(batch_size), num_classes_(num_classes) {
    Rng rng(derive_seed(derive_seed(seed, kShuffleStream), epoch));
    order_ = rng.permutation(pool_->images.size());
}

TargetStream TargetStream::reshuffled(std::size_t epoch) const {
    return TargetStream(pool_, corruption_, seed_, batch_size_, num_classes_, epoch);
}

std::size_t TargetStream::example_count() const {
    return order_.size() - (tail() >= 2 ? 0 : tail());
}

std::optional<StreamBatch> TargetStream::next() {
    if (exhausted_) throw Error("target stream already consumed; each example is yielded exactly once");
    const std::size_t remaining = order_.size() - cursor_;
    if (remaining < 2) {
        exhausted_ = true;
        return std::nullopt;
    }
    const std::size_t n = std::min(batch_size_, remaining);
    StreamBatch batch;
    batch.batch_index = emitted_++;
    batch.indices.assign(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                         order_.begin() + static_cast<std::ptrdiff_t>(cursor_ + n));
    cursor_ += n;
    std::vector<Image> picked;
    std::vector<int> labels;
    picked.reserve(n);
    for (std::size_t i : batch.indices) {
        picked.push_back(pool_->images[i]);
        labels.push_back(pool_->labels[i]);
    }
    batch.images = stack(picked);
    batch.labels = HiddenLabels(std::move(labels));
    return batch;
}

}  // namespace tta::data
