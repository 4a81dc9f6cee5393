#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tta/adapt/config.hpp"
#include "tta/data/stream.hpp"

namespace tta::adapt {

struct BatchMetrics {
    std::size_t epoch = 0;
    std::size_t batch_index = 0;
    std::size_t n = 0;
    std::size_t n_wrong = 0;
    double mean_main_entropy = 0.0;
    /// NaN when no prototype bank is available.
    double mean_nsp_entropy = 0.0;
    bool aborted = false;
};

struct MetricsRecord {
    std::string run_id;
    std::uint64_t seed = 0;
    std::string corruption;
    int severity = 0;
    AdaptMode mode = AdaptMode::full;
    double lr = 0.0;
    std::size_t epochs = 1;
    std::string config_hash;
    std::vector<BatchMetrics> batches;
    /// Over the scored epoch: the first one online, the last one offline.
    std::size_t total = 0;
    std::size_t wrong = 0;
    double error_rate = 0.0;
    std::size_t incidents = 0;
    /// Set when the run itself failed (ablation matrix only).
    std::string failure;
};

/// The only consumer of stream labels. Counts each prediction against the
/// hidden ground truth.
class MetricsRecorder {
public:
    void record(std::size_t epoch, const data::StreamBatch& batch, std::span<const int> predictions,
                double mean_main_entropy, double mean_nsp_entropy, bool aborted);

    /// Totals over `scored_epoch`.
    void finish(MetricsRecord& record, std::size_t scored_epoch) const;

    const std::vector<BatchMetrics>& batches() const { return batches_; }

private:
    std::vector<BatchMetrics> batches_;
};

}  // namespace tta::adapt
