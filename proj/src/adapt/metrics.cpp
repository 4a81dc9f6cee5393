#include "tta/adapt/metrics.hpp"

#include "tta/core/error.hpp"

namespace tta::adapt {

void MetricsRecorder::record(std::size_t epoch, const data::StreamBatch& batch, std::span<const int> predictions,
                             double mean_main_entropy, double mean_nsp_entropy, bool aborted) {
    const auto& truth = batch.labels.values_;
    if (predictions.size() != truth.size()) throw Error("metrics: prediction count does not match the batch");
    BatchMetrics m;
    m.epoch = epoch;
    m.batch_index = batch.batch_index;
    m.n = truth.size();
    for (std::size_t i = 0; i < truth.size(); ++i) m.n_wrong += predictions[i] != truth[i];
    m.mean_main_entropy = mean_main_entropy;
    m.mean_nsp_entropy = mean_nsp_entropy;
    m.aborted = aborted;
    batches_.push_back(m);
}

void MetricsRecorder::finish(MetricsRecord& record, std::size_t scored_epoch) const {
    record.batches = batches_;
    record.total = record.wrong = record.incidents = 0;
    for (const BatchMetrics& m : batches_) {
        record.incidents += m.aborted;
        if (m.epoch != scored_epoch) continue;
        record.total += m.n;
        record.wrong += m.n_wrong;
    }
    record.error_rate = record.total ? static_cast<double>(record.wrong) / static_cast<double>(record.total) : 0.0;
}

}  // namespace tta::adapt
