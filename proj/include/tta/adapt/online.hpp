#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tta/adapt/config.hpp"
#include "tta/adapt/metrics.hpp"
#include "tta/core/digest.hpp"
#include "tta/core/model.hpp"
#include "tta/data/stream.hpp"
#include "tta/nsp/projector.hpp"
#include "tta/nsp/prototypes.hpp"
#include "tta/swr/regularizer.hpp"

namespace tta::adapt {

/// Everything built before deployment. Every artifact carries the hash of
/// the checkpoint it was derived from.
struct SourceArtifacts {
    Model model;
    Digest model_hash{};
    swr::PenaltyVector penalty;
    nsp::Projector projector;
    nsp::PrototypeBank bank;

    bool has_penalty() const { return penalty.size() > 0; }
    bool has_prototypes() const { return bank.num_classes() > 0; }
};

/// Mutable state carried across test-time steps.
struct AdaptState {
    Model model;
    nsp::Projector projector;
    nsp::PrototypeBank bank;
    swr::PenaltyVector penalty;
    swr::ThetaStar theta_star;

    static AdaptState from(const SourceArtifacts& artifacts, const AdaptConfig& config);
};

struct StepResult {
    std::vector<int> predictions;
    double mean_main_entropy = 0.0;
    double mean_nsp_entropy = 0.0;
    double loss = 0.0;
    bool aborted = false;
    std::string incident;
};

/// Predicts on the batch, then takes one combined update:
///   main entropy (encoder + classifier), auxiliary NSP loss (encoder, plus
///   projector when fine-tuned), weight regularization (all units, taken
///   as a proximal step), then advances theta*.
/// A non-finite loss, gradient or parameter aborts the step and restores
/// the pre-step state. Predictions are always returned.
StepResult tta_step(AdaptState& state, const data::StreamBatch& batch, const AdaptConfig& config,
                    std::uint64_t view_seed);

struct RunInfo {
    std::string run_id;
    std::uint64_t seed = 0;
};

/// Throws unless every present artifact names `model_hash` and the ones the
/// mode needs are present.
void check_artifacts(const SourceArtifacts& artifacts, const AdaptConfig& config);

/// Streams once (or `epochs` times, reshuffled per epoch) with
/// predict-then-update and returns per-batch metrics.
MetricsRecord run_online_evaluation(const SourceArtifacts& artifacts, data::TargetStream& stream,
                                    const AdaptConfig& config, const RunInfo& info);

struct AblationEntry {
    AdaptMode mode = AdaptMode::full;
    double lr = 1.0;
};

/// Standard ablation rows, weakest to strongest.
std::vector<AblationEntry> table_rows(double lr_main, double lr_full);
/// Every listed mode at every listed learning rate.
std::vector<AblationEntry> lr_sweep(const std::vector<AdaptMode>& modes, const std::vector<double>& lrs);

/// Runs entries x seeds on fresh streams of `target`. Failures are recorded
/// in MetricsRecord::failure instead of propagating.
std::vector<MetricsRecord> ablation_matrix(const SourceArtifacts& artifacts, const data::Dataset& target,
                                           const data::CorruptionSpec& corruption, std::size_t batch_size,
                                           const std::vector<AblationEntry>& entries,
                                           const std::vector<std::uint64_t>& seeds, const AdaptConfig& base);

}  // namespace tta::adapt
