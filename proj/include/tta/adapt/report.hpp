#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tta/adapt/metrics.hpp"

namespace tta::adapt {

struct ReportRow {
    AdaptMode mode = AdaptMode::full;
    double lr = 0.0;
    std::size_t epochs = 1;
    std::string corruption;
    int severity = 0;
    std::size_t runs = 0;
    double mean_error = 0.0;
    /// Sample standard deviation; 0 for a single run.
    double std_error = 0.0;
};

/// Groups by (mode, lr, epochs, corruption, severity); rows follow the
/// mode order of the ablation table, then descending lr. Failed runs are
/// skipped.
std::vector<ReportRow> summarize(const std::vector<MetricsRecord>& records);

/// Fixed-width text table with error rates in percent.
std::string format_report(const std::vector<ReportRow>& rows);

}  // namespace tta::adapt
