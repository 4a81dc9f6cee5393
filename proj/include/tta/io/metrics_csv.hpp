#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "tta/adapt/metrics.hpp"

namespace tta::io {

inline constexpr std::string_view kMetricsColumns =
    "run_id,seed,corruption,severity,batch_index,n,n_wrong,mean_main_entropy,mean_nsp_entropy";

/// Layout:
///   # tta-metrics 1
///   # key=value            resolved configuration, one line per key
///   <column header>
///   one row per batch; batch_index counts across epochs
///   footer row with batch_index "summary": n and n_wrong over the scored
///   epoch, entropies averaged over its batches
///   # error_rate=..., # incidents=...
/// Doubles use %.17g.
std::string format_metrics(const adapt::MetricsRecord& record, std::string_view config_echo);

struct MetricsFile {
    std::map<std::string, std::string> header;
    adapt::MetricsRecord record;
};

/// Throws on any schema violation, including footer totals that disagree
/// with the rows.
MetricsFile parse_metrics(std::string_view text);

void save_metrics(const std::filesystem::path& path, const adapt::MetricsRecord& record, std::string_view config_echo);
MetricsFile load_metrics(const std::filesystem::path& path);

}  // namespace tta::io
