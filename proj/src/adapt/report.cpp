#include "tta/adapt/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

namespace tta::adapt {

std::vector<ReportRow> summarize(const std::vector<MetricsRecord>& records) {
    using Key = std::tuple<int, double, std::size_t, std::string, int>;
    std::map<Key, std::vector<double>> groups;
    for (const MetricsRecord& r : records) {
        if (!r.failure.empty()) continue;
        groups[{static_cast<int>(r.mode), -r.lr, r.epochs, r.corruption, r.severity}].push_back(r.error_rate);
    }
    std::vector<ReportRow> rows;
    for (const auto& [key, errors] : groups) {
        ReportRow row;
        row.mode = static_cast<AdaptMode>(std::get<0>(key));
        row.lr = -std::get<1>(key);
        row.epochs = std::get<2>(key);
        row.corruption = std::get<3>(key);
        row.severity = std::get<4>(key);
        row.runs = errors.size();
        double sum = 0.0;
        for (double e : errors) sum += e;
        row.mean_error = sum / static_cast<double>(errors.size());
        double sq = 0.0;
        for (double e : errors) sq += (e - row.mean_error) * (e - row.mean_error);
        row.std_error = errors.size() > 1 ? std::sqrt(sq / static_cast<double>(errors.size() - 1)) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

std::string format_report(const std::vector<ReportRow>& rows) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-18s %10s %6s %-18s %8s %5s %16s\n", "mode", "lr", "epochs", "corruption",
                  "severity", "runs", "error % (mean±std)");
    out += line;
    for (const ReportRow& r : rows) {
        std::snprintf(line, sizeof line, "%-18s %10.3g %6zu %-18s %8d %5zu %8.2f ± %5.2f\n",
                      std::string(to_string(r.mode)).c_str(), r.lr, r.epochs, r.corruption.c_str(), r.severity, r.runs,
                      100.0 * r.mean_error, 100.0 * r.std_error);
        out += line;
    }
    return out;
}

}  // namespace tta::adapt
