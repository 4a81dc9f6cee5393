#include "tta/io/metrics_csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "tta/core/error.hpp"

namespace tta::io {

namespace {

constexpr std::string_view kMagicLine = "# tta-metrics 1";

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t c = line.find(',', start);
        out.emplace_back(line.substr(start, c == std::string_view::npos ? std::string_view::npos : c - start));
        if (c == std::string_view::npos) break;
        start = c + 1;
    }
    return out;
}

std::size_t to_size(const std::string& s, const char* what) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::exception&) {
        pos = std::string::npos;
    }
    if (s.empty() || pos != s.size() || s.front() == '-') throw Error(std::string("metrics: bad ") + what + " '" + s + "'");
    return static_cast<std::size_t>(v);
}

double to_double(const std::string& s, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw Error(std::string("metrics: bad ") + what + " '" + s + "'");
    return v;
}

// Mean over finite values; NaN if none.
double mean_of(const std::vector<double>& v) {
    double sum = 0;
    std::size_t n = 0;
    for (double x : v)
        if (!std::isnan(x)) sum += x, ++n;
    return n ? sum / static_cast<double>(n) : std::nan("");
}

std::size_t scored_epoch_of(const adapt::MetricsRecord& r) { return r.epochs - 1; }

}  // namespace

std::string format_metrics(const adapt::MetricsRecord& r, std::string_view config_echo) {
    std::string out(kMagicLine);
    out += '\n';
    std::string_view rest = config_echo;
    while (!rest.empty()) {
        const std::size_t nl = rest.find('\n');
        const std::string_view line = rest.substr(0, nl);
        if (!line.empty()) {
            out += "# ";
            out += line;
            out += '\n';
        }
        if (nl == std::string_view::npos) break;
        rest.remove_prefix(nl + 1);
    }
    out += "# config_hash=" + r.config_hash + "\n";
    out += kMetricsColumns;
    out += '\n';
    const std::string prefix =
        r.run_id + "," + std::to_string(r.seed) + "," + r.corruption + "," + std::to_string(r.severity) + ",";
    std::size_t global = 0;
    std::vector<double> main_ent, nsp_ent;
    for (const adapt::BatchMetrics& b : r.batches) {
        out += prefix + std::to_string(global++) + "," + std::to_string(b.n) + "," + std::to_string(b.n_wrong) + "," +
               num(b.mean_main_entropy) + "," + num(b.mean_nsp_entropy) + "\n";
        if (b.epoch == scored_epoch_of(r)) {
            main_ent.push_back(b.mean_main_entropy);
            nsp_ent.push_back(b.mean_nsp_entropy);
        }
    }
    out += prefix + "summary," + std::to_string(r.total) + "," + std::to_string(r.wrong) + "," + num(mean_of(main_ent)) +
           "," + num(mean_of(nsp_ent)) + "\n";
    out += "# error_rate=" + num(r.error_rate) + "\n";
    out += "# incidents=" + std::to_string(r.incidents) + "\n";
    return out;
}

MetricsFile parse_metrics(std::string_view text) {
    std::vector<std::string_view> lines;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        lines.push_back(text.substr(0, nl));
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    if (lines.empty() || lines.front() != kMagicLine) throw Error("metrics: missing '# tta-metrics 1' header");

    MetricsFile file;
    std::size_t i = 1;
    for (; i < lines.size() && !lines[i].empty() && lines[i].front() == '#'; ++i) {
        const std::string_view body = lines[i].substr(std::min<std::size_t>(2, lines[i].size()));
        const std::size_t eq = body.find('=');
        if (eq == std::string_view::npos) throw Error("metrics: malformed header line");
        file.header[std::string(body.substr(0, eq))] = std::string(body.substr(eq + 1));
    }
    if (i >= lines.size() || lines[i] != kMetricsColumns) throw Error("metrics: unexpected column header");
    ++i;

    const auto need = [&](const char* key) -> const std::string& {
        const auto it = file.header.find(key);
        if (it == file.header.end()) throw Error(std::string("metrics: header lacks '") + key + "'");
        return it->second;
    };
    adapt::MetricsRecord& r = file.record;
    r.mode = adapt::parse_mode(need("mode"));
    r.epochs = to_size(need("epochs"), "epochs");
    if (r.epochs == 0) throw Error("metrics: epochs must be positive");
    r.config_hash = need("config_hash");

    bool have_summary = false;
    std::size_t summary_n = 0, summary_wrong = 0;
    for (; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        if (lines[i].front() == '#') {
            if (!have_summary) throw Error("metrics: comment inside the batch rows");
            const std::string_view body = lines[i].substr(std::min<std::size_t>(2, lines[i].size()));
            const std::size_t eq = body.find('=');
            if (eq == std::string_view::npos) throw Error("metrics: malformed footer line");
            file.header[std::string(body.substr(0, eq))] = std::string(body.substr(eq + 1));
            continue;
        }
        if (have_summary) throw Error("metrics: rows after the summary row");
        const auto cols = split(lines[i]);
        if (cols.size() != 9) throw Error("metrics: expected 9 columns");
        const bool first = r.batches.empty();
        if (first) {
            r.run_id = cols[0];
            r.seed = to_size(cols[1], "seed");
            r.corruption = cols[2];
            r.severity = static_cast<int>(to_size(cols[3], "severity"));
        } else if (cols[0] != r.run_id || to_size(cols[1], "seed") != r.seed || cols[2] != r.corruption ||
                   static_cast<int>(to_size(cols[3], "severity")) != r.severity) {
            throw Error("metrics: rows from more than one run");
        }
        if (cols[4] == "summary") {
            have_summary = true;
            summary_n = to_size(cols[5], "n");
            summary_wrong = to_size(cols[6], "n_wrong");
            continue;
        }
        if (to_size(cols[4], "batch_index") != r.batches.size()) throw Error("metrics: batch_index out of sequence");
        adapt::BatchMetrics b;
        b.batch_index = r.batches.size();
        b.n = to_size(cols[5], "n");
        b.n_wrong = to_size(cols[6], "n_wrong");
        if (b.n_wrong > b.n) throw Error("metrics: n_wrong exceeds n");
        b.mean_main_entropy = to_double(cols[7], "mean_main_entropy");
        b.mean_nsp_entropy = to_double(cols[8], "mean_nsp_entropy");
        r.batches.push_back(b);
    }
    if (!have_summary) throw Error("metrics: missing summary row");
    if (r.batches.empty() || r.batches.size() % r.epochs != 0) throw Error("metrics: row count does not split into epochs");

    const std::size_t per_epoch = r.batches.size() / r.epochs;
    for (std::size_t k = 0; k < r.batches.size(); ++k) {
        r.batches[k].epoch = k / per_epoch;
        r.batches[k].batch_index = k % per_epoch;
        if (r.batches[k].epoch == r.epochs - 1) {
            r.total += r.batches[k].n;
            r.wrong += r.batches[k].n_wrong;
        }
    }
    if (r.total != summary_n || r.wrong != summary_wrong) throw Error("metrics: summary row disagrees with batch rows");
    r.error_rate = r.total ? static_cast<double>(r.wrong) / static_cast<double>(r.total) : 0.0;
    if (const auto it = file.header.find("incidents"); it != file.header.end()) r.incidents = to_size(it->second, "incidents");
    if (const auto it = file.header.find("lr"); it != file.header.end() && it->second != "auto")
        r.lr = to_double(it->second, "lr");
    return file;
}

void save_metrics(const std::filesystem::path& path, const adapt::MetricsRecord& record, std::string_view config_echo) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << format_metrics(record, config_echo);
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

MetricsFile load_metrics(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_metrics(ss.str());
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

}  // namespace tta::io
