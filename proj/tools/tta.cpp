// tta: pretrain | prepare | adapt | report

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "tta/adapt/online.hpp"
#include "tta/adapt/pretrain.hpp"
#include "tta/adapt/report.hpp"
#include "tta/core/error.hpp"
#include "tta/core/rng.hpp"
#include "tta/io/artifacts.hpp"
#include "tta/io/metrics_csv.hpp"
#include "tta/io/run_config.hpp"
#include "tta/nsp/training.hpp"
#include "tta/swr/penalty.hpp"

namespace {

using namespace tta;

constexpr int kUsageError = 2;

// Seed streams for the stages driven by one run seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kPretrainStream = 2;
constexpr std::uint64_t kPenaltyStream = 3;
constexpr std::uint64_t kNspStream = 4;

struct UsageError : Error {
    using Error::Error;
};

/// --config plus one --key-name flag per config key.
struct ConfigFlags {
    std::string config_path;
    std::map<std::string, std::string> overrides;

    void attach(CLI::App& app) {
        app.add_option("--config", config_path, "key=value config file");
        for (const io::ConfigKey& key : io::config_keys()) {
            std::string flag(key.name);
            for (char& c : flag)
                if (c == '_') c = '-';
            std::string name(key.name);
            app.add_option_function<std::string>(
                "--" + flag, [this, name](const std::string& v) { overrides[name] = v; }, std::string(key.help));
        }
    }

    /// Bad keys or values are usage errors.
    io::RunConfig resolve() const {
        try {
            return resolve_unchecked();
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }

    io::RunConfig resolve_unchecked() const {
        io::RunConfig cfg = config_path.empty() ? io::RunConfig() : io::RunConfig::load(config_path);
        for (const auto& [k, v] : overrides) cfg.set(k, v);
        if (!cfg.is_set("seed")) {
            if (const char* env = std::getenv("TTA_SEED")) cfg.set("seed", env);
        }
        return cfg;
    }
};

data::Dataset source_dataset(const io::RunConfig& cfg) {
    if (!cfg.text("source_dataset").empty()) return io::load_dataset(cfg.text("source_dataset"));
    return data::generate_source_dataset(cfg.u64("source_data_seed"), static_cast<std::size_t>(cfg.integer("source_per_class")),
                                         static_cast<std::size_t>(cfg.integer("num_classes")),
                                         static_cast<std::size_t>(cfg.integer("image_size")));
}

data::Dataset target_dataset(const io::RunConfig& cfg) {
    if (!cfg.text("target_dataset").empty()) return io::load_dataset(cfg.text("target_dataset"));
    return data::generate_source_dataset(cfg.u64("target_data_seed"), static_cast<std::size_t>(cfg.integer("target_per_class")),
                                         static_cast<std::size_t>(cfg.integer("num_classes")),
                                         static_cast<std::size_t>(cfg.integer("image_size")));
}

int cmd_pretrain(const io::RunConfig& cfg, const std::string& out, const std::string& dataset_out) {
    const data::Dataset ds = source_dataset(cfg);
    if (!dataset_out.empty()) io::save_dataset(dataset_out, ds);
    const std::uint64_t seed = cfg.u64("seed");
    Model model = make_cnn(cfg.model_spec(), derive_seed(seed, kInitStream));
    const adapt::PretrainReport report = adapt::pretrain_source(model, ds, cfg.pretrain(), derive_seed(seed, kPretrainStream));
    const std::string path = out.empty() ? cfg.text("checkpoint") : out;
    io::save_checkpoint(path, model);
    std::printf("train_accuracy=%.6f final_loss=%.6f checkpoint=%s sha256=%s\n", report.train_accuracy, report.final_loss,
                path.c_str(), to_hex(io::checkpoint_digest(model)).c_str());
    return 0;
}

int cmd_prepare(const io::RunConfig& cfg) {
    Digest hash{};
    Model model = io::load_checkpoint(cfg.text("checkpoint"), &hash);
    const data::Dataset ds = source_dataset(cfg);
    const std::uint64_t seed = cfg.u64("seed");

    swr::PenaltyVector penalty = swr::compute_penalty_vector(
        model, ds, data::TransformSpec::shift_default(), static_cast<std::size_t>(cfg.integer("penalty_samples")),
        cfg.swr_variant(), derive_seed(seed, kPenaltyStream));
    penalty.source_hash = hash;

    nsp::NspArtifacts nsp = nsp::train_projector_and_prototypes(model, ds, cfg.nsp(), derive_seed(seed, kNspStream));
    nsp.projector.set_source_hash(hash);
    nsp.bank.source_hash = hash;

    io::save_penalty(cfg.text("penalty"), penalty);
    io::save_prototypes(cfg.text("prototypes"), nsp.bank);
    io::save_projector(cfg.text("projector"), nsp.projector);

    std::printf("source=%s\npenalty:", to_hex(hash).c_str());
    for (std::size_t i = 0; i < penalty.size(); ++i)
        std::printf(" %s=%.4f", penalty.unit_names[i].c_str(), penalty.penalties[i]);
    std::printf("\nprototypes: %zu x %zu (%s)\n", nsp.bank.num_classes(), nsp.bank.dim(),
                std::string(nsp::to_string(nsp.bank.source)).c_str());
    return 0;
}

// Shortest text that parses back to the same double.
std::string format_lr(double lr) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, lr);
    return std::string(buf, res.ptr);
}

int cmd_adapt(io::RunConfig cfg, const std::string& out, const std::string& dataset_out) {
    adapt::AdaptConfig config = cfg.adapt();
    // Pin the resolved lr so the echoed config is self-contained.
    if (!adapt::updates_model(config.mode)) config.lr = 0.0;
    cfg.set("lr", format_lr(config.lr));

    adapt::SourceArtifacts artifacts;
    artifacts.model = io::load_checkpoint(cfg.text("checkpoint"), &artifacts.model_hash);
    if (adapt::uses_swr(config.mode)) artifacts.penalty = io::load_penalty(cfg.text("penalty"));
    if (adapt::uses_aux(config.mode)) {
        artifacts.bank = io::load_prototypes(cfg.text("prototypes"));
        artifacts.projector = io::load_projector(cfg.text("projector"));
    } else if (std::ifstream(cfg.text("prototypes")).good() && std::ifstream(cfg.text("projector")).good()) {
        // Optional: lets the metrics report NSP entropy for every mode.
        artifacts.bank = io::load_prototypes(cfg.text("prototypes"));
        artifacts.projector = io::load_projector(cfg.text("projector"));
    }

    const data::Dataset target = target_dataset(cfg);
    if (!dataset_out.empty()) io::save_dataset(dataset_out, target);
    const std::uint64_t seed = cfg.u64("seed");
    data::TargetStream stream(target, cfg.corruption(), seed, static_cast<std::size_t>(cfg.integer("batch_size")));

    std::string run_id = cfg.text("run_id");
    if (run_id.empty()) run_id = std::string(adapt::to_string(config.mode)) + "_lr" + format_lr(config.lr) + "_s" + std::to_string(seed);

    adapt::MetricsRecord record = adapt::run_online_evaluation(artifacts, stream, config, {run_id, seed});
    record.config_hash = cfg.hash();
    const std::string path = out.empty() ? run_id + ".csv" : out;
    io::save_metrics(path, record, cfg.echo());
    std::printf("run_id=%s error_rate=%.6f wrong=%zu total=%zu incidents=%zu metrics=%s\n", record.run_id.c_str(),
                record.error_rate, record.wrong, record.total, record.incidents, path.c_str());
    return 0;
}

int cmd_report(const std::vector<std::string>& files, const std::string& csv_out) {
    if (files.empty()) throw UsageError("report: at least one metrics file is required");
    std::vector<adapt::MetricsRecord> records;
    for (const std::string& f : files) records.push_back(io::load_metrics(f).record);
    const std::vector<adapt::ReportRow> rows = adapt::summarize(records);
    std::fputs(adapt::format_report(rows).c_str(), stdout);
    if (!csv_out.empty()) {
        std::ofstream out(csv_out, std::ios::trunc);
        if (!out) throw Error("cannot open '" + csv_out + "' for writing");
        out << "mode,lr,epochs,corruption,severity,runs,mean_error,std_error\n";
        for (const adapt::ReportRow& r : rows) {
            out << adapt::to_string(r.mode) << ',' << format_lr(r.lr) << ',' << r.epochs << ',' << r.corruption << ','
                << r.severity << ',' << r.runs << ',' << format_lr(r.mean_error) << ',' << format_lr(r.std_error) << '\n';
        }
        if (!out) throw Error("failed writing '" + csv_out + "'");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Test-time adaptation with weight regularization and source prototypes"};
    app.require_subcommand(1);

    ConfigFlags pretrain_flags, prepare_flags, adapt_flags;
    std::string pretrain_out, pretrain_dataset_out, adapt_out, adapt_dataset_out, report_csv;
    std::vector<std::string> report_files;

    CLI::App* pretrain = app.add_subcommand("pretrain", "train the source model and write a checkpoint");
    pretrain_flags.attach(*pretrain);
    pretrain->add_option("--out", pretrain_out, "checkpoint path (default: the checkpoint key)");
    pretrain->add_option("--dataset-out", pretrain_dataset_out, "also export the source dataset");

    CLI::App* prepare = app.add_subcommand("prepare", "build penalty vector, projector and prototypes");
    prepare_flags.attach(*prepare);

    CLI::App* adapt_cmd = app.add_subcommand("adapt", "stream a corrupted target set and adapt online");
    adapt_flags.attach(*adapt_cmd);
    adapt_cmd->add_option("--out", adapt_out, "metrics CSV path (default: <run_id>.csv)");
    adapt_cmd->add_option("--dataset-out", adapt_dataset_out, "also export the clean target dataset");

    CLI::App* report = app.add_subcommand("report", "aggregate metrics files");
    report->add_option("files", report_files, "metrics CSV files");
    report->add_option("--csv", report_csv, "also write the table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (*pretrain) return cmd_pretrain(pretrain_flags.resolve(), pretrain_out, pretrain_dataset_out);
        if (*prepare) return cmd_prepare(prepare_flags.resolve());
        if (*adapt_cmd) return cmd_adapt(adapt_flags.resolve(), adapt_out, adapt_dataset_out);
        if (*report) return cmd_report(report_files, report_csv);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kUsageError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kUsageError;
}
