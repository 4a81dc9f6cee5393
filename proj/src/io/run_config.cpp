#include "tta/io/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tta/core/error.hpp"
#include "tta/io/binary.hpp"

namespace tta::io {

namespace {

constexpr ConfigKey kKeys[] = {
    {"seed", ValueType::u64, "1", "run seed (model init, stream order, corruption noise)"},
    {"run_id", ValueType::text, "", "run label; derived from mode, lr and seed when empty"},
    {"num_classes", ValueType::integer, "5", "classes in the synthetic task"},
    {"image_size", ValueType::integer, "16", "square image side"},
    {"source_per_class", ValueType::integer, "200", "labelled source examples per class"},
    {"target_per_class", ValueType::integer, "100", "target stream examples per class"},
    {"source_data_seed", ValueType::u64, "1", "seed of the source dataset"},
    {"target_data_seed", ValueType::u64, "2", "seed of the clean target dataset"},
    {"conv1_channels", ValueType::integer, "8", ""},
    {"conv2_channels", ValueType::integer, "8", ""},
    {"hidden", ValueType::integer, "24", "encoder output width"},
    {"pretrain_epochs", ValueType::integer, "20", ""},
    {"pretrain_lr", ValueType::real, "0.1", ""},
    {"pretrain_batch", ValueType::integer, "50", ""},
    {"penalty_samples", ValueType::integer, "1024", "source samples behind the penalty vector"},
    {"swr_variant", ValueType::text, "exponent=2,flip=none,curve=none,constant=1,theta_star=update_prev", ""},
    {"projector_depth", ValueType::integer, "2", "0 disables the projector"},
    {"projector_width", ValueType::integer, "512", ""},
    {"prototype_source", ValueType::text, "projection_z", "projection_z | representation_h | classifier_weights"},
    {"nsp_epochs", ValueType::integer, "20", ""},
    {"nsp_lr", ValueType::real, "0.05", ""},
    {"nsp_batch", ValueType::integer, "50", ""},
    {"momentum", ValueType::real, "0.99", "prototype EMA momentum"},
    {"tau", ValueType::real, "0.1", "NSP temperature"},
    {"mode", ValueType::text, "full", ""},
    {"lr", ValueType::text, "auto", "test-time lr; auto picks the calibrated per-mode default"},
    {"lambda_main_ent", ValueType::real, "0.2", ""},
    {"lambda_main_div", ValueType::real, "0.25", ""},
    {"lambda_aux_ent", ValueType::real, "0.8", ""},
    {"lambda_aux_div", ValueType::real, "0.25", ""},
    {"lambda_selfsup", ValueType::real, "0.1", ""},
    {"lambda_swr", ValueType::real, "250", ""},
    {"bn_mode", ValueType::text, "batch", "batch | running"},
    {"projector_finetune", ValueType::boolean, "false", ""},
    {"selfsup_stop_gradient", ValueType::boolean, "true", ""},
    {"prototype_ema", ValueType::boolean, "false", ""},
    {"epochs", ValueType::integer, "1", "1 online, 2-3 offline"},
    {"corruption", ValueType::text, "gaussian_noise", ""},
    {"severity", ValueType::integer, "5", ""},
    {"batch_size", ValueType::integer, "50", "test-time batch size"},
    {"source_dataset", ValueType::text, "", "load the source dataset from this file instead of generating it"},
    {"target_dataset", ValueType::text, "", "load the clean target dataset from this file instead of generating it"},
    {"checkpoint", ValueType::text, "source.ckpt", ""},
    {"penalty", ValueType::text, "penalty.bin", ""},
    {"prototypes", ValueType::text, "prototypes.bin", ""},
    {"projector", ValueType::text, "projector.bin", ""},
};

const ConfigKey* find_key(std::string_view name) {
    for (const ConfigKey& k : kKeys)
        if (k.name == name) return &k;
    return nullptr;
}

std::string_view trim(std::string_view s) {
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && ws(s.back())) s.remove_suffix(1);
    return s;
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

bool parse_real(std::string_view s, double& out) {
    if (s.empty()) return false;
    std::string buf(s);
    char* end = nullptr;
    out = std::strtod(buf.c_str(), &end);
    return end == buf.c_str() + buf.size() && std::isfinite(out);
}

BnMode parse_bn_mode(std::string_view s) {
    if (s == "batch") return BnMode::batch;
    if (s == "running") return BnMode::running;
    throw Error("unknown bn_mode '" + std::string(s) + "'");
}

void check_value(const ConfigKey& key, std::string_view v) {
    const auto bad = [&](const char* what) {
        throw Error("config: key '" + std::string(key.name) + "': expected " + what + ", got '" + std::string(v) + "'");
    };
    switch (key.type) {
        case ValueType::u64: {
            std::uint64_t x;
            if (!parse_int(v, x)) bad("an unsigned integer");
            break;
        }
        case ValueType::integer: {
            long long x;
            if (!parse_int(v, x)) bad("an integer");
            break;
        }
        case ValueType::real: {
            double x;
            if (!parse_real(v, x)) bad("a finite number");
            break;
        }
        case ValueType::boolean:
            if (v != "true" && v != "false") bad("true or false");
            break;
        case ValueType::text:
            break;
    }
    const std::string_view n = key.name;
    try {
        if (n == "mode") adapt::parse_mode(v);
        else if (n == "bn_mode") parse_bn_mode(v);
        else if (n == "corruption") data::parse_corruption(v);
        else if (n == "prototype_source") nsp::parse_prototype_source(v);
        else if (n == "swr_variant") swr::parse_variant(v);
        else if (n == "lr" && v != "auto") {
            double x;
            if (!parse_real(v, x)) bad("a number or 'auto'");
        }
    } catch (const Error& e) {
        throw Error("config: key '" + std::string(n) + "': " + e.what());
    }
}

}  // namespace

std::span<const ConfigKey> config_keys() { return kKeys; }

RunConfig::RunConfig() {
    for (const ConfigKey& k : kKeys) values_.emplace(std::string(k.name), std::string(k.default_value));
}

RunConfig RunConfig::parse(std::string_view text) {
    RunConfig cfg;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error("config line " + std::to_string(line_no) + ": expected key=value");
        }
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void RunConfig::set(std::string_view key, std::string_view value) {
    const ConfigKey* k = find_key(key);
    if (k == nullptr) throw Error("config: unknown key '" + std::string(key) + "'");
    check_value(*k, value);
    values_.find(key)->second = std::string(value);
    explicit_[std::string(key)] = true;
}

bool RunConfig::is_set(std::string_view key) const { return explicit_.find(key) != explicit_.end(); }

const std::string& RunConfig::raw(std::string_view key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw Error("config: unknown key '" + std::string(key) + "'");
    return it->second;
}

std::uint64_t RunConfig::u64(std::string_view key) const {
    std::uint64_t v = 0;
    if (!parse_int(raw(key), v)) throw Error("config: key '" + std::string(key) + "' is not an unsigned integer");
    return v;
}

long long RunConfig::integer(std::string_view key) const {
    long long v = 0;
    if (!parse_int(raw(key), v)) throw Error("config: key '" + std::string(key) + "' is not an integer");
    return v;
}

double RunConfig::real(std::string_view key) const {
    double v = 0;
    if (!parse_real(raw(key), v)) throw Error("config: key '" + std::string(key) + "' is not a number");
    return v;
}

bool RunConfig::boolean(std::string_view key) const { return raw(key) == "true"; }

std::string RunConfig::echo() const {
    std::string out;
    for (const ConfigKey& k : kKeys) {
        out += k.name;
        out += '=';
        out += raw(k.name);
        out += '\n';
    }
    return out;
}

std::string RunConfig::hash() const {
    const std::string e = echo();
    return to_hex(sha256({reinterpret_cast<const std::uint8_t*>(e.data()), e.size()}));
}

namespace {

std::size_t positive(const RunConfig& c, std::string_view key) {
    const long long v = c.integer(key);
    if (v <= 0) throw Error("config: key '" + std::string(key) + "' must be positive");
    return static_cast<std::size_t>(v);
}

}  // namespace

data::CorruptionSpec RunConfig::corruption() const {
    data::CorruptionSpec spec{data::parse_corruption(raw("corruption")), static_cast<int>(integer("severity"))};
    spec.validate();
    return spec;
}

CnnSpec RunConfig::model_spec() const {
    CnnSpec spec;
    const std::size_t side = positive(*this, "image_size");
    spec.input = InputSignature{3, side, side};
    spec.conv1_channels = positive(*this, "conv1_channels");
    spec.conv2_channels = positive(*this, "conv2_channels");
    spec.hidden = positive(*this, "hidden");
    spec.num_classes = positive(*this, "num_classes");
    return spec;
}

adapt::PretrainConfig RunConfig::pretrain() const {
    return {positive(*this, "pretrain_epochs"), real("pretrain_lr"), positive(*this, "pretrain_batch")};
}

nsp::NspTrainingConfig RunConfig::nsp() const {
    nsp::NspTrainingConfig c;
    const long long depth = integer("projector_depth");
    if (depth < 0) throw Error("config: key 'projector_depth' must be non-negative");
    c.projector = {static_cast<std::size_t>(depth), positive(*this, "projector_width")};
    c.source = nsp::parse_prototype_source(raw("prototype_source"));
    c.epochs = positive(*this, "nsp_epochs");
    c.lr = real("nsp_lr");
    c.batch_size = positive(*this, "nsp_batch");
    c.alpha = real("momentum");
    c.tau = real("tau");
    return c;
}

swr::SwrVariant RunConfig::swr_variant() const { return swr::parse_variant(raw("swr_variant")); }

adapt::AdaptConfig RunConfig::adapt() const {
    adapt::AdaptConfig c;
    c.mode = adapt::parse_mode(raw("mode"));
    c.lr = raw("lr") == "auto" ? adapt::default_lr(c.mode) : real("lr");
    c.lambda_main_ent = real("lambda_main_ent");
    c.lambda_main_div = real("lambda_main_div");
    c.lambda_aux_ent = real("lambda_aux_ent");
    c.lambda_aux_div = real("lambda_aux_div");
    c.lambda_selfsup = real("lambda_selfsup");
    c.lambda_swr = real("lambda_swr");
    c.tau = real("tau");
    c.bn_mode = parse_bn_mode(raw("bn_mode"));
    c.swr_variant = swr_variant();
    c.projector_finetune = boolean("projector_finetune");
    c.selfsup_stop_gradient = boolean("selfsup_stop_gradient");
    c.prototype_ema = boolean("prototype_ema");
    c.epochs = positive(*this, "epochs");
    c.validate();
    return c;
}

}  // namespace tta::io
