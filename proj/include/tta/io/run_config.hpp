#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tta/adapt/config.hpp"
#include "tta/adapt/pretrain.hpp"
#include "tta/core/model.hpp"
#include "tta/data/corruption.hpp"
#include "tta/nsp/training.hpp"

namespace tta::io {

enum class ValueType { u64, integer, real, boolean, text };

struct ConfigKey {
    std::string_view name;
    ValueType type;
    std::string_view default_value;
    std::string_view help;
};

/// Every recognised key, in echo order.
std::span<const ConfigKey> config_keys();

/// Flat key=value configuration. Unknown keys and malformed values are
/// rejected when set.
class RunConfig {
public:
    RunConfig();

    /// One pair per line; blank lines and lines starting with '#' are
    /// ignored; whitespace around keys and values is trimmed.
    static RunConfig parse(std::string_view text);
    static RunConfig load(const std::filesystem::path& path);

    void set(std::string_view key, std::string_view value);
    bool is_set(std::string_view key) const;
    const std::string& raw(std::string_view key) const;

    std::uint64_t u64(std::string_view key) const;
    long long integer(std::string_view key) const;
    double real(std::string_view key) const;
    bool boolean(std::string_view key) const;
    const std::string& text(std::string_view key) const { return raw(key); }

    /// "key=value" lines for every key in echo order.
    std::string echo() const;
    /// Hex SHA-256 of echo().
    std::string hash() const;

    // Typed views.
    data::CorruptionSpec corruption() const;
    CnnSpec model_spec() const;
    adapt::PretrainConfig pretrain() const;
    nsp::NspTrainingConfig nsp() const;
    swr::SwrVariant swr_variant() const;
    /// lr "auto" resolves to default_lr(mode).
    adapt::AdaptConfig adapt() const;

private:
    std::map<std::string, std::string, std::less<>> values_;
    std::map<std::string, bool, std::less<>> explicit_;
};

}  // namespace tta::io
