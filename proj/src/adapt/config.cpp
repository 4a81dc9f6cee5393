#include "tta/adapt/config.hpp"

#include <string>

#include "tta/core/error.hpp"

namespace tta::adapt {

std::string_view to_string(AdaptMode mode) {
    switch (mode) {
        case AdaptMode::source_only: return "source_only";
        case AdaptMode::main_only: return "main_only";
        case AdaptMode::main_nsp: return "main_nsp";
        case AdaptMode::main_swr: return "main_swr";
        case AdaptMode::main_swr_nsp_ent: return "main_swr_nsp_ent";
        case AdaptMode::full: return "full";
        case AdaptMode::supervised_oracle: return "supervised_oracle";
    }
    return "?";
}

AdaptMode parse_mode(std::string_view name) {
    for (AdaptMode m : kAllModes)
        if (to_string(m) == name) return m;
    throw Error("unknown adaptation mode '" + std::string(name) + "'");
}

bool uses_main_loss(AdaptMode mode) {
    return mode != AdaptMode::source_only && mode != AdaptMode::supervised_oracle;
}

bool uses_swr(AdaptMode mode) {
    return mode == AdaptMode::main_swr || mode == AdaptMode::main_swr_nsp_ent || mode == AdaptMode::full;
}

bool uses_aux(AdaptMode mode) {
    return mode == AdaptMode::main_nsp || mode == AdaptMode::main_swr_nsp_ent || mode == AdaptMode::full;
}

bool uses_selfsup(AdaptMode mode) { return mode == AdaptMode::main_nsp || mode == AdaptMode::full; }

bool updates_model(AdaptMode mode) { return mode != AdaptMode::source_only; }

void AdaptConfig::validate() const {
    for (double w : {lambda_main_ent, lambda_main_div, lambda_aux_ent, lambda_aux_div, lambda_selfsup, lambda_swr})
        if (!(w >= 0.0)) throw Error("adapt config: loss weights must be non-negative");
    if (!(tau > 0.0)) throw Error("adapt config: tau must be positive");
    if (updates_model(mode) && !(lr > 0.0)) throw Error("adapt config: lr must be positive");
    if (epochs < 1 || epochs > 3) throw Error("adapt config: epochs must be 1, 2 or 3");
    swr_variant.validate();
    transform.validate();
}

double default_lr(AdaptMode mode) {
    switch (mode) {
        case AdaptMode::source_only: return 0.0;
        case AdaptMode::main_only: return 0.3;
        case AdaptMode::main_nsp: return 0.1;
        case AdaptMode::supervised_oracle: return 0.1;
        case AdaptMode::main_swr:
        case AdaptMode::main_swr_nsp_ent:
        case AdaptMode::full: return 1.0;
    }
    return 0.0;
}

}  // namespace tta::adapt
