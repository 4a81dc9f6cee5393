#include "tta/nsp/prototypes.hpp"

#include <cmath>
#include <string>

#include "tta/core/error.hpp"
#include "tta/core/functional.hpp"
#include "tta/core/ops.hpp"

namespace tta::nsp {

std::string_view to_string(PrototypeSource source) {
    switch (source) {
        case PrototypeSource::projection_z: return "projection_z";
        case PrototypeSource::representation_h: return "representation_h";
        case PrototypeSource::classifier_weights: return "classifier_weights";
    }
    return "?";
}

PrototypeSource parse_prototype_source(std::string_view name) {
    for (auto s : {PrototypeSource::projection_z, PrototypeSource::representation_h,
                   PrototypeSource::classifier_weights})
        if (to_string(s) == name) return s;
    throw Error("unknown prototype source '" + std::string(name) + "'");
}

void PrototypeBank::ema_update(std::size_t k, std::span<const double> z) {
    if (k >= num_classes()) throw Error("prototype update: class " + std::to_string(k) + " out of range");
    if (z.size() != dim()) throw ShapeError("prototype update: projection dim " + std::to_string(z.size()) +
                                            " vs prototype dim " + std::to_string(dim()));
    auto q = prototypes.row(k);
    for (std::size_t j = 0; j < z.size(); ++j) q[j] = alpha * q[j] + (1.0 - alpha) * z[j];
}

bool PrototypeBank::operator==(const PrototypeBank& other) const {
    return same_values(prototypes, other.prototypes) && alpha == other.alpha && tau == other.tau &&
           source == other.source && source_hash == other.source_hash;
}

std::vector<double> nsp_predict(std::span<const double> z, const PrototypeBank& bank) {
    const std::size_t c = bank.num_classes(), d = bank.dim();
    if (z.size() != d) {
        throw ShapeError("nsp_predict: projection dim " + std::to_string(z.size()) + " vs prototype dim " +
                         std::to_string(d));
    }
    double zn = 0.0;
    for (double v : z) zn += v * v;
    zn = std::sqrt(zn);
    if (zn < 1e-12) return std::vector<double>(c, 1.0 / static_cast<double>(c));
    std::vector<double> sims(c, 0.0);
    for (std::size_t k = 0; k < c; ++k) {
        const auto q = bank.prototypes.row(k);
        double dot = 0.0, qn = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            dot += z[j] * q[j];
            qn += q[j] * q[j];
        }
        qn = std::sqrt(qn);
        sims[k] = qn < 1e-12 ? 0.0 : dot / (zn * qn);
    }
    return stable_softmax(sims, bank.tau);
}

Var nsp_predict(Tape& tape, Var z, const PrototypeBank& bank) {
    return ops::softmax(tape, ops::cosine_logits(tape, z, bank.prototypes, bank.tau));
}

}  // namespace tta::nsp
