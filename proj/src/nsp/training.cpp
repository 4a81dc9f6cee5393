#include "tta/nsp/training.hpp"

#include <cmath>
#include <string>

#include "tta/core/error.hpp"
#include "tta/core/rng.hpp"
#include "tta/nsp/losses.hpp"
#include "tta/swr/penalty.hpp"

namespace tta::nsp {
namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kOrderStream = 2;
constexpr std::uint64_t kTransformStream = 3;

// Consecutive chunks of `size`; a trailing chunk of one joins the previous one.
std::vector<std::vector<std::size_t>> chunk(const std::vector<std::size_t>& order, std::size_t size) {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t start = 0; start < order.size(); start += size) {
        const std::size_t end = std::min(order.size(), start + size);
        if (end - start == 1 && !out.empty()) {
            out.back().push_back(order[start]);
        } else {
            out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
        }
    }
    return out;
}

Tensor represent(Model& frozen, const Tensor& batch) {
    Tape tape;
    return tape.value(frozen.encode(tape, batch, Mode::eval, false));
}

Tensor project(Projector& projector, const Tensor& h) {
    Tape tape;
    return tape.value(projector.forward(tape, tape.constant(h), Mode::eval, BnMode::batch, false));
}

std::vector<int> labels_of(const data::Dataset& d, const std::vector<std::size_t>& idx) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(d.labels[i]);
    return out;
}

}  // namespace

double prototype_alignment(const Model& model, const Projector& projector, const PrototypeBank& bank,
                           const data::Dataset& source, std::size_t batch_size) {
    Model frozen = model;
    frozen.set_bn_mode(BnMode::running);
    Projector proj = projector;
    std::vector<std::size_t> all(source.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    double total = 0.0;
    for (const auto& idx : chunk(all, batch_size)) {
        const Tensor z = project(proj, represent(frozen, data::stack(source, idx)));
        for (std::size_t r = 0; r < idx.size(); ++r) {
            total += swr::cosine_similarity(z.row(r), bank.prototypes.row(static_cast<std::size_t>(source.labels[idx[r]])));
        }
    }
    return total / static_cast<double>(source.size());
}

NspArtifacts train_projector_and_prototypes(const Model& model, const data::Dataset& source,
                                            const NspTrainingConfig& config, std::uint64_t seed) {
    config.projector.validate();
    config.transform.validate();
    if (config.batch_size < 2) throw Error("projector training: batch_size must be at least 2");
    if (!(config.tau > 0.0)) throw Error("projector training: temperature must be positive");
    if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) throw Error("projector training: momentum must lie in [0, 1]");
    const std::size_t classes = model.num_classes();
    std::vector<bool> present(classes, false);
    for (int y : source.labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= classes) throw Error("projector training: label out of range");
        present[static_cast<std::size_t>(y)] = true;
    }
    for (std::size_t k = 0; k < classes; ++k)
        if (!present[k]) throw Error("projector training: class " + std::to_string(k) + " absent from source data");

    PrototypeSource kind = config.source;
    if (kind == PrototypeSource::classifier_weights && config.projector.depth != 0) {
        throw Error("classifier-weight prototypes need projector depth 0");
    }
    if (config.projector.depth == 0 && kind == PrototypeSource::projection_z) kind = PrototypeSource::representation_h;

    Model frozen = model;
    frozen.set_bn_mode(BnMode::running);
    NspArtifacts out;
    out.projector = Projector(frozen.representation_dim(), config.projector, derive_seed(seed, kInitStream));
    Projector& proj = out.projector;
    PrototypeBank& bank = out.bank;
    bank.alpha = config.alpha;
    bank.tau = config.tau;
    bank.source = kind;
    bank.prototypes = Tensor({classes, proj.output_dim()});

    if (kind == PrototypeSource::classifier_weights) {
        const Tensor& w = frozen.units()[final_linear_unit(frozen)].params[0];
        bank.prototypes = Tensor(w.shape, w.data);
        out.alignment.push_back(prototype_alignment(frozen, proj, bank, source, config.batch_size));
        return out;
    }

    Rng order_rng(derive_seed(seed, kOrderStream));
    {
        std::vector<bool> seen(classes, false);
        std::size_t remaining = classes;
        for (const auto& idx : chunk(order_rng.permutation(source.size()), config.batch_size)) {
            const Tensor z = project(proj, represent(frozen, data::stack(source, idx)));
            for (std::size_t r = 0; r < idx.size(); ++r) {
                const auto k = static_cast<std::size_t>(source.labels[idx[r]]);
                if (seen[k]) continue;
                seen[k] = true;
                --remaining;
                std::copy(z.row(r).begin(), z.row(r).end(), bank.prototypes.row(k).begin());
            }
            if (remaining == 0) break;
        }
    }
    out.alignment.push_back(prototype_alignment(frozen, proj, bank, source, config.batch_size));

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        Rng transform_rng(derive_seed(derive_seed(seed, kTransformStream), epoch));
        std::size_t batch_no = 0;
        for (const auto& idx : chunk(order_rng.permutation(source.size()), config.batch_size)) {
            const std::vector<int> labels = labels_of(source, idx);
            Tensor z;
            if (proj.depth() == 0) {
                z = represent(frozen, data::stack(source, idx));
            } else {
                std::vector<data::Image> shifted;
                shifted.reserve(idx.size());
                for (std::size_t i : idx) shifted.push_back(data::apply_transform(source.images[i], config.transform, transform_rng));
                const Tensor h = represent(frozen, data::stack(source, idx));
                const Tensor h_shifted = represent(frozen, data::stack(shifted));

                Tape tape;
                proj.net().zero_grads();
                const Var zv = proj.forward(tape, tape.constant(h), Mode::train, BnMode::batch, true);
                const Var zs = proj.forward(tape, tape.constant(h_shifted), Mode::train, BnMode::batch, true);
                const Var loss = embedding_loss(tape, nsp_predict(tape, zv, bank), nsp_predict(tape, zs, bank), labels);
                const double value = tape.value(loss)[0];
                if (!std::isfinite(value)) {
                    throw NumericError("projector training: non-finite loss at epoch " + std::to_string(epoch) +
                                       ", batch " + std::to_string(batch_no));
                }
                tape.backward(loss);
                apply_update(proj.net(), config.lr);
                z = tape.value(zv);
            }
            for (std::size_t r = 0; r < idx.size(); ++r) bank.ema_update(static_cast<std::size_t>(labels[r]), z.row(r));
            ++batch_no;
        }
        out.alignment.push_back(prototype_alignment(frozen, proj, bank, source, config.batch_size));
    }
    return out;
}

}  // namespace tta::nsp
