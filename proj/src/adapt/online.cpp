#include "tta/adapt/online.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "tta/adapt/losses.hpp"
#include "tta/core/error.hpp"
#include "tta/core/functional.hpp"
#include "tta/core/ops.hpp"
#include "tta/core/rng.hpp"
#include "tta/nsp/losses.hpp"

namespace tta::adapt {
namespace {

constexpr std::uint64_t kViewStream = 0x76696577;

double mean_row_entropy(const Tensor& probs) {
    double total = 0.0;
    for (std::size_t i = 0; i < probs.dim(0); ++i) total += entropy(probs.row(i));
    return total / static_cast<double>(probs.dim(0));
}

bool all_finite(const Sequential& net) {
    for (const LayerUnit& u : net.units())
        for (const Tensor& p : u.params)
            for (double v : p.data)
                if (!std::isfinite(v)) return false;
    return true;
}

bool same_shaping(const swr::SwrVariant& a, const swr::SwrVariant& b) {
    return a.exponent == b.exponent && a.flip == b.flip && a.manual_curve == b.manual_curve &&
           a.constant_value == b.constant_value;
}

}  // namespace

AdaptState AdaptState::from(const SourceArtifacts& artifacts, const AdaptConfig& config) {
    AdaptState st{artifacts.model, artifacts.projector, artifacts.bank, artifacts.penalty, {}};
    st.model.set_bn_mode(config.bn_mode);
    st.bank.tau = config.tau;
    st.theta_star = swr::ThetaStar::capture(st.model, config.swr_variant.theta_star_policy);
    return st;
}

StepResult tta_step(AdaptState& st, const data::StreamBatch& batch, const AdaptConfig& config,
                    std::uint64_t view_seed) {
    const AdaptMode mode = config.mode;
    const bool update = updates_model(mode);
    const bool aux = uses_aux(mode);
    const bool have_bank = st.bank.num_classes() > 0;
    const bool projector_trainable = update && aux && config.projector_finetune;
    if (aux && !have_bank) throw Error("tta_step: mode " + std::string(to_string(mode)) + " needs prototypes");
    if (uses_swr(mode) && st.penalty.size() == 0) {
        throw Error("tta_step: mode " + std::string(to_string(mode)) + " needs a penalty vector");
    }
    st.model.set_bn_mode(config.bn_mode);

    StepResult r;
    Tape tape;
    st.model.zero_grads();
    if (projector_trainable) st.projector.net().zero_grads();
    const auto pass = st.model.forward(tape, batch.images, Mode::eval, update);
    const Var probs = ops::softmax(tape, pass.logits);
    const Tensor& logits = tape.value(pass.logits);
    r.predictions.reserve(logits.dim(0));
    for (std::size_t i = 0; i < logits.dim(0); ++i) r.predictions.push_back(static_cast<int>(argmax(logits.row(i))));
    r.mean_main_entropy = mean_row_entropy(tape.value(probs));
    r.mean_nsp_entropy = std::numeric_limits<double>::quiet_NaN();

    Var z, nsp_probs;
    if (have_bank) {
        z = st.projector.forward(tape, pass.representation, Mode::eval, config.bn_mode, projector_trainable);
        nsp_probs = nsp::nsp_predict(tape, z, st.bank);
        r.mean_nsp_entropy = mean_row_entropy(tape.value(nsp_probs));
    }
    if (!update) return r;

    std::vector<Var> terms;
    if (uses_main_loss(mode)) {
        terms.push_back(main_entropy_loss(tape, probs, config.lambda_main_ent, config.lambda_main_div));
    }
    if (mode == AdaptMode::supervised_oracle) {
        terms.push_back(ops::softmax_cross_entropy(tape, pass.logits, data::reveal_for_supervision(batch.labels)));
    }
    if (aux) {
        const nsp::AuxWeights weights{config.lambda_aux_ent, config.lambda_aux_div,
                                      uses_selfsup(mode) ? config.lambda_selfsup : 0.0};
        Var shifted_probs = nsp_probs;
        if (weights.selfsup != 0.0) {
            Rng rng(view_seed);
            std::vector<data::Image> views = data::unstack(batch.images);
            for (data::Image& img : views) img = data::apply_transform(img, config.transform, rng);
            const Var h_shifted = st.model.encode(tape, data::stack(views), Mode::eval, true);
            const Var z_shifted =
                st.projector.forward(tape, h_shifted, Mode::eval, config.bn_mode, projector_trainable);
            shifted_probs = nsp::nsp_predict(tape, z_shifted, st.bank);
        }
        terms.push_back(nsp::aux_total(tape, nsp_probs, shifted_probs, weights, config.selfsup_stop_gradient));
    }
    Var total = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) total = ops::add(tape, total, terms[i]);
    r.loss = tape.value(total)[0];
    if (uses_swr(mode)) r.loss += swr::swr_value(st.model, st.theta_star, st.penalty, config.lambda_swr);
    if (!std::isfinite(r.loss)) {
        r.aborted = true;
        r.incident = "non-finite loss";
        return r;
    }
    tape.backward(total);

    const Model model_before = st.model;
    const nsp::Projector projector_before = projector_trainable ? st.projector : nsp::Projector();
    try {
        if (uses_swr(mode)) {
            swr::swr_proximal_step(st.model, st.theta_star, st.penalty, config.lambda_swr, config.lr);
        } else {
            apply_update(st.model.net(), config.lr);
        }
        if (projector_trainable) apply_update(st.projector.net(), config.lr);
        if (!all_finite(st.model.net()) || !all_finite(st.projector.net())) {
            throw NumericError("non-finite parameter after update");
        }
    } catch (const NumericError& e) {
        st.model = model_before;
        if (projector_trainable) st.projector = projector_before;
        r.aborted = true;
        r.incident = e.what();
        return r;
    }
    swr::advance_theta_star(st.theta_star, st.model);

    if (config.prototype_ema && have_bank) {
        const Tensor& zv = tape.value(z);
        const Tensor& pv = tape.value(nsp_probs);
        for (std::size_t i = 0; i < zv.dim(0); ++i) st.bank.ema_update(argmax(pv.row(i)), zv.row(i));
    }
    return r;
}

void check_artifacts(const SourceArtifacts& a, const AdaptConfig& config) {
    const std::string mode(to_string(config.mode));
    if (a.has_penalty()) {
        if (a.penalty.source_hash != a.model_hash) {
            throw HashMismatch("penalty vector was computed from checkpoint " + to_hex(a.penalty.source_hash) +
                               ", not " + to_hex(a.model_hash));
        }
        swr::check_layout(a.penalty, a.model);
        if (uses_swr(config.mode) && !same_shaping(a.penalty.variant, config.swr_variant)) {
            throw Error("penalty vector variant '" + swr::format_variant(a.penalty.variant) +
                        "' differs from the configured '" + swr::format_variant(config.swr_variant) + "'");
        }
    } else if (uses_swr(config.mode)) {
        throw Error("mode " + mode + " needs a penalty vector");
    }
    if (a.has_prototypes()) {
        if (a.bank.source_hash != a.model_hash) {
            throw HashMismatch("prototype bank was built from checkpoint " + to_hex(a.bank.source_hash) + ", not " +
                               to_hex(a.model_hash));
        }
        if (a.projector.source_hash() != a.model_hash) {
            throw HashMismatch("projector was trained against checkpoint " + to_hex(a.projector.source_hash()) +
                               ", not " + to_hex(a.model_hash));
        }
        if (a.bank.num_classes() != a.model.num_classes()) throw Error("prototype bank class count differs from model");
        if (a.projector.input_dim() != a.model.representation_dim() || a.projector.output_dim() != a.bank.dim()) {
            throw ShapeError("projector dimensions do not match the model and prototype bank");
        }
    } else if (uses_aux(config.mode)) {
        throw Error("mode " + mode + " needs a projector and prototype bank");
    }
}

MetricsRecord run_online_evaluation(const SourceArtifacts& artifacts, data::TargetStream& stream,
                                    const AdaptConfig& config, const RunInfo& info) {
    config.validate();
    check_artifacts(artifacts, config);
    if (stream.num_classes() != artifacts.model.num_classes()) {
        throw Error("target stream class count differs from the model");
    }
    AdaptState st = AdaptState::from(artifacts, config);
    MetricsRecorder recorder;
    const std::uint64_t view_base = derive_seed(info.seed, kViewStream);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::optional<data::TargetStream> replay;
        if (epoch > 0) replay = stream.reshuffled(epoch);
        data::TargetStream& current = replay ? *replay : stream;
        while (auto batch = current.next()) {
            const std::uint64_t view_seed = derive_seed(view_base, epoch * 1'000'003 + batch->batch_index);
            const StepResult step = tta_step(st, *batch, config, view_seed);
            recorder.record(epoch, *batch, step.predictions, step.mean_main_entropy, step.mean_nsp_entropy,
                            step.aborted);
        }
    }
    MetricsRecord record;
    record.run_id = info.run_id;
    record.seed = info.seed;
    record.corruption = std::string(data::to_string(stream.corruption().kind));
    record.severity = stream.corruption().severity;
    record.mode = config.mode;
    record.lr = updates_model(config.mode) ? config.lr : 0.0;
    record.epochs = config.epochs;
    recorder.finish(record, config.epochs - 1);
    return record;
}

std::vector<AblationEntry> table_rows(double lr_main, double lr_full) {
    return {{AdaptMode::main_only, lr_main},
            {AdaptMode::main_nsp, lr_full},
            {AdaptMode::main_swr, lr_full},
            {AdaptMode::main_swr_nsp_ent, lr_full},
            {AdaptMode::full, lr_full}};
}

std::vector<AblationEntry> lr_sweep(const std::vector<AdaptMode>& modes, const std::vector<double>& lrs) {
    std::vector<AblationEntry> out;
    for (AdaptMode m : modes)
        for (double lr : lrs) out.push_back({m, lr});
    return out;
}

std::vector<MetricsRecord> ablation_matrix(const SourceArtifacts& artifacts, const data::Dataset& target,
                                           const data::CorruptionSpec& corruption, std::size_t batch_size,
                                           const std::vector<AblationEntry>& entries,
                                           const std::vector<std::uint64_t>& seeds, const AdaptConfig& base) {
    std::vector<MetricsRecord> out;
    for (const AblationEntry& entry : entries)
        for (std::uint64_t seed : seeds) {
            AdaptConfig config = base;
            config.mode = entry.mode;
            config.lr = entry.lr;
            const std::string run_id = std::string(to_string(entry.mode)) + "_lr" + std::to_string(entry.lr) + "_s" +
                                       std::to_string(seed);
            try {
                data::TargetStream stream(target, corruption, seed, batch_size);
                out.push_back(run_online_evaluation(artifacts, stream, config, {run_id, seed}));
            } catch (const std::exception& e) {
                MetricsRecord failed;
                failed.run_id = run_id;
                failed.seed = seed;
                failed.corruption = std::string(data::to_string(corruption.kind));
                failed.severity = corruption.severity;
                failed.mode = entry.mode;
                failed.lr = entry.lr;
                failed.epochs = base.epochs;
                failed.failure = e.what();
                out.push_back(std::move(failed));
            }
        }
    return out;
}

}  // namespace tta::adapt
