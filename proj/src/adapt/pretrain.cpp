#include "tta/adapt/pretrain.hpp"

#include <cmath>
#include <string>

#include "tta/core/error.hpp"
#include "tta/core/functional.hpp"
#include "tta/core/ops.hpp"
#include "tta/core/rng.hpp"

namespace tta::adapt {

PretrainReport pretrain_source(Model& model, const data::Dataset& dataset, const PretrainConfig& config,
                               std::uint64_t seed) {
    if (config.batch_size < 2) throw Error("pretrain: batch_size must be at least 2");
    if (dataset.size() < 2) throw Error("pretrain: dataset needs at least two examples");
    if (!(config.lr >= 0.0)) throw Error("pretrain: lr must be non-negative");
    model.set_bn_mode(BnMode::batch);
    Rng rng(seed);
    PretrainReport report;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto order = rng.permutation(dataset.size());
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start + 2 <= order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                               order.begin() + static_cast<std::ptrdiff_t>(end));
            std::vector<int> labels;
            for (std::size_t i : idx) labels.push_back(dataset.labels[i]);
            Tape tape;
            model.zero_grads();
            const auto pass = model.forward(tape, data::stack(dataset, idx), Mode::train);
            const Var loss = ops::softmax_cross_entropy(tape, pass.logits, labels);
            const double value = tape.value(loss)[0];
            if (!std::isfinite(value)) {
                throw NumericError("pretrain: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(batches));
            }
            tape.backward(loss);
            apply_update(model.net(), config.lr);
            epoch_loss += value;
            ++batches;
        }
        report.final_loss = batches ? epoch_loss / static_cast<double>(batches) : 0.0;
    }
    model.set_bn_mode(BnMode::running);
    report.train_accuracy = accuracy(model, dataset, BnMode::running);
    return report;
}

double accuracy(Model& model, const data::Dataset& dataset, BnMode bn_mode, std::size_t batch_size) {
    const BnMode saved = model.bn_mode();
    model.set_bn_mode(bn_mode);
    std::size_t correct = 0;
    for (std::size_t start = 0; start < dataset.size(); start += batch_size) {
        std::vector<std::size_t> idx;
        for (std::size_t i = start; i < std::min(dataset.size(), start + batch_size); ++i) idx.push_back(i);
        const Tensor logits = model.predict(data::stack(dataset, idx));
        for (std::size_t r = 0; r < idx.size(); ++r)
            correct += argmax(logits.row(r)) == static_cast<std::size_t>(dataset.labels[idx[r]]);
    }
    model.set_bn_mode(saved);
    return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

}  // namespace tta::adapt
