#include "tta/core/model.hpp"

#include "tta/core/error.hpp"

namespace tta {

Model::Model(std::vector<LayerUnit> units, std::size_t encoder_end, InputSignature input, std::size_t num_classes,
             BnMode bn_mode)
    : net_(std::move(units)), encoder_end_(encoder_end), input_(input), num_classes_(num_classes), bn_mode_(bn_mode) {
    if (encoder_end_ == 0 || encoder_end_ >= net_.units().size()) {
        throw Error("model: encoder_end must split the units into two non-empty parts");
    }
}

void Model::check_batch(const Tensor& batch) const {
    if (batch.rank() != 4 || batch.dim(1) != input_.channels || batch.dim(2) != input_.height ||
        batch.dim(3) != input_.width) {
        throw ShapeError("unit '" + units().front().name + "' (input): expected [N x " + std::to_string(input_.channels) +
                         " x " + std::to_string(input_.height) + " x " + std::to_string(input_.width) + "], got " +
                         to_string(batch.shape));
    }
}

Var Model::encode(Tape& tape, const Tensor& batch, Mode mode, bool trainable) {
    check_batch(batch);
    Var x = tape.constant(Tensor(batch.shape, batch.data));
    return net_.forward(tape, x, mode, bn_mode_, 0, encoder_end_, trainable);
}

Var Model::classify(Tape& tape, Var representation, Mode mode, bool trainable) {
    return net_.forward(tape, representation, mode, bn_mode_, encoder_end_, net_.units().size(), trainable);
}

Model::Pass Model::forward(Tape& tape, const Tensor& batch, Mode mode, bool trainable) {
    Pass pass;
    pass.representation = encode(tape, batch, mode, trainable);
    pass.logits = classify(tape, pass.representation, mode, trainable);
    return pass;
}

Tensor Model::predict(const Tensor& batch, Mode mode) {
    Tape tape;
    Pass pass = forward(tape, batch, mode, false);
    return tape.value(pass.logits);
}

std::size_t Model::representation_dim() const {
    const LayerUnit& head = units()[final_linear_unit(*this)];
    return head.params[0].dim(1);
}

Model make_cnn(const CnnSpec& spec, std::uint64_t seed) {
    if (spec.input.height % 4 || spec.input.width % 4) {
        throw ShapeError("make_cnn: image size must be divisible by 4");
    }
    const std::size_t flat = spec.conv2_channels * (spec.input.height / 4) * (spec.input.width / 4);
    std::vector<LayerUnit> units;
    units.push_back(LayerUnit::conv2d("conv1", spec.input.channels, spec.conv1_channels));
    units.push_back(LayerUnit::batchnorm("bn1", spec.conv1_channels));
    units.push_back(LayerUnit::act("relu1", ActivationKind::relu));
    units.push_back(LayerUnit::act("pool1", ActivationKind::avg_pool2));
    units.push_back(LayerUnit::conv2d("conv2", spec.conv1_channels, spec.conv2_channels));
    units.push_back(LayerUnit::batchnorm("bn2", spec.conv2_channels));
    units.push_back(LayerUnit::act("relu2", ActivationKind::relu));
    units.push_back(LayerUnit::act("pool2", ActivationKind::avg_pool2));
    units.push_back(LayerUnit::act("flatten", ActivationKind::flatten));
    units.push_back(LayerUnit::linear("fc1", flat, spec.hidden));
    units.push_back(LayerUnit::batchnorm("bn3", spec.hidden));
    units.push_back(LayerUnit::act("relu3", ActivationKind::relu));
    const std::size_t encoder_end = units.size();
    units.push_back(LayerUnit::linear("fc2", spec.hidden, spec.num_classes));
    Model m(std::move(units), encoder_end, spec.input, spec.num_classes);
    m.net().initialize(seed);
    return m;
}

Model make_mlp(const MlpSpec& spec, std::uint64_t seed) {
    if (spec.hidden.empty()) throw Error("make_mlp: need at least one hidden layer");
    std::vector<LayerUnit> units;
    units.push_back(LayerUnit::act("flatten", ActivationKind::flatten));
    std::size_t in = spec.input.channels * spec.input.height * spec.input.width;
    for (std::size_t i = 0; i < spec.hidden.size(); ++i) {
        const std::string idx = std::to_string(i + 1);
        units.push_back(LayerUnit::linear("fc" + idx, in, spec.hidden[i]));
        if (spec.batchnorm) units.push_back(LayerUnit::batchnorm("bn" + idx, spec.hidden[i]));
        units.push_back(LayerUnit::act("relu" + idx, ActivationKind::relu));
        in = spec.hidden[i];
    }
    const std::size_t encoder_end = units.size();
    units.push_back(LayerUnit::linear("fc" + std::to_string(spec.hidden.size() + 1), in, spec.num_classes));
    Model m(std::move(units), encoder_end, spec.input, spec.num_classes);
    m.net().initialize(seed);
    return m;
}

std::size_t final_linear_unit(const Model& model) {
    const auto& units = model.units();
    for (std::size_t i = units.size(); i-- > 0;)
        if (units[i].kind == UnitKind::linear) return i;
    throw Error("model has no linear unit");
}

}  // namespace tta
