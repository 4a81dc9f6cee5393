#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tta/core/network.hpp"

namespace tta {

struct InputSignature {
    std::size_t channels = 3;
    std::size_t height = 16;
    std::size_t width = 16;
    bool operator==(const InputSignature&) const = default;
};

/// Classifier split into an encoder (units [0, encoder_end)) and a classifier
/// head (units [encoder_end, L)). The encoder output is the representation h.
class Model {
public:
    struct Pass {
        Var representation;
        Var logits;
    };

    Model() = default;
    Model(std::vector<LayerUnit> units, std::size_t encoder_end, InputSignature input, std::size_t num_classes,
          BnMode bn_mode = BnMode::running);

    /// Full forward pass on a [N x C x H x W] batch.
    Pass forward(Tape& tape, const Tensor& batch, Mode mode, bool trainable = true);
    Var encode(Tape& tape, const Tensor& batch, Mode mode, bool trainable = true);
    Var classify(Tape& tape, Var representation, Mode mode, bool trainable = true);

    /// Logits without keeping the tape around.
    Tensor predict(const Tensor& batch, Mode mode = Mode::eval);

    Sequential& net() { return net_; }
    const Sequential& net() const { return net_; }
    std::vector<LayerUnit>& units() { return net_.units(); }
    const std::vector<LayerUnit>& units() const { return net_.units(); }

    std::size_t encoder_end() const { return encoder_end_; }
    const InputSignature& input() const { return input_; }
    std::size_t num_classes() const { return num_classes_; }
    std::size_t representation_dim() const;
    BnMode bn_mode() const { return bn_mode_; }
    void set_bn_mode(BnMode mode) { bn_mode_ = mode; }

    /// True for parametric units belonging to the encoder.
    bool in_encoder(std::size_t unit_index) const { return unit_index < encoder_end_; }

    void zero_grads() { net_.zero_grads(); }

private:
    void check_batch(const Tensor& batch) const;

    Sequential net_;
    std::size_t encoder_end_ = 0;
    InputSignature input_;
    std::size_t num_classes_ = 0;
    BnMode bn_mode_ = BnMode::running;
};

/// conv(3->c1) bn relu pool, conv(c1->c2) bn relu pool, flatten,
/// linear(-> hidden) bn relu | linear(-> classes).
struct CnnSpec {
    InputSignature input;
    std::size_t conv1_channels = 8;
    std::size_t conv2_channels = 8;
    std::size_t hidden = 24;
    std::size_t num_classes = 5;
};

/// flatten, [linear bn relu] per hidden width | linear(-> classes).
struct MlpSpec {
    InputSignature input;
    std::vector<std::size_t> hidden = {64, 32};
    std::size_t num_classes = 5;
    bool batchnorm = true;
};

Model make_cnn(const CnnSpec& spec, std::uint64_t seed);
Model make_mlp(const MlpSpec& spec, std::uint64_t seed);

/// Index of the unit holding the classifier's final linear layer.
std::size_t final_linear_unit(const Model& model);

}  // namespace tta
