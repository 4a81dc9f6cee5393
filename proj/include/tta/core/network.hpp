#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tta/core/tape.hpp"
#include "tta/core/tensor.hpp"

namespace tta {

enum class UnitKind : std::uint8_t { linear = 0, conv2d = 1, batchnorm = 2, activation = 3 };
enum class ActivationKind : std::uint8_t { none = 0, relu = 1, avg_pool2 = 2, flatten = 3 };

/// Which statistics batchnorm units normalize with outside of training.
enum class BnMode : std::uint8_t { running = 0, batch = 1 };

/// train: batch statistics, running estimates updated.
/// eval: statistics per BnMode, running estimates left alone.
enum class Mode : std::uint8_t { train, eval };

const char* to_string(UnitKind kind);
const char* to_string(ActivationKind kind);
const char* to_string(BnMode mode);

/// One named layer owning all of its parameters. A unit is the granularity
/// of per-layer gradient vectors and penalties.
struct LayerUnit {
    std::string name;
    UnitKind kind = UnitKind::activation;
    ActivationKind activation = ActivationKind::none;
    /// linear: weight[out x in], bias[out]; conv2d: weight[out x in x 3 x 3], bias[out];
    /// batchnorm: gamma[f], beta[f]; activation: none.
    std::vector<Tensor> params;
    std::vector<double> running_mean;
    std::vector<double> running_var;

    static LayerUnit linear(std::string name, std::size_t in, std::size_t out);
    static LayerUnit conv2d(std::string name, std::size_t in_channels, std::size_t out_channels);
    static LayerUnit batchnorm(std::string name, std::size_t features);
    static LayerUnit act(std::string name, ActivationKind kind);

    bool parametric() const { return !params.empty(); }
    std::size_t parameter_count() const;
};

/// Per parametric unit, the concatenated gradients of its parameters.
struct GradientSnapshot {
    std::vector<std::string> unit_names;
    std::vector<std::vector<double>> vectors;
};

/// Ordered stack of layer units.
class Sequential {
public:
    Sequential() = default;
    explicit Sequential(std::vector<LayerUnit> units) : units_(std::move(units)) {}

    std::vector<LayerUnit>& units() { return units_; }
    const std::vector<LayerUnit>& units() const { return units_; }

    /// Runs units [begin, end). When `trainable` is false parameters enter the
    /// tape as constants and receive no gradient.
    Var forward(Tape& tape, Var x, Mode mode, BnMode bn_mode, std::size_t begin, std::size_t end,
                bool trainable = true);
    Var forward(Tape& tape, Var x, Mode mode, BnMode bn_mode, bool trainable = true) {
        return forward(tape, x, mode, bn_mode, 0, units_.size(), trainable);
    }

    /// He-normal weights, zero biases, unit gamma, zero beta, fresh running stats.
    void initialize(std::uint64_t seed);

    std::vector<Tensor*> parameters();
    std::vector<std::size_t> parametric_units() const;
    std::size_t parameter_count() const;

    void zero_grads();

private:
    std::vector<LayerUnit> units_;
};

/// Flat gradient vector per parametric unit in declaration order.
GradientSnapshot layer_grad_vectors(const Sequential& net);

/// theta <- theta - lr * grad for every parameter. Checks every gradient is
/// finite before touching anything.
void apply_update(Sequential& net, double lr);

/// Concatenated parameter values of one unit.
std::vector<double> flat_parameters(const LayerUnit& unit);

}  // namespace tta
