#include "tta/core/network.hpp"

#include <cmath>

#include "tta/core/error.hpp"
#include "tta/core/ops.hpp"
#include "tta/core/rng.hpp"

namespace tta {

const char* to_string(UnitKind kind) {
    switch (kind) {
        case UnitKind::linear: return "linear";
        case UnitKind::conv2d: return "conv2d";
        case UnitKind::batchnorm: return "batchnorm";
        case UnitKind::activation: return "activation";
    }
    return "?";
}

const char* to_string(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::none: return "none";
        case ActivationKind::relu: return "relu";
        case ActivationKind::avg_pool2: return "avg_pool2";
        case ActivationKind::flatten: return "flatten";
    }
    return "?";
}

const char* to_string(BnMode mode) { return mode == BnMode::batch ? "batch" : "running"; }

LayerUnit LayerUnit::linear(std::string name, std::size_t in, std::size_t out) {
    LayerUnit u;
    u.name = std::move(name);
    u.kind = UnitKind::linear;
    u.params = {Tensor({out, in}), Tensor({out})};
    return u;
}

LayerUnit LayerUnit::conv2d(std::string name, std::size_t in_channels, std::size_t out_channels) {
    LayerUnit u;
    u.name = std::move(name);
    u.kind = UnitKind::conv2d;
    u.params = {Tensor({out_channels, in_channels, 3, 3}), Tensor({out_channels})};
    return u;
}

LayerUnit LayerUnit::batchnorm(std::string name, std::size_t features) {
    LayerUnit u;
    u.name = std::move(name);
    u.kind = UnitKind::batchnorm;
    u.params = {Tensor({features}, 1.0), Tensor({features}, 0.0)};
    u.running_mean.assign(features, 0.0);
    u.running_var.assign(features, 1.0);
    return u;
}

LayerUnit LayerUnit::act(std::string name, ActivationKind kind) {
    LayerUnit u;
    u.name = std::move(name);
    u.kind = UnitKind::activation;
    u.activation = kind;
    return u;
}

std::size_t LayerUnit::parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : params) n += p.size();
    return n;
}

Var Sequential::forward(Tape& tape, Var x, Mode mode, BnMode bn_mode, std::size_t begin, std::size_t end,
                        bool trainable) {
    if (begin > end || end > units_.size()) throw Error("forward: unit range out of bounds");
    for (std::size_t i = begin; i < end; ++i) {
        LayerUnit& u = units_[i];
        std::vector<Var> p;
        for (Tensor& t : u.params) {
            p.push_back(trainable ? tape.parameter(t) : tape.constant(Tensor(t.shape, t.data)));
        }
        try {
            switch (u.kind) {
                case UnitKind::linear: x = ops::linear(tape, x, p[0], p[1]); break;
                case UnitKind::conv2d: x = ops::conv3x3(tape, x, p[0], p[1]); break;
                case UnitKind::batchnorm: {
                    ops::BatchNormOptions opts;
                    opts.use_batch_stats = mode == Mode::train || bn_mode == BnMode::batch;
                    opts.update_running = mode == Mode::train;
                    opts.running_mean = &u.running_mean;
                    opts.running_var = &u.running_var;
                    x = ops::batch_norm(tape, x, p[0], p[1], opts);
                    break;
                }
                case UnitKind::activation:
                    switch (u.activation) {
                        case ActivationKind::relu: x = ops::relu(tape, x); break;
                        case ActivationKind::avg_pool2: x = ops::avg_pool2(tape, x); break;
                        case ActivationKind::flatten: x = ops::flatten(tape, x); break;
                        case ActivationKind::none: break;
                    }
                    break;
            }
        } catch (const ShapeError& e) {
            throw ShapeError("unit '" + u.name + "' (" + to_string(u.kind) + "): " + e.what());
        } catch (const NumericError&) {
            throw;
        } catch (const Error& e) {
            throw Error("unit '" + u.name + "' (" + to_string(u.kind) + "): " + e.what());
        }
    }
    return x;
}

void Sequential::initialize(std::uint64_t seed) {
    Rng rng(seed);
    for (LayerUnit& u : units_) {
        switch (u.kind) {
            case UnitKind::linear:
            case UnitKind::conv2d: {
                Tensor& w = u.params[0];
                const std::size_t fan_in = w.size() / w.dim(0);
                const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
                for (double& v : w.data) v = rng.normal(0.0, stddev);
                std::fill(u.params[1].data.begin(), u.params[1].data.end(), 0.0);
                break;
            }
            case UnitKind::batchnorm:
                std::fill(u.params[0].data.begin(), u.params[0].data.end(), 1.0);
                std::fill(u.params[1].data.begin(), u.params[1].data.end(), 0.0);
                std::fill(u.running_mean.begin(), u.running_mean.end(), 0.0);
                std::fill(u.running_var.begin(), u.running_var.end(), 1.0);
                break;
            case UnitKind::activation: break;
        }
        for (Tensor& p : u.params) p.grad.reset();
    }
}

std::vector<Tensor*> Sequential::parameters() {
    std::vector<Tensor*> out;
    for (LayerUnit& u : units_)
        for (Tensor& p : u.params) out.push_back(&p);
    return out;
}

std::vector<std::size_t> Sequential::parametric_units() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < units_.size(); ++i)
        if (units_[i].parametric()) idx.push_back(i);
    return idx;
}

std::size_t Sequential::parameter_count() const {
    std::size_t n = 0;
    for (const LayerUnit& u : units_) n += u.parameter_count();
    return n;
}

void Sequential::zero_grads() {
    for (LayerUnit& u : units_)
        for (Tensor& p : u.params) p.zero_grad();
}

GradientSnapshot layer_grad_vectors(const Sequential& net) {
    GradientSnapshot snap;
    for (const LayerUnit& u : net.units()) {
        if (!u.parametric()) continue;
        std::vector<double> flat;
        flat.reserve(u.parameter_count());
        for (const Tensor& p : u.params) {
            if (!p.grad) throw Error("layer_grad_vectors: unit '" + u.name + "' has no gradients");
            flat.insert(flat.end(), p.grad->begin(), p.grad->end());
        }
        snap.unit_names.push_back(u.name);
        snap.vectors.push_back(std::move(flat));
    }
    return snap;
}

void apply_update(Sequential& net, double lr) {
    for (const LayerUnit& u : net.units())
        for (const Tensor& p : u.params) {
            if (!p.grad) throw Error("apply_update: unit '" + u.name + "' has no gradients");
            for (double g : *p.grad)
                if (!std::isfinite(g)) throw NumericError("apply_update: non-finite gradient in unit '" + u.name + "'");
        }
    for (LayerUnit& u : net.units())
        for (Tensor& p : u.params)
            for (std::size_t i = 0; i < p.size(); ++i) p.data[i] -= lr * (*p.grad)[i];
}

std::vector<double> flat_parameters(const LayerUnit& unit) {
    std::vector<double> flat;
    flat.reserve(unit.parameter_count());
    for (const Tensor& p : unit.params) flat.insert(flat.end(), p.data.begin(), p.data.end());
    return flat;
}

}  // namespace tta
