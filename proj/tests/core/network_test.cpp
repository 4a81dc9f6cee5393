#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "tta/core/error.hpp"
#include "tta/core/functional.hpp"
#include "tta/core/model.hpp"
#include "tta/core/ops.hpp"
#include "tta/core/rng.hpp"

namespace tta {
namespace {

Tensor random_batch(std::size_t n, std::uint64_t seed, const InputSignature& in = {}) {
    Rng rng(seed);
    Tensor t({n, in.channels, in.height, in.width});
    for (double& v : t.data) v = rng.uniform();
    return t;
}

Model small_cnn(std::uint64_t seed = 1) { return make_cnn(CnnSpec{}, seed); }

TEST(Model, DefaultCnnIsDeskSized) {
    Model m = small_cnn();
    EXPECT_LE(m.net().parameter_count(), 5000u);
    EXPECT_EQ(m.net().parametric_units().size(), 7u);
    EXPECT_EQ(m.representation_dim(), 24u);
    EXPECT_FALSE(m.in_encoder(final_linear_unit(m)));
}

TEST(Model, EncoderSplitMustBeProper) {
    std::vector<LayerUnit> units{LayerUnit::linear("a", 2, 2), LayerUnit::linear("b", 2, 2)};
    EXPECT_THROW(Model(units, 0, {}, 2), Error);
    EXPECT_THROW(Model(units, 2, {}, 2), Error);
    EXPECT_NO_THROW(Model(units, 1, {}, 2));
}

TEST(Model, SoftmaxOfLogitsSumsToOne) {
    for (BnMode mode : {BnMode::running, BnMode::batch}) {
        Model m = small_cnn(3);
        m.set_bn_mode(mode);
        Tensor logits = m.predict(random_batch(6, 9));
        for (std::size_t i = 0; i < 6; ++i) {
            auto p = stable_softmax(logits.row(i));
            double total = 0.0;
            for (double v : p) total += v;
            EXPECT_NEAR(total, 1.0, 1e-12);
        }
    }
}

TEST(Model, ShapeMismatchNamesUnit) {
    Model m = small_cnn();
    Tensor wrong({2, 3, 8, 8});
    try {
        m.predict(wrong);
        FAIL() << "expected ShapeError";
    } catch (const ShapeError& e) {
        EXPECT_NE(std::string(e.what()).find("conv1"), std::string::npos);
    }
    // Mismatch inside the stack is reported by the failing unit.
    std::vector<LayerUnit> units{LayerUnit::act("flatten", ActivationKind::flatten), LayerUnit::linear("fc_bad", 7, 2),
                                 LayerUnit::linear("head", 2, 2)};
    Model bad(units, 2, InputSignature{3, 4, 4}, 2);
    try {
        bad.predict(Tensor({2, 3, 4, 4}));
        FAIL() << "expected ShapeError";
    } catch (const ShapeError& e) {
        EXPECT_NE(std::string(e.what()).find("fc_bad"), std::string::npos);
    }
}

TEST(Model, BatchStatsNeedTwoSamples) {
    Model m = small_cnn();
    m.set_bn_mode(BnMode::batch);
    EXPECT_THROW(m.predict(random_batch(1, 2)), Error);
    m.set_bn_mode(BnMode::running);
    EXPECT_NO_THROW(m.predict(random_batch(1, 2)));
}

TEST(Model, EvalLeavesRunningStatsAlone) {
    Model m = small_cnn();
    const auto before = m.units()[1].running_mean;
    m.set_bn_mode(BnMode::batch);
    m.predict(random_batch(4, 2), Mode::eval);
    m.set_bn_mode(BnMode::running);
    m.predict(random_batch(4, 2), Mode::eval);
    EXPECT_EQ(m.units()[1].running_mean, before);
    m.predict(random_batch(4, 2), Mode::train);
    EXPECT_NE(m.units()[1].running_mean, before);
}

TEST(Model, ForwardBackwardLeavesParametersUnchanged) {
    Model m = small_cnn(4);
    Model copy = m;
    Tape tape;
    auto pass = m.forward(tape, random_batch(4, 5), Mode::eval);
    tape.backward(ops::mean_entropy(tape, ops::softmax(tape, pass.logits)));
    for (std::size_t u = 0; u < m.units().size(); ++u)
        for (std::size_t p = 0; p < m.units()[u].params.size(); ++p)
            EXPECT_TRUE(same_values(m.units()[u].params[p], copy.units()[u].params[p]));
}

TEST(Model, Deterministic) {
    auto run = [] {
        Model m = small_cnn(11);
        m.set_bn_mode(BnMode::batch);
        Tape tape;
        auto pass = m.forward(tape, random_batch(5, 12), Mode::eval);
        tape.backward(ops::mean_entropy(tape, ops::softmax(tape, pass.logits)));
        return std::make_pair(tape.value(pass.logits).data, layer_grad_vectors(m.net()).vectors);
    };
    auto a = run();
    auto b = run();
    EXPECT_EQ(a.first, b.first);
    EXPECT_EQ(a.second, b.second);
}

TEST(GradVectors, ConcatenationOrder) {
    Sequential net({LayerUnit::linear("fc", 2, 2)});
    net.units()[0].params[0].grad = std::vector<double>{1, 2, 3, 4};
    net.units()[0].params[1].grad = std::vector<double>{5, 6};
    auto snap = layer_grad_vectors(net);
    ASSERT_EQ(snap.vectors.size(), 1u);
    EXPECT_EQ(snap.vectors[0], (std::vector<double>{1, 2, 3, 4, 5, 6}));
    EXPECT_EQ(snap.unit_names[0], "fc");
}

TEST(GradVectors, SkipsActivationUnits) {
    Sequential net({LayerUnit::linear("a", 3, 3), LayerUnit::act("r1", ActivationKind::relu),
                    LayerUnit::batchnorm("bn", 3), LayerUnit::act("r2", ActivationKind::relu),
                    LayerUnit::linear("b", 3, 2)});
    net.zero_grads();
    auto snap = layer_grad_vectors(net);
    ASSERT_EQ(snap.vectors.size(), 3u);
    EXPECT_EQ(snap.vectors[0].size(), 12u);
    EXPECT_EQ(snap.vectors[1].size(), 6u);
    for (const auto& v : snap.vectors)
        for (double g : v) EXPECT_EQ(g, 0.0);
}

TEST(GradVectors, MissingGradsFail) {
    Sequential net({LayerUnit::linear("fc", 2, 2)});
    EXPECT_THROW(layer_grad_vectors(net), Error);
}

TEST(ApplyUpdate, Arithmetic) {
    Sequential net({LayerUnit::linear("fc", 1, 1)});
    net.units()[0].params[0].data[0] = 1.0;
    net.zero_grads();
    (*net.units()[0].params[0].grad)[0] = 0.5;
    apply_update(net, 0.0);
    EXPECT_EQ(net.units()[0].params[0].data[0], 1.0);
    apply_update(net, 0.1);
    EXPECT_DOUBLE_EQ(net.units()[0].params[0].data[0], 0.95);
}

TEST(ApplyUpdate, TwoSmallStepsDifferFromOneLargeStep) {
    // f(x) = x^2 from x = 1; gradients are recomputed between the small steps.
    auto step = [](double x, double lr) { return x - lr * 2.0 * x; };
    const double h = 0.1;
    const double two_small = step(step(1.0, h), h);
    const double one_large = step(1.0, 2 * h);
    EXPECT_DOUBLE_EQ(two_small, 0.64);
    EXPECT_DOUBLE_EQ(one_large, 0.6);
    EXPECT_NE(two_small, one_large);

    Sequential net({LayerUnit::linear("x", 1, 1)});
    auto sgd = [&](double lr) {
        net.zero_grads();
        Tape tape;
        Var p = tape.parameter(net.units()[0].params[0]);
        Var sq = ops::linear(tape, p, p, tape.constant(Tensor({1})));  // x * x
        tape.backward(ops::sum(tape, sq));
        apply_update(net, lr);
    };
    net.units()[0].params[0].data[0] = 1.0;
    sgd(h);
    sgd(h);
    EXPECT_DOUBLE_EQ(net.units()[0].params[0].data[0], two_small);
}

TEST(ApplyUpdate, NonFiniteGradNamesUnit) {
    Sequential net({LayerUnit::linear("good", 1, 1), LayerUnit::linear("bad", 1, 1)});
    net.zero_grads();
    (*net.units()[1].params[1].grad)[0] = std::numeric_limits<double>::quiet_NaN();
    const double before = net.units()[0].params[0].data[0];
    try {
        apply_update(net, 0.1);
        FAIL();
    } catch (const NumericError& e) {
        EXPECT_NE(std::string(e.what()).find("bad"), std::string::npos);
    }
    EXPECT_EQ(net.units()[0].params[0].data[0], before);
}

}  // namespace
}  // namespace tta
