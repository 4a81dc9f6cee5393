#include <gtest/gtest.h>

#include <cmath>

#include "tta/core/error.hpp"
#include "tta/core/ops.hpp"
#include "tta/core/rng.hpp"

namespace tta {
namespace {

Tensor random_tensor(Shape shape, std::uint64_t seed, double scale = 1.0) {
    Rng rng(seed);
    Tensor t(std::move(shape));
    for (double& v : t.data) v = rng.normal(0.0, scale);
    return t;
}

TEST(Linear, IdentityWeightIsIdentity) {
    Tape tape;
    Var x = tape.constant(Tensor({2, 3}, {1, 2, 3, 4, 5, 6}));
    Var w = tape.constant(Tensor({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1}));
    Var b = tape.constant(Tensor({3}));
    Var y = ops::linear(tape, x, w, b);
    EXPECT_EQ(tape.value(y).data, tape.value(x).data);
}

TEST(Linear, ShapeMismatch) {
    Tape tape;
    Var x = tape.constant(Tensor({2, 3}));
    Var w = tape.constant(Tensor({4, 2}));
    Var b = tape.constant(Tensor({4}));
    EXPECT_THROW(ops::linear(tape, x, w, b), ShapeError);
}

TEST(Conv3x3, CenterTapIsIdentity) {
    Tape tape;
    Tensor x = random_tensor({2, 1, 4, 4}, 1);
    Tensor w({1, 1, 3, 3});
    w.data[4] = 1.0;
    Var y = ops::conv3x3(tape, tape.constant(x), tape.constant(w), tape.constant(Tensor({1})));
    EXPECT_EQ(tape.value(y).data, x.data);
}

TEST(Conv3x3, ZeroPaddingAtBorder) {
    Tape tape;
    Tensor x({1, 1, 2, 2}, {1, 2, 3, 4});
    Tensor w({1, 1, 3, 3}, 1.0);
    Var y = ops::conv3x3(tape, tape.constant(x), tape.constant(w), tape.constant(Tensor({1}, {0.5})));
    // Every output sees all four inputs through the padded 3x3 window.
    for (double v : tape.value(y).data) EXPECT_DOUBLE_EQ(v, 10.5);
}

TEST(BatchNorm, TwoSampleExample) {
    Tape tape;
    Var x = tape.constant(Tensor({2, 1}, {1.0, 3.0}));
    Var g = tape.constant(Tensor({1}, {1.0}));
    Var b = tape.constant(Tensor({1}, {0.0}));
    Var y = ops::batch_norm(tape, x, g, b, {});
    EXPECT_NEAR(tape.value(y).data[0], -1.0, 1e-5);
    EXPECT_NEAR(tape.value(y).data[1], 1.0, 1e-5);
    EXPECT_DOUBLE_EQ(tape.value(y).data[1], 1.0 / std::sqrt(1.0 + 1e-5));
}

TEST(BatchNorm, SingleSampleBatchStatsFail) {
    Tape tape;
    Var x = tape.constant(Tensor({1, 3}));
    Var g = tape.constant(Tensor({3}, 1.0));
    Var b = tape.constant(Tensor({3}));
    EXPECT_THROW(ops::batch_norm(tape, x, g, b, {}), Error);
}

TEST(BatchNorm, BatchModeStandardizes) {
    for (std::size_t n : {2u, 3u, 17u}) {
        for (bool spatial : {false, true}) {
            Tape tape;
            Shape shape = spatial ? Shape{n, 3, 2, 2} : Shape{n, 4};
            const std::size_t f = shape[1];
            Tensor xv = random_tensor(shape, 10 + n, 3.0);
            for (double& v : xv.data) v += 5.0;
            Var y = ops::batch_norm(tape, tape.constant(xv), tape.constant(Tensor({f}, 1.0)),
                                    tape.constant(Tensor({f})), {});
            const auto& yd = tape.value(y).data;
            const std::size_t per = xv.size() / (n * f);
            for (std::size_t c = 0; c < f; ++c) {
                double m = 0.0, s = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t p = 0; p < per; ++p) m += yd[(i * f + c) * per + p];
                m /= static_cast<double>(n * per);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t p = 0; p < per; ++p) s += std::pow(yd[(i * f + c) * per + p] - m, 2);
                s /= static_cast<double>(n * per);
                EXPECT_NEAR(m, 0.0, 1e-6);
                EXPECT_NEAR(s, 1.0, 1e-3);
            }
        }
    }
}

TEST(BatchNorm, RunningStatsUpdateOnlyWhenAsked) {
    std::vector<double> rm(1, 0.0), rv(1, 1.0);
    ops::BatchNormOptions opts;
    opts.running_mean = &rm;
    opts.running_var = &rv;
    {
        Tape tape;
        ops::batch_norm(tape, tape.constant(Tensor({2, 1}, {1.0, 3.0})), tape.constant(Tensor({1}, 1.0)),
                        tape.constant(Tensor({1})), opts);
    }
    EXPECT_EQ(rm[0], 0.0);
    EXPECT_EQ(rv[0], 1.0);
    opts.update_running = true;
    {
        Tape tape;
        ops::batch_norm(tape, tape.constant(Tensor({2, 1}, {1.0, 3.0})), tape.constant(Tensor({1}, 1.0)),
                        tape.constant(Tensor({1})), opts);
    }
    EXPECT_DOUBLE_EQ(rm[0], 0.1 * 2.0);
    EXPECT_DOUBLE_EQ(rv[0], 0.9 + 0.1 * 2.0);  // unbiased variance of {1, 3} is 2
}

TEST(AvgPool, AveragesBlocks) {
    Tape tape;
    Var y = ops::avg_pool2(tape, tape.constant(Tensor({1, 1, 2, 4}, {1, 2, 3, 4, 5, 6, 7, 8})));
    EXPECT_EQ(tape.value(y).shape, (Shape{1, 1, 1, 2}));
    EXPECT_DOUBLE_EQ(tape.value(y).data[0], 3.5);
    EXPECT_DOUBLE_EQ(tape.value(y).data[1], 5.5);
    EXPECT_THROW(ops::avg_pool2(tape, tape.constant(Tensor({1, 1, 3, 4}))), ShapeError);
}

TEST(Softmax, RowsSumToOne) {
    Tape tape;
    Var p = ops::softmax(tape, tape.constant(random_tensor({8, 5}, 4, 30.0)), 0.7);
    for (std::size_t i = 0; i < 8; ++i) {
        double total = 0.0;
        for (double v : tape.value(p).row(i)) total += v;
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(CosineLogits, ZeroNormRowGivesZeroSimilarity) {
    Tape tape;
    Tensor protos({2, 2}, {1, 0, 0, 1});
    Var s = ops::cosine_logits(tape, tape.constant(Tensor({1, 2})), protos, 0.1);
    EXPECT_EQ(tape.value(s).data, (std::vector<double>{0.0, 0.0}));
}

TEST(Backward, SumOfParamsGivesUnitGrads) {
    Tensor a = random_tensor({3, 2}, 1);
    Tensor b = random_tensor({4}, 2);
    Tape tape;
    Var total = ops::add(tape, ops::sum(tape, tape.parameter(a)), ops::sum(tape, tape.parameter(b)));
    tape.backward(total);
    for (double g : *a.grad) EXPECT_EQ(g, 1.0);
    for (double g : *b.grad) EXPECT_EQ(g, 1.0);
}

TEST(Backward, ZeroTimesAnythingGivesZeroGrads) {
    Tensor a = random_tensor({5}, 1);
    Tape tape;
    Var loss = ops::scale(tape, ops::sum(tape, ops::relu(tape, tape.parameter(a))), 0.0);
    tape.backward(loss);
    for (double g : *a.grad) EXPECT_EQ(g, 0.0);
}

TEST(Backward, RepeatedBackwardAccumulates) {
    Tensor w = random_tensor({3, 4}, 5);
    Tensor b = random_tensor({3}, 6);
    Tape tape;
    Var x = tape.constant(random_tensor({2, 4}, 7));
    Var p = ops::softmax(tape, ops::linear(tape, x, tape.parameter(w), tape.parameter(b)));
    Var loss = ops::mean_entropy(tape, p);
    tape.backward(loss);
    const auto once = *w.grad;
    tape.backward(loss);
    for (std::size_t i = 0; i < once.size(); ++i) EXPECT_EQ((*w.grad)[i], 2.0 * once[i]);
}

}  // namespace
}  // namespace tta
