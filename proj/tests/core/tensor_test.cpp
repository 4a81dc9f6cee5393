#include <gtest/gtest.h>

#include "tta/core/error.hpp"
#include "tta/core/tape.hpp"
#include "tta/core/tensor.hpp"

namespace tta {
namespace {

TEST(Tensor, ShapeMustMatchData) {
    EXPECT_NO_THROW(Tensor({2, 3}, std::vector<double>(6, 1.0)));
    EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5, 1.0)), ShapeError);
}

TEST(Tensor, GradHasSameShape) {
    Tensor t({3, 4});
    EXPECT_FALSE(t.grad.has_value());
    t.zero_grad();
    ASSERT_TRUE(t.grad.has_value());
    EXPECT_EQ(t.grad->size(), t.data.size());
}

TEST(Tensor, SameValuesIsBitwise) {
    Tensor a({1}, {0.0});
    Tensor b({1}, {-0.0});
    EXPECT_FALSE(same_values(a, b));
    EXPECT_TRUE(same_values(a, Tensor({1}, {0.0})));
}

TEST(Tape, BackwardWithoutForwardFails) {
    Tape tape;
    EXPECT_THROW(tape.backward(Var{}), Error);
    EXPECT_THROW(tape.backward(Var{3}), Error);
}

TEST(Tape, BackwardNeedsScalar) {
    Tape tape;
    Tensor p({2}, {1.0, 2.0});
    Var v = tape.parameter(p);
    EXPECT_THROW(tape.backward(v), ShapeError);
}

}  // namespace
}  // namespace tta
