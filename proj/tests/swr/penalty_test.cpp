#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "tta/core/error.hpp"
#include "tta/core/rng.hpp"
#include "tta/swr/penalty.hpp"

namespace tta::swr {
namespace {

TEST(Cosine, BasicCases) {
    const std::vector<double> v = {0.3, -1.2, 2.0};
    const std::vector<double> neg = {-0.3, 1.2, -2.0};
    EXPECT_NEAR(cosine_similarity(v, v), 1.0, 1e-15);
    EXPECT_NEAR(cosine_similarity(v, neg), -1.0, 1e-15);
    EXPECT_EQ(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
}

TEST(Cosine, ZeroNormGivesZero) {
    const std::vector<double> zero = {0.0, 0.0, 0.0};
    EXPECT_EQ(cosine_similarity(zero, std::vector<double>{1, 2, 3}), 0.0);
    EXPECT_EQ(cosine_similarity(zero, zero), 0.0);
}

TEST(Cosine, LengthMismatchThrows) {
    EXPECT_THROW(cosine_similarity(std::vector<double>{1, 2}, std::vector<double>{1}), Error);
}

TEST(Penalties, MinMaxThenSquare) {
    const std::vector<double> s = {0.2, 0.5, 0.8};
    const auto w = penalties_from_similarities(s, SwrVariant{});
    ASSERT_EQ(w.size(), 3u);
    EXPECT_NEAR(w[0], 0.0, 1e-15);
    EXPECT_NEAR(w[1], 0.25, 1e-15);
    EXPECT_NEAR(w[2], 1.0, 1e-15);
}

TEST(Penalties, Flips) {
    const std::vector<double> s = {0.2, 0.5, 0.8};
    SwrVariant v;
    v.flip = Flip::vertical;
    const auto vert = penalties_from_similarities(s, v);
    EXPECT_NEAR(vert[0], 1.0, 1e-15);
    EXPECT_NEAR(vert[1], 0.75, 1e-15);
    EXPECT_NEAR(vert[2], 0.0, 1e-15);
    v.flip = Flip::horizontal;
    const auto horiz = penalties_from_similarities(s, v);
    EXPECT_NEAR(horiz[0], 1.0, 1e-15);
    EXPECT_NEAR(horiz[1], 0.25, 1e-15);
    EXPECT_NEAR(horiz[2], 0.0, 1e-15);
}

TEST(Penalties, Exponents) {
    const std::vector<double> s = {0.2, 0.5, 0.8};
    SwrVariant v;
    v.exponent = 1;
    EXPECT_NEAR(penalties_from_similarities(s, v)[1], 0.5, 1e-15);
    v.exponent = 3;
    EXPECT_NEAR(penalties_from_similarities(s, v)[1], 0.125, 1e-15);
    v.exponent = 4;
    EXPECT_THROW(penalties_from_similarities(s, v), Error);
}

TEST(Penalties, DegenerateRangeGivesOnes) {
    const std::vector<double> s = {0.7, 0.7, 0.7, 0.7};
    for (double w : penalties_from_similarities(s, SwrVariant{})) EXPECT_EQ(w, 1.0);
}

TEST(Penalties, RangeAndMonotonicityOnRandomInputs) {
    Rng rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> s(1 + rng.index(12));
        for (double& x : s) x = rng.uniform(-1.0, 1.0);
        if (trial % 7 == 0) s.back() = s.front();  // include ties
        for (int e = 1; e <= 3; ++e)
            for (Flip f : {Flip::none, Flip::vertical, Flip::horizontal}) {
                SwrVariant v;
                v.exponent = e;
                v.flip = f;
                const auto w = penalties_from_similarities(s, v);
                for (double x : w) {
                    ASSERT_GE(x, 0.0);
                    ASSERT_LE(x, 1.0);
                }
                if (f != Flip::none) continue;
                for (std::size_t i = 0; i < s.size(); ++i)
                    for (std::size_t j = 0; j < s.size(); ++j)
                        if (s[i] <= s[j]) ASSERT_LE(w[i], w[j]);
            }
    }
}

TEST(Penalties, ManualCurves) {
    SwrVariant v;
    v.manual_curve = ManualCurve::constant;
    v.constant_value = 0.5;
    EXPECT_EQ(manual_penalties(3, 2, v), (std::vector<double>{0.5, 0.5, 0.5}));
    v.manual_curve = ManualCurve::linear_ramp;
    EXPECT_EQ(manual_penalties(3, 2, v), (std::vector<double>{0.0, 0.5, 1.0}));
    v.manual_curve = ManualCurve::step;
    EXPECT_EQ(manual_penalties(4, 3, v), (std::vector<double>{0.0, 0.0, 0.0, 1.0}));
    v.flip = Flip::vertical;
    EXPECT_EQ(manual_penalties(4, 3, v), (std::vector<double>{1.0, 1.0, 1.0, 0.0}));
}

TEST(Variant, ParseAndFormatRoundTrip) {
    const SwrVariant v = parse_variant("exponent=3,flip=horizontal,theta_star=freeze_source");
    EXPECT_EQ(v.exponent, 3);
    EXPECT_EQ(v.flip, Flip::horizontal);
    EXPECT_EQ(v.theta_star_policy, ThetaStarPolicy::freeze_source);
    EXPECT_EQ(parse_variant(format_variant(v)), v);
    EXPECT_EQ(parse_variant(""), SwrVariant{});
    EXPECT_THROW(parse_variant("exponent=5"), Error);
    EXPECT_THROW(parse_variant("colour=red"), Error);
    EXPECT_THROW(parse_variant("exponent=2x"), Error);
}

class PenaltyOnModel : public ::testing::Test {
protected:
    data::Dataset source = data::generate_source_dataset(3, 6, 5);
    Model model = make_cnn(CnnSpec{}, 4);
};

TEST_F(PenaltyOnModel, IdentityTransformGivesAllOnes) {
    const auto pv =
        compute_penalty_vector(model, source, data::TransformSpec::identity(), 8, SwrVariant{}, 1);
    ASSERT_EQ(pv.size(), 7u);
    for (double s : pv.similarities) EXPECT_NEAR(s, 1.0, 1e-12);
    for (double w : pv.penalties) EXPECT_EQ(w, 1.0);
}

TEST_F(PenaltyOnModel, LeavesModelUntouched) {
    const Model before = model;
    const auto pv =
        compute_penalty_vector(model, source, data::TransformSpec::shift_default(), 12, SwrVariant{}, 2);
    for (std::size_t u = 0; u < model.units().size(); ++u) {
        const auto& a = model.units()[u];
        const auto& b = before.units()[u];
        for (std::size_t p = 0; p < a.params.size(); ++p) EXPECT_TRUE(same_values(a.params[p], b.params[p]));
        EXPECT_EQ(a.running_mean, b.running_mean);
        EXPECT_EQ(a.running_var, b.running_var);
    }
    EXPECT_EQ(pv.unit_names.front(), "conv1");
    EXPECT_EQ(pv.n_samples, 12u);
    for (double w : pv.penalties) {
        EXPECT_GE(w, 0.0);
        EXPECT_LE(w, 1.0);
    }
    EXPECT_NO_THROW(check_layout(pv, model));
}

TEST_F(PenaltyOnModel, DeterministicAndExponentSensitive) {
    const auto t = data::TransformSpec::shift_default();
    const auto a = compute_penalty_vector(model, source, t, 10, SwrVariant{}, 5);
    const auto b = compute_penalty_vector(model, source, t, 10, SwrVariant{}, 5);
    EXPECT_EQ(a, b);
    SwrVariant linear;
    linear.exponent = 1;
    const auto c = compute_penalty_vector(model, source, t, 10, linear, 5);
    EXPECT_EQ(a.similarities, c.similarities);
    EXPECT_NE(a.penalties, c.penalties);
}

TEST_F(PenaltyOnModel, ManualCurveSkipsGradients) {
    SwrVariant v;
    v.manual_curve = ManualCurve::step;
    const auto pv = compute_penalty_vector(model, source, data::TransformSpec::shift_default(), 4, v, 0);
    // encoder: conv1 bn1 conv2 bn2 fc1 bn3; classifier: fc2
    EXPECT_EQ(pv.penalties, (std::vector<double>{0, 0, 0, 0, 0, 0, 1}));
}

TEST_F(PenaltyOnModel, RejectsEmptySampleSetAndForeignModels) {
    EXPECT_THROW(compute_penalty_vector(model, source, std::span<const std::size_t>{},
                                       data::TransformSpec::identity(), SwrVariant{}, 0),
                 Error);
    const auto pv = compute_penalty_vector(model, source, data::TransformSpec::identity(), 2, SwrVariant{}, 0);
    const Model mlp = make_mlp(MlpSpec{}, 1);
    EXPECT_THROW(check_layout(pv, mlp), Error);
}

}  // namespace
}  // namespace tta::swr
