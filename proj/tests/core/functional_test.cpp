#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tta/core/error.hpp"
#include "tta/core/functional.hpp"

namespace tta {
namespace {

TEST(StableSoftmax, SymmetricLogitsGiveHalf) {
    auto p = stable_softmax(std::vector<double>{0.0, 0.0}, 1.0);
    EXPECT_DOUBLE_EQ(p[0], 0.5);
    EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(StableSoftmax, Temperature) {
    auto p = stable_softmax(std::vector<double>{1.0, 0.0}, 0.1);
    const double e10 = std::exp(10.0);
    EXPECT_NEAR(p[0], e10 / (e10 + 1.0), 1e-15);
    EXPECT_NEAR(p[1], 1.0 / (e10 + 1.0), 1e-15);
    EXPECT_NEAR(p[0], 0.9999546, 1e-7);
    EXPECT_NEAR(p[1], 4.54e-5, 1e-7);
}

TEST(StableSoftmax, LargeLogitsStayFinite) {
    auto p = stable_softmax(std::vector<double>{1000.0, 999.0}, 1.0);
    auto ref = stable_softmax(std::vector<double>{1.0, 0.0}, 1.0);
    ASSERT_TRUE(std::isfinite(p[0]) && std::isfinite(p[1]));
    EXPECT_NEAR(p[0], 0.7311, 1e-4);
    EXPECT_NEAR(p[1], 0.2689, 1e-4);
    EXPECT_NEAR(p[0], ref[0], 1e-15);
}

TEST(StableSoftmax, RejectsNonPositiveTemperature) {
    EXPECT_THROW(stable_softmax(std::vector<double>{1.0}, 0.0), Error);
    EXPECT_THROW(stable_softmax(std::vector<double>{1.0}, -1.0), Error);
}

TEST(StableSoftmax, Properties) {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> nd(0.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(2 + trial % 9);
        for (double& v : x) v = nd(gen);
        const double tau = 0.25 + (trial % 7) * 0.3;
        auto p = stable_softmax(x, tau);
        double total = 0.0;
        for (double v : p) {
            EXPECT_GT(v, 0.0);
            EXPECT_LT(v, 1.0);
            total += v;
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_EQ(argmax(p), argmax(x));
        std::vector<double> shifted = x;
        for (double& v : shifted) v += 123.25;
        auto q = stable_softmax(shifted, tau);
        for (std::size_t k = 0; k < p.size(); ++k) EXPECT_NEAR(p[k], q[k], 1e-12);
    }
}

TEST(Entropy, UniformIsLogC) {
    std::vector<double> u(10, 0.1);
    EXPECT_NEAR(entropy(u), std::log(10.0), 1e-12);
    EXPECT_NEAR(entropy(u), 2.302585, 1e-6);
}

TEST(Entropy, OneHotIsZero) { EXPECT_EQ(entropy(std::vector<double>{0.0, 1.0, 0.0}), 0.0); }

TEST(Entropy, CrossEntropyWithItselfIsEntropy) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> p(5);
        double total = 0.0;
        for (double& v : p) total += (v = ud(gen));
        for (double& v : p) v /= total;
        EXPECT_DOUBLE_EQ(cross_entropy(p, p), entropy(p));
    }
}

TEST(Entropy, RejectsNegativeEntries) {
    EXPECT_THROW(entropy(std::vector<double>{-0.1, 1.1}), Error);
    EXPECT_THROW(cross_entropy(std::vector<double>{0.5, 0.5}, std::vector<double>{1.2, -0.2}), Error);
}

TEST(Argmax, TiesGoToLowestIndex) {
    EXPECT_EQ(argmax(std::vector<double>{0.2, 0.4, 0.4}), 1u);
    EXPECT_EQ(argmax(std::vector<double>{0.5, 0.5}), 0u);
}

}  // namespace
}  // namespace tta
