#include <gtest/gtest.h>

#include <cmath>

#include "tta/core/error.hpp"
#include "tta/core/rng.hpp"
#include "tta/nsp/prototypes.hpp"

namespace tta::nsp {
namespace {

PrototypeBank bank_of(std::vector<std::vector<double>> rows, double tau = 0.1) {
    PrototypeBank bank;
    bank.tau = tau;
    bank.prototypes = Tensor({rows.size(), rows.front().size()});
    for (std::size_t k = 0; k < rows.size(); ++k)
        std::copy(rows[k].begin(), rows[k].end(), bank.prototypes.row(k).begin());
    return bank;
}

// Written without the library's softmax or cosine helpers.
std::vector<double> brute_force(const std::vector<double>& z, const PrototypeBank& bank) {
    const std::size_t c = bank.num_classes(), d = bank.dim();
    std::vector<double> logits(c);
    double zz = 0.0;
    for (double v : z) zz += v * v;
    for (std::size_t k = 0; k < c; ++k) {
        double dot = 0.0, qq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            dot += z[j] * bank.prototypes.data[k * d + j];
            qq += bank.prototypes.data[k * d + j] * bank.prototypes.data[k * d + j];
        }
        logits[k] = dot / std::sqrt(zz * qq) / bank.tau;
    }
    double top = logits[0];
    for (double l : logits) top = std::max(top, l);
    double total = 0.0;
    std::vector<double> p(c);
    for (std::size_t k = 0; k < c; ++k) total += p[k] = std::exp(logits[k] - top);
    for (double& v : p) v /= total;
    return p;
}

TEST(NspPredict, TwoClassExample) {
    const PrototypeBank bank = bank_of({{1, 0}, {0, 1}});
    const auto p = nsp_predict(std::vector<double>{1, 0}, bank);
    EXPECT_NEAR(p[0], std::exp(10.0) / (std::exp(10.0) + 1.0), 1e-15);
    EXPECT_NEAR(p[0], 0.9999546, 1e-7);
    EXPECT_NEAR(p[1], 4.54e-5, 1e-7);
}

TEST(NspPredict, EquiangularGivesUniform) {
    const PrototypeBank bank = bank_of({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    for (double v : nsp_predict(std::vector<double>{2, 2, 2}, bank)) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

TEST(NspPredict, ZeroProjectionGivesUniform) {
    const PrototypeBank bank = bank_of({{1, 0}, {0, 1}, {1, 1}, {-1, 0}});
    for (double v : nsp_predict(std::vector<double>{0, 0}, bank)) EXPECT_EQ(v, 0.25);
}

TEST(NspPredict, DimensionMismatchThrows) {
    const PrototypeBank bank = bank_of({{1, 0}, {0, 1}});
    EXPECT_THROW(nsp_predict(std::vector<double>{1, 0, 0}, bank), Error);
}

TEST(NspPredict, MatchesBruteForceAndIsScaleInvariant) {
    Rng rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t c = std::vector<std::size_t>{2, 5, 10}[trial % 3];
        const std::size_t d = trial % 2 ? 8 : 64;
        std::vector<std::vector<double>> rows(c, std::vector<double>(d));
        for (auto& r : rows)
            for (double& v : r) v = rng.normal();
        const PrototypeBank bank = bank_of(rows);
        std::vector<double> z(d);
        for (double& v : z) v = rng.normal();
        const auto p = nsp_predict(z, bank);
        const auto oracle = brute_force(z, bank);
        for (std::size_t k = 0; k < c; ++k) ASSERT_NEAR(p[k], oracle[k], 1e-12);
        for (double scale : {0.1, 10.0}) {
            std::vector<double> zs = z;
            for (double& v : zs) v *= scale;
            const auto ps = nsp_predict(zs, bank);
            for (std::size_t k = 0; k < c; ++k) ASSERT_NEAR(ps[k], p[k], 1e-12);
        }
    }
}

TEST(NspPredict, TapeFormAgreesWithVectorForm) {
    Rng rng(2);
    const PrototypeBank bank = bank_of({{1, 2, 0}, {0, -1, 1}, {3, 0, 1}, {0.5, 0.5, 0.5}});
    Tensor z({6, 3});
    for (double& v : z.data) v = rng.normal();
    Tape tape;
    const Tensor& p = tape.value(nsp_predict(tape, tape.constant(z), bank));
    for (std::size_t i = 0; i < 6; ++i) {
        const auto row = nsp_predict(z.row(i), bank);
        for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(p.data[i * 4 + k], row[k], 1e-14);
    }
}

TEST(PrototypeEma, TwoStepClosedForm) {
    PrototypeBank bank = bank_of({{1.0, -2.0}});
    bank.alpha = 0.99;
    const std::vector<double> q0 = {1.0, -2.0}, z1 = {0.5, 4.0}, z2 = {-3.0, 1.5};
    bank.ema_update(0, z1);
    bank.ema_update(0, z2);
    for (std::size_t j = 0; j < 2; ++j)
        EXPECT_NEAR(bank.prototypes.data[j], 0.9801 * q0[j] + 0.0099 * z1[j] + 0.01 * z2[j], 1e-12);
}

TEST(PrototypeEma, FiftyStepClosedForm) {
    Rng rng(50);
    const std::size_t d = 16;
    std::vector<double> q0(d);
    for (double& v : q0) v = rng.normal();
    PrototypeBank bank = bank_of({q0});
    const double a = bank.alpha;
    std::vector<std::vector<double>> zs(50, std::vector<double>(d));
    for (auto& z : zs) {
        for (double& v : z) v = rng.normal();
        bank.ema_update(0, z);
    }
    for (std::size_t j = 0; j < d; ++j) {
        double expected = std::pow(a, 50) * q0[j];
        for (int t = 1; t <= 50; ++t) expected += (1 - a) * std::pow(a, 50 - t) * zs[t - 1][j];
        EXPECT_NEAR(bank.prototypes.data[j], expected, 1e-9);
    }
}

TEST(PrototypeEma, RejectsBadUpdates) {
    PrototypeBank bank = bank_of({{1, 0}, {0, 1}});
    EXPECT_THROW(bank.ema_update(2, std::vector<double>{1, 0}), Error);
    EXPECT_THROW(bank.ema_update(0, std::vector<double>{1}), Error);
}

TEST(PrototypeSourceNames, RoundTrip) {
    for (auto s : {PrototypeSource::projection_z, PrototypeSource::representation_h,
                   PrototypeSource::classifier_weights})
        EXPECT_EQ(parse_prototype_source(to_string(s)), s);
    EXPECT_THROW(parse_prototype_source("centroid"), Error);
}

}  // namespace
}  // namespace tta::nsp
