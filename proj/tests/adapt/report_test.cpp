#include <gtest/gtest.h>

#include <cmath>

#include "tta/adapt/report.hpp"

namespace tta::adapt {
namespace {

MetricsRecord run(AdaptMode mode, double lr, double error, std::uint64_t seed) {
    MetricsRecord r;
    r.mode = mode;
    r.lr = lr;
    r.seed = seed;
    r.corruption = "gaussian_noise";
    r.severity = 5;
    r.error_rate = error;
    return r;
}

TEST(Report, OneRowPerConfigWithSampleStd) {
    std::vector<MetricsRecord> recs;
    const double errs[] = {0.30, 0.32, 0.34, 0.28, 0.26};
    for (std::uint64_t s = 0; s < 5; ++s) recs.push_back(run(AdaptMode::full, 1.0, errs[s], s));
    const auto rows = summarize(recs);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].runs, 5u);
    EXPECT_NEAR(rows[0].mean_error, 0.30, 1e-12);
    EXPECT_NEAR(rows[0].std_error, std::sqrt(0.004 / 4.0), 1e-12);
}

TEST(Report, GroupsAndOrdersByModeThenDescendingLr) {
    std::vector<MetricsRecord> recs = {run(AdaptMode::full, 1.0, 0.3, 1), run(AdaptMode::main_only, 0.01, 0.4, 1),
                                       run(AdaptMode::main_only, 0.3, 0.35, 1), run(AdaptMode::source_only, 0, 0.5, 1)};
    MetricsRecord failed = run(AdaptMode::main_swr, 1.0, 0.0, 1);
    failed.failure = "boom";
    recs.push_back(failed);
    const auto rows = summarize(recs);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].mode, AdaptMode::source_only);
    EXPECT_EQ(rows[1].mode, AdaptMode::main_only);
    EXPECT_EQ(rows[1].lr, 0.3);
    EXPECT_EQ(rows[2].lr, 0.01);
    EXPECT_EQ(rows[3].mode, AdaptMode::full);
    EXPECT_EQ(rows[0].std_error, 0.0);
}

TEST(Report, TextTableInPercent) {
    const auto text = format_report(summarize({run(AdaptMode::full, 1.0, 0.2984, 1)}));
    EXPECT_NE(text.find("full"), std::string::npos);
    EXPECT_NE(text.find("29.84"), std::string::npos);
}

}  // namespace
}  // namespace tta::adapt
