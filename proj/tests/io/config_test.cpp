#include <gtest/gtest.h>

#include "tta/core/error.hpp"
#include "tta/io/run_config.hpp"

namespace tta::io {
namespace {

TEST(RunConfig, DefaultsResolve) {
    const RunConfig c;
    const adapt::AdaptConfig a = c.adapt();
    EXPECT_EQ(a.mode, adapt::AdaptMode::full);
    EXPECT_EQ(a.lr, adapt::default_lr(adapt::AdaptMode::full));
    EXPECT_EQ(a.bn_mode, BnMode::batch);
    EXPECT_EQ(c.corruption().kind, data::CorruptionKind::gaussian_noise);
    EXPECT_EQ(c.corruption().severity, 5);
    EXPECT_EQ(c.nsp().projector.width, 512u);
    EXPECT_EQ(c.u64("seed"), 1u);
}

TEST(RunConfig, ParsesCommentsAndWhitespace) {
    const RunConfig c = RunConfig::parse("# a run\n\n mode = main_swr \nlr=0.5\r\nswr_variant=exponent=1,flip=vertical\n");
    const adapt::AdaptConfig a = c.adapt();
    EXPECT_EQ(a.mode, adapt::AdaptMode::main_swr);
    EXPECT_EQ(a.lr, 0.5);
    EXPECT_EQ(a.swr_variant.exponent, 1);
    EXPECT_EQ(a.swr_variant.flip, swr::Flip::vertical);
    EXPECT_TRUE(c.is_set("mode"));
    EXPECT_FALSE(c.is_set("seed"));
}

TEST(RunConfig, UnknownKeysAndBadValuesAreErrors) {
    EXPECT_THROW(RunConfig::parse("lambda_swr_typo=3\n"), Error);
    EXPECT_THROW(RunConfig::parse("just a line\n"), Error);
    EXPECT_THROW(RunConfig::parse("seed=-1\n"), Error);
    EXPECT_THROW(RunConfig::parse("lr=fast\n"), Error);
    EXPECT_THROW(RunConfig::parse("mode=turbo\n"), Error);
    EXPECT_THROW(RunConfig::parse("corruption=fog\n"), Error);
    EXPECT_THROW(RunConfig::parse("projector_finetune=yes\n"), Error);
    EXPECT_THROW(RunConfig::parse("swr_variant=exponent=7\n"), Error);
    EXPECT_THROW(RunConfig::parse("severity=9\n").corruption(), Error);
}

TEST(RunConfig, EchoListsEveryKeyAndReparses) {
    RunConfig c;
    c.set("mode", "main_only");
    c.set("lr", "0.25");
    const std::string echo = c.echo();
    EXPECT_EQ(static_cast<std::size_t>(std::count(echo.begin(), echo.end(), '\n')), config_keys().size());
    const RunConfig back = RunConfig::parse(echo);
    EXPECT_EQ(back.echo(), echo);
    EXPECT_EQ(back.hash(), c.hash());
    RunConfig other = c;
    other.set("lr", "0.3");
    EXPECT_NE(other.hash(), c.hash());
}

}  // namespace
}  // namespace tta::io
