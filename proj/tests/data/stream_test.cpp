#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "tta/core/error.hpp"
#include "tta/data/stream.hpp"

namespace tta::data {
namespace {

const CorruptionSpec kNoise{CorruptionKind::gaussian_noise, 5};

TEST(TargetStream, FiveHundredExamplesInTenBatches) {
    const Dataset d = generate_source_dataset(1, 100, 5);
    TargetStream stream(d, kNoise, 3, 50);
    EXPECT_EQ(stream.batch_count(), 10u);
    std::size_t batches = 0;
    while (auto b = stream.next()) {
        EXPECT_EQ(b->batch_index, batches);
        EXPECT_EQ(b->images.shape, (Shape{50, 3, 16, 16}));
        EXPECT_EQ(b->labels.size(), 50u);
        ++batches;
    }
    EXPECT_EQ(batches, 10u);
}

TEST(TargetStream, SecondPassThrows) {
    const Dataset d = generate_source_dataset(1, 4, 5);
    TargetStream stream(d, kNoise, 3, 5);
    while (stream.next()) {
    }
    EXPECT_THROW(stream.next(), Error);
}

TEST(TargetStream, YieldsEachIndexOnceAndDropsTinyTail) {
    const Dataset d = generate_source_dataset(2, 21, 5);  // 105 examples
    {
        TargetStream stream(d, kNoise, 9, 52);  // 52 + 52 + tail of 1 dropped
        std::set<std::size_t> seen;
        std::size_t count = 0;
        while (auto b = stream.next()) {
            for (std::size_t i : b->indices) seen.insert(i);
            count += b->indices.size();
        }
        EXPECT_EQ(count, 104u);
        EXPECT_EQ(seen.size(), 104u);
        EXPECT_EQ(stream.example_count(), 104u);
    }
    {
        TargetStream stream(d, kNoise, 9, 50);  // 50 + 50 + 5 kept
        std::set<std::size_t> seen;
        while (auto b = stream.next()) seen.insert(b->indices.begin(), b->indices.end());
        EXPECT_EQ(seen.size(), 105u);
        EXPECT_EQ(stream.batch_count(), 3u);
    }
}

TEST(TargetStream, RejectsBadInputs) {
    const Dataset d = generate_source_dataset(1, 2, 5);
    EXPECT_THROW(TargetStream(d, kNoise, 1, 1), Error);
    EXPECT_THROW(TargetStream(Dataset{}, kNoise, 1, 10), Error);
}

TEST(TargetStream, SeedDeterminesContent) {
    const Dataset d = generate_source_dataset(1, 10, 5);
    TargetStream a(d, kNoise, 4, 10), b(d, kNoise, 4, 10), c(d, kNoise, 5, 10);
    auto ba = a.next(), bb = b.next(), bc = c.next();
    EXPECT_TRUE(same_values(ba->images, bb->images));
    EXPECT_EQ(ba->indices, bb->indices);
    EXPECT_NE(ba->indices, bc->indices);
    EXPECT_EQ(reveal_for_supervision(ba->labels)[0], d.labels[ba->indices[0]]);
}

TEST(TargetStream, ReshuffledEpochsShareImages) {
    const Dataset d = generate_source_dataset(1, 10, 5);
    TargetStream first(d, kNoise, 4, 10);
    TargetStream again = first.reshuffled(0);
    TargetStream other = first.reshuffled(1);
    auto a = first.next(), b = again.next(), c = other.next();
    EXPECT_EQ(a->indices, b->indices);
    EXPECT_NE(a->indices, c->indices);
    const auto it = std::find(c->indices.begin(), c->indices.end(), a->indices[0]);
    if (it != c->indices.end()) {
        const std::size_t j = static_cast<std::size_t>(it - c->indices.begin());
        const std::size_t sz = 3 * 16 * 16;
        EXPECT_TRUE(std::equal(a->images.data.begin(), a->images.data.begin() + sz,
                               c->images.data.begin() + j * sz));
    }
}

}  // namespace
}  // namespace tta::data
