#include <gtest/gtest.h>

#include <filesystem>

#include "../adapt/fixture.hpp"
#include "tta/core/error.hpp"
#include "tta/io/artifacts.hpp"
#include "tta/io/binary.hpp"

namespace tta::io {
namespace {

using adapt::testing::small_artifacts;

TEST(Sha256, KnownVectors) {
    EXPECT_EQ(to_hex(sha256({})), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const std::string abc = "abc";
    EXPECT_EQ(to_hex(sha256({reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size()})),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const Digest d = sha256({});
    EXPECT_EQ(parse_digest_hex(to_hex(d)), d);
    EXPECT_THROW(parse_digest_hex("zz"), Error);
}

TEST(ByteCodec, LittleEndianLayout) {
    ByteWriter w;
    w.u16(0x0102);
    w.u32(0x03040506);
    w.f64(1.0);
    const auto& b = w.bytes();
    ASSERT_EQ(b.size(), 14u);
    EXPECT_EQ(b[0], 0x02);
    EXPECT_EQ(b[1], 0x01);
    EXPECT_EQ(b[2], 0x06);
    EXPECT_EQ(b[5], 0x03);
    // 1.0 = 0x3ff0000000000000
    EXPECT_EQ(b[12], 0xf0);
    EXPECT_EQ(b[13], 0x3f);
    ByteReader r(b, "t");
    EXPECT_EQ(r.u16(), 0x0102);
    EXPECT_EQ(r.u32(), 0x03040506u);
    EXPECT_EQ(r.f64(), 1.0);
    EXPECT_NO_THROW(r.finish());
    EXPECT_THROW(r.u8(), Error);
}

TEST(Checkpoint, RoundTripIsByteIdentical) {
    const Model& m = small_artifacts().model;
    const auto bytes = encode_checkpoint(m);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "TTA1");
    EXPECT_EQ(bytes[4] | bytes[5] << 8, kFormatVersion);
    const Model back = decode_checkpoint(bytes);
    EXPECT_EQ(encode_checkpoint(back), bytes);
    EXPECT_TRUE(adapt::testing::same_params(back.net(), m.net()));
    EXPECT_EQ(back.encoder_end(), m.encoder_end());
    EXPECT_EQ(back.bn_mode(), m.bn_mode());
    EXPECT_EQ(checkpoint_digest(m), sha256(std::span(bytes).first(bytes.size() - 32)));
}

TEST(Checkpoint, AnyFlippedByteIsDetected) {
    const auto bytes = encode_checkpoint(small_artifacts().model);
    for (std::size_t pos : {std::size_t{0}, std::size_t{7}, bytes.size() / 2, bytes.size() - 40, bytes.size() - 1}) {
        auto bad = bytes;
        bad[pos] ^= 0x10;
        EXPECT_THROW(decode_checkpoint(bad), HashMismatch) << pos;
    }
    EXPECT_THROW(decode_checkpoint(std::span(bytes).first(20)), Error);
}

TEST(Checkpoint, WrongMagicOrVersionIsRejected) {
    ByteWriter w;
    w.raw(std::vector<std::uint8_t>{'T', 'T', 'A', 'P'});
    w.u16(kFormatVersion);
    w.seal();
    EXPECT_THROW(decode_checkpoint(w.bytes()), Error);
    ByteWriter v;
    v.raw(std::vector<std::uint8_t>{'T', 'T', 'A', '1'});
    v.u16(99);
    v.seal();
    EXPECT_THROW(decode_checkpoint(v.bytes()), Error);
}

TEST(Artifacts, EveryKindRoundTripsByteIdentically) {
    const adapt::SourceArtifacts& a = small_artifacts();
    const auto p = encode_penalty(a.penalty);
    EXPECT_EQ(encode_penalty(decode_penalty(p)), p);
    EXPECT_EQ(decode_penalty(p), a.penalty);
    const auto q = encode_prototypes(a.bank);
    EXPECT_EQ(encode_prototypes(decode_prototypes(q)), q);
    EXPECT_TRUE(decode_prototypes(q) == a.bank);
    EXPECT_EQ(decode_prototypes(q).source_hash, a.bank.source_hash);
    const auto j = encode_projector(a.projector);
    EXPECT_EQ(encode_projector(decode_projector(j)), j);
    EXPECT_TRUE(decode_projector(j) == a.projector);
    const data::Dataset ds = data::generate_source_dataset(3, 4, 5);
    const auto d = encode_dataset(ds);
    EXPECT_EQ(encode_dataset(decode_dataset(d)), d);
    EXPECT_EQ(decode_dataset(d), ds);
}

TEST(Artifacts, CrossKindDecodingFails) {
    const auto p = encode_penalty(small_artifacts().penalty);
    EXPECT_THROW(decode_prototypes(p), Error);
    EXPECT_THROW(decode_checkpoint(p), Error);
    EXPECT_THROW(decode_projector(p), Error);
    EXPECT_THROW(decode_dataset(p), Error);
}

TEST(Artifacts, FilesRoundTrip) {
    const auto dir = std::filesystem::temp_directory_path() / "tta_io_artifacts_test";
    std::filesystem::create_directories(dir);
    const Model& m = small_artifacts().model;
    save_checkpoint(dir / "m.ckpt", m);
    Digest d{};
    const Model back = load_checkpoint(dir / "m.ckpt", &d);
    EXPECT_EQ(d, checkpoint_digest(m));
    EXPECT_EQ(read_file(dir / "m.ckpt"), encode_checkpoint(back));
    EXPECT_THROW(load_checkpoint(dir / "missing.ckpt"), Error);
    std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace tta::io
