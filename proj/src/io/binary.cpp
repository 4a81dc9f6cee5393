#include "tta/io/binary.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "tta/core/error.hpp"

namespace tta::io {

Digest sha256(std::span<const std::uint8_t> bytes) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size()) {
        throw Error("sha256: digest computation failed");
    }
    return out;
}

Digest parse_digest_hex(std::string_view hex) {
    if (hex.size() != 64) throw Error("digest: expected 64 hex characters");
    const auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw Error("digest: invalid hex character");
    };
    Digest d{};
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return d;
}

void ByteWriter::u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
}

void ByteWriter::seal() {
    const Digest d = sha256(bytes_);
    raw(d);
}

ByteReader ByteReader::sealed(std::span<const std::uint8_t> bytes, std::string what) {
    constexpr std::size_t n = std::tuple_size_v<Digest>;
    if (bytes.size() < n) throw Error(what + ": file too short");
    const auto body = bytes.first(bytes.size() - n);
    const Digest stored = [&] {
        Digest d{};
        std::memcpy(d.data(), bytes.data() + body.size(), n);
        return d;
    }();
    if (sha256(body) != stored) throw HashMismatch(what + ": content hash mismatch (file corrupted)");
    return ByteReader(body, std::move(what));
}

std::span<const std::uint8_t> ByteReader::take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw Error(what_ + ": unexpected end of data");
    const auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
}

std::uint8_t ByteReader::u8() { return take(1)[0]; }

std::uint16_t ByteReader::u16() {
    const auto b = take(2);
    return static_cast<std::uint16_t>(b[0] | b[1] << 8);
}

std::uint32_t ByteReader::u32() {
    const auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = v << 8 | b[static_cast<std::size_t>(i)];
    return v;
}

std::uint64_t ByteReader::u64() {
    const auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = v << 8 | b[static_cast<std::size_t>(i)];
    return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::str() {
    const std::uint32_t n = u32();
    const auto b = take(n);
    return std::string(b.begin(), b.end());
}

Digest ByteReader::digest() {
    Digest d{};
    const auto b = take(d.size());
    std::copy(b.begin(), b.end(), d.begin());
    return d;
}

void ByteReader::expect_magic(std::string_view magic) {
    const auto b = take(magic.size());
    if (!std::equal(b.begin(), b.end(), magic.begin())) {
        throw Error(what_ + ": bad magic, expected '" + std::string(magic) + "'");
    }
}

void ByteReader::finish() const {
    if (pos_ != bytes_.size()) throw Error(what_ + ": trailing bytes after payload");
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace tta::io
