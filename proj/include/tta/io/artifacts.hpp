#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tta/core/digest.hpp"
#include "tta/core/model.hpp"
#include "tta/data/dataset.hpp"
#include "tta/nsp/projector.hpp"
#include "tta/nsp/prototypes.hpp"
#include "tta/swr/penalty.hpp"

namespace tta::io {

inline constexpr std::uint16_t kFormatVersion = 1;

/// Every file is: 4-byte magic, u16 version, body, SHA-256 of all preceding
/// bytes. Integers and IEEE-754 doubles are little-endian; strings are a
/// u32 length followed by UTF-8 bytes.
///
/// Checkpoint ("TTA1") body:
///   u32 channels, height, width; u32 classes; u32 encoder_end; u8 bn_mode;
///   u32 unit count, then per unit: name, u8 kind, u8 activation,
///   u32 parameter count, per parameter u32 rank and u64 dims,
///   u64 batchnorm feature count;
///   then all parameter values in declaration order, then per batchnorm
///   unit its running means followed by running variances.
/// The checkpoint's identity is its trailing hash.
std::vector<std::uint8_t> encode_checkpoint(const Model& model);
Model decode_checkpoint(std::span<const std::uint8_t> bytes);
Digest checkpoint_digest(const Model& model);

/// "TTAP": source hash, variant (u8 exponent, u8 flip, u8 curve,
/// f64 constant, u8 theta* policy), u64 samples, u32 units, per unit
/// name, f64 similarity, f64 penalty.
std::vector<std::uint8_t> encode_penalty(const swr::PenaltyVector& penalty);
swr::PenaltyVector decode_penalty(std::span<const std::uint8_t> bytes);

/// "TTAQ": source hash, f64 alpha, f64 tau, u8 source kind, u32 classes,
/// u32 dim, prototype rows.
std::vector<std::uint8_t> encode_prototypes(const nsp::PrototypeBank& bank);
nsp::PrototypeBank decode_prototypes(std::span<const std::uint8_t> bytes);

/// "TTAJ": source hash, u32 input dim, u32 depth, u32 width, then the unit
/// list and payload laid out as in a checkpoint.
std::vector<std::uint8_t> encode_projector(const nsp::Projector& projector);
nsp::Projector decode_projector(std::span<const std::uint8_t> bytes);

/// "TTAD": u32 classes, u32 height, u32 width, u64 count, i32 labels,
/// then every image's CHW values.
std::vector<std::uint8_t> encode_dataset(const data::Dataset& dataset);
data::Dataset decode_dataset(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const Model& model);
/// Optionally reports the checkpoint hash.
Model load_checkpoint(const std::filesystem::path& path, Digest* digest = nullptr);
void save_penalty(const std::filesystem::path& path, const swr::PenaltyVector& penalty);
swr::PenaltyVector load_penalty(const std::filesystem::path& path);
void save_prototypes(const std::filesystem::path& path, const nsp::PrototypeBank& bank);
nsp::PrototypeBank load_prototypes(const std::filesystem::path& path);
void save_projector(const std::filesystem::path& path, const nsp::Projector& projector);
nsp::Projector load_projector(const std::filesystem::path& path);
void save_dataset(const std::filesystem::path& path, const data::Dataset& dataset);
data::Dataset load_dataset(const std::filesystem::path& path);

}  // namespace tta::io
