#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tta/core/tensor.hpp"
#include "tta/data/image.hpp"

namespace tta::data {

inline constexpr std::size_t kMaxClasses = 10;
inline constexpr std::size_t kMinImageSize = 8;

struct Dataset {
    std::size_t num_classes = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<Image> images;
    std::vector<int> labels;

    std::size_t size() const { return images.size(); }
    bool operator==(const Dataset&) const = default;
};

/// Renders `n_per_class` examples of each class. Class k is a shape
/// (disk, square, triangle, cross, ring; k mod 5) filled with hue k/C on a
/// gray background, with per-sample jitter in position, scale, hue,
/// saturation, value and background. Labels cycle 0, 1, ..., C-1, 0, ...
/// Example i uses the seed derive_seed(seed, i).
Dataset generate_source_dataset(std::uint64_t seed, std::size_t n_per_class, std::size_t num_classes,
                                std::size_t image_size = 16);

/// [N x 3 x H x W] batch of the selected examples.
Tensor stack(const Dataset& dataset, std::span<const std::size_t> indices);
Tensor stack(std::span<const Image> images);

/// Inverse of stack: one image per batch row.
std::vector<Image> unstack(const Tensor& batch);

Dataset subset(const Dataset& dataset, std::span<const std::size_t> indices);

}  // namespace tta::data
