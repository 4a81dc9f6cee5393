#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "tta/core/rng.hpp"
#include "tta/data/image.hpp"

namespace tta::data {

enum class CorruptionKind : std::uint8_t {
    gaussian_noise = 0,
    gaussian_blur = 1,
    brightness = 2,
    contrast = 3,
    saturation_shift = 4,
    pixelate = 5,
};

inline constexpr CorruptionKind kAllCorruptions[] = {
    CorruptionKind::gaussian_noise, CorruptionKind::gaussian_blur,    CorruptionKind::brightness,
    CorruptionKind::contrast,       CorruptionKind::saturation_shift, CorruptionKind::pixelate,
};

/// Severity s in [1, 5] maps to:
///   gaussian_noise    additive N(0, sigma^2), sigma = 0.04 s
///   gaussian_blur     Gaussian blur, sigma = 0.4 s, radius ceil(2 sigma)
///   brightness        v + 0.1 s
///   contrast          (v - mean luma) * (1 - 0.18 s) + mean luma
///   saturation_shift  luma + (v - luma) * (1 - 0.18 s)
///   pixelate          (s + 1) x (s + 1) block averages
/// Every result is clamped to [0, 1].
struct CorruptionSpec {
    CorruptionKind kind = CorruptionKind::gaussian_noise;
    int severity = 5;

    void validate() const;
    bool operator==(const CorruptionSpec&) const = default;
};

std::string_view to_string(CorruptionKind kind);
/// Throws tta::Error for unknown names.
CorruptionKind parse_corruption(std::string_view name);

/// Only gaussian_noise consumes randomness.
Image corrupt(const Image& img, const CorruptionSpec& spec, Rng& rng);

}  // namespace tta::data
