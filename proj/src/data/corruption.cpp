#include "tta/data/corruption.hpp"

#include <algorithm>
#include <cmath>

#include "tta/core/error.hpp"

namespace tta::data {
namespace {

void pixelate(Image& img, std::size_t block) {
    for (std::size_t c = 0; c < kChannels; ++c)
        for (std::size_t by = 0; by < img.height; by += block)
            for (std::size_t bx = 0; bx < img.width; bx += block) {
                const std::size_t ey = std::min(by + block, img.height), ex = std::min(bx + block, img.width);
                double mean = 0.0;
                for (std::size_t y = by; y < ey; ++y)
                    for (std::size_t x = bx; x < ex; ++x) mean += img.at(c, y, x);
                mean /= static_cast<double>((ey - by) * (ex - bx));
                for (std::size_t y = by; y < ey; ++y)
                    for (std::size_t x = bx; x < ex; ++x) img.at(c, y, x) = mean;
            }
}

void blend_towards_luma(Image& img, double keep, bool global_mean) {
    double mean = 0.0;
    if (global_mean) {
        for (std::size_t y = 0; y < img.height; ++y)
            for (std::size_t x = 0; x < img.width; ++x) mean += luma(img.at(0, y, x), img.at(1, y, x), img.at(2, y, x));
        mean /= static_cast<double>(img.plane());
    }
    for (std::size_t y = 0; y < img.height; ++y)
        for (std::size_t x = 0; x < img.width; ++x) {
            const double anchor = global_mean ? mean : luma(img.at(0, y, x), img.at(1, y, x), img.at(2, y, x));
            for (std::size_t c = 0; c < kChannels; ++c) img.at(c, y, x) = anchor + (img.at(c, y, x) - anchor) * keep;
        }
}

}  // namespace

void CorruptionSpec::validate() const {
    if (severity < 1 || severity > 5) throw Error("corruption severity must be in [1, 5]");
    if (static_cast<std::uint8_t>(kind) > static_cast<std::uint8_t>(CorruptionKind::pixelate)) {
        throw Error("unknown corruption kind");
    }
}

std::string_view to_string(CorruptionKind kind) {
    switch (kind) {
        case CorruptionKind::gaussian_noise: return "gaussian_noise";
        case CorruptionKind::gaussian_blur: return "gaussian_blur";
        case CorruptionKind::brightness: return "brightness";
        case CorruptionKind::contrast: return "contrast";
        case CorruptionKind::saturation_shift: return "saturation_shift";
        case CorruptionKind::pixelate: return "pixelate";
    }
    return "unknown";
}

CorruptionKind parse_corruption(std::string_view name) {
    for (CorruptionKind k : kAllCorruptions)
        if (to_string(k) == name) return k;
    throw Error("unknown corruption kind '" + std::string(name) + "'");
}

Image corrupt(const Image& img, const CorruptionSpec& spec, Rng& rng) {
    spec.validate();
    const double s = spec.severity;
    Image out = img;
    switch (spec.kind) {
        case CorruptionKind::gaussian_noise:
            for (double& v : out.values) v += rng.normal(0.0, 0.04 * s);
            break;
        case CorruptionKind::gaussian_blur: {
            const double sigma = 0.4 * s;
            gaussian_blur(out, sigma, static_cast<std::size_t>(std::ceil(2.0 * sigma)));
            break;
        }
        case CorruptionKind::brightness:
            for (double& v : out.values) v += 0.1 * s;
            break;
        case CorruptionKind::contrast: blend_towards_luma(out, 1.0 - 0.18 * s, true); break;
        case CorruptionKind::saturation_shift: blend_towards_luma(out, 1.0 - 0.18 * s, false); break;
        case CorruptionKind::pixelate: pixelate(out, static_cast<std::size_t>(spec.severity) + 1); break;
    }
    out.clamp();
    return out;
}

}  // namespace tta::data
