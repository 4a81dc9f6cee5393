#include "tta/data/dataset.hpp"

#include <cmath>
#include <string>

#include "tta/core/error.hpp"
#include "tta/core/rng.hpp"

namespace tta::data {
namespace {

enum class ShapeKind { disk, square, triangle, cross, ring };

bool inside(ShapeKind kind, double dx, double dy, double r) {
    switch (kind) {
        case ShapeKind::disk: return dx * dx + dy * dy <= r * r;
        case ShapeKind::square: return std::abs(dx) <= 0.8 * r && std::abs(dy) <= 0.8 * r;
        case ShapeKind::triangle: {
            // Apex at the top, base at dy = 0.8 r.
            if (dy < -r || dy > 0.8 * r) return false;
            return std::abs(dx) <= (dy + r) / 1.8;
        }
        case ShapeKind::cross:
            return (std::abs(dx) <= 0.3 * r && std::abs(dy) <= r) || (std::abs(dy) <= 0.3 * r && std::abs(dx) <= r);
        case ShapeKind::ring: {
            const double d2 = dx * dx + dy * dy;
            return d2 <= r * r && d2 >= 0.3 * r * r;
        }
    }
    return false;
}

// Jitter ranges. Low contrast between shape and background keeps the task
// sensitive to noise.
constexpr double kPositionJitter = 0.2;
constexpr double kRadiusMin = 0.2, kRadiusMax = 0.32;
constexpr double kHueJitter = 0.06;
constexpr double kSaturationMin = 0.2, kSaturationMax = 0.5;
constexpr double kValueMin = 0.4, kValueMax = 0.65;
constexpr double kBackgroundMin = 0.3, kBackgroundMax = 0.6;
constexpr double kTextureSigma = 0.015;

Image render(int label, std::size_t num_classes, std::size_t size, Rng& rng) {
    const auto kind = static_cast<ShapeKind>(label % 5);
    const double s = static_cast<double>(size);
    const double cx = s / 2.0 + rng.uniform(-kPositionJitter, kPositionJitter) * s;
    const double cy = s / 2.0 + rng.uniform(-kPositionJitter, kPositionJitter) * s;
    const double radius = s * rng.uniform(kRadiusMin, kRadiusMax);

    const double hue =
        static_cast<double>(label) / static_cast<double>(num_classes) + rng.uniform(-kHueJitter, kHueJitter);
    const double value = rng.uniform(kValueMin, kValueMax);
    const double saturation = rng.uniform(kSaturationMin, kSaturationMax);
    const auto fg = hsv_to_rgb(hue, saturation, value);
    const double bg_level = rng.uniform(kBackgroundMin, kBackgroundMax);
    const double bg_tilt_x = rng.uniform(-0.1, 0.1);
    const double bg_tilt_y = rng.uniform(-0.1, 0.1);

    Image img(size, size);
    constexpr int kSub = 4;
    for (std::size_t y = 0; y < size; ++y)
        for (std::size_t x = 0; x < size; ++x) {
            int hits = 0;
            for (int sy = 0; sy < kSub; ++sy)
                for (int sx = 0; sx < kSub; ++sx) {
                    const double px = static_cast<double>(x) + (sx + 0.5) / kSub;
                    const double py = static_cast<double>(y) + (sy + 0.5) / kSub;
                    hits += inside(kind, px - cx, py - cy, radius) ? 1 : 0;
                }
            const double coverage = static_cast<double>(hits) / (kSub * kSub);
            const double bg = bg_level + bg_tilt_x * (static_cast<double>(x) / s - 0.5) +
                              bg_tilt_y * (static_cast<double>(y) / s - 0.5) + rng.normal(0.0, kTextureSigma);
            for (std::size_t c = 0; c < kChannels; ++c) img.at(c, y, x) = coverage * fg[c] + (1.0 - coverage) * bg;
        }
    img.clamp();
    return img;
}

}  // namespace

Dataset generate_source_dataset(std::uint64_t seed, std::size_t n_per_class, std::size_t num_classes,
                                std::size_t image_size) {
    if (num_classes < 2 || num_classes > kMaxClasses) {
        throw Error("generate_source_dataset: num_classes must be in [2, " + std::to_string(kMaxClasses) + "]");
    }
    if (image_size < kMinImageSize) {
        throw Error("generate_source_dataset: images smaller than " + std::to_string(kMinImageSize) +
                    " pixels cannot hold the shapes");
    }
    Dataset ds;
    ds.num_classes = num_classes;
    ds.height = ds.width = image_size;
    const std::size_t total = n_per_class * num_classes;
    ds.images.reserve(total);
    ds.labels.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        const int label = static_cast<int>(i % num_classes);
        Rng rng(derive_seed(seed, i));
        ds.images.push_back(render(label, num_classes, image_size, rng));
        ds.labels.push_back(label);
    }
    return ds;
}

Tensor stack(std::span<const Image> images) {
    if (images.empty()) return Tensor({0, kChannels, 0, 0});
    const std::size_t h = images.front().height, w = images.front().width;
    Tensor t({images.size(), kChannels, h, w});
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (images[i].height != h || images[i].width != w) throw ShapeError("stack: images differ in size");
        std::copy(images[i].values.begin(), images[i].values.end(), t.data.begin() + i * kChannels * h * w);
    }
    return t;
}

Tensor stack(const Dataset& dataset, std::span<const std::size_t> indices) {
    std::vector<Image> picked;
    picked.reserve(indices.size());
    for (std::size_t i : indices) picked.push_back(dataset.images.at(i));
    return stack(picked);
}

std::vector<Image> unstack(const Tensor& batch) {
    if (batch.rank() != 4 || batch.dim(1) != kChannels) throw ShapeError("unstack: expected [N x 3 x H x W], got " + to_string(batch.shape));
    const std::size_t h = batch.dim(2), w = batch.dim(3), sz = kChannels * h * w;
    std::vector<Image> out(batch.dim(0), Image(h, w));
    for (std::size_t i = 0; i < out.size(); ++i)
        std::copy(batch.data.begin() + static_cast<std::ptrdiff_t>(i * sz),
                  batch.data.begin() + static_cast<std::ptrdiff_t>((i + 1) * sz), out[i].values.begin());
    return out;
}

Dataset subset(const Dataset& dataset, std::span<const std::size_t> indices) {
    Dataset out;
    out.num_classes = dataset.num_classes;
    out.height = dataset.height;
    out.width = dataset.width;
    for (std::size_t i : indices) {
        out.images.push_back(dataset.images.at(i));
        out.labels.push_back(dataset.labels.at(i));
    }
    return out;
}

}  // namespace tta::data
