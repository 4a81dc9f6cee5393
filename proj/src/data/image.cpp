#include "tta/data/image.hpp"

#include <algorithm>
#include <cmath>

#include "tta/core/error.hpp"

namespace tta::data {

void Image::clamp() {
    for (double& v : values) v = std::clamp(v, 0.0, 1.0);
}

double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

std::array<double, 3> rgb_to_hsv(double r, double g, double b) {
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;
    double h = 0.0;
    if (delta > 0.0) {
        if (mx == r) {
            h = (g - b) / delta;
        } else if (mx == g) {
            h = 2.0 + (b - r) / delta;
        } else {
            h = 4.0 + (r - g) / delta;
        }
        h /= 6.0;
        if (h < 0.0) h += 1.0;
    }
    const double s = mx > 0.0 ? delta / mx : 0.0;
    return {h, s, mx};
}

std::array<double, 3> hsv_to_rgb(double h, double s, double v) {
    h = h - std::floor(h);
    const double scaled = h * 6.0;
    const int sector = static_cast<int>(scaled) % 6;
    const double f = scaled - std::floor(scaled);
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    switch (sector) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, q};
    }
}

void gaussian_blur(Image& img, double sigma, std::size_t radius) {
    if (!(sigma > 0.0)) throw Error("gaussian_blur: sigma must be positive");
    std::vector<double> kernel(2 * radius + 1);
    double total = 0.0;
    for (std::size_t i = 0; i < kernel.size(); ++i) {
        const double d = static_cast<double>(i) - static_cast<double>(radius);
        kernel[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        total += kernel[i];
    }
    for (double& k : kernel) k /= total;

    const auto clampi = [](std::ptrdiff_t v, std::size_t n) {
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(v, 0, static_cast<std::ptrdiff_t>(n) - 1));
    };
    const std::ptrdiff_t r = static_cast<std::ptrdiff_t>(radius);
    std::vector<double> tmp(img.values.size());
    for (std::size_t c = 0; c < kChannels; ++c) {
        for (std::size_t y = 0; y < img.height; ++y)
            for (std::size_t x = 0; x < img.width; ++x) {
                double acc = 0.0;
                for (std::ptrdiff_t k = -r; k <= r; ++k)
                    acc += kernel[k + r] * img.at(c, y, clampi(static_cast<std::ptrdiff_t>(x) + k, img.width));
                tmp[c * img.plane() + y * img.width + x] = acc;
            }
        for (std::size_t y = 0; y < img.height; ++y)
            for (std::size_t x = 0; x < img.width; ++x) {
                double acc = 0.0;
                for (std::ptrdiff_t k = -r; k <= r; ++k)
                    acc += kernel[k + r] *
                           tmp[c * img.plane() + clampi(static_cast<std::ptrdiff_t>(y) + k, img.height) * img.width + x];
                img.at(c, y, x) = acc;
            }
    }
}

double mean_abs_difference(const Image& a, const Image& b) {
    if (a.values.size() != b.values.size()) throw ShapeError("mean_abs_difference: size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) total += std::abs(a.values[i] - b.values[i]);
    return a.values.empty() ? 0.0 : total / static_cast<double>(a.values.size());
}

}  // namespace tta::data
