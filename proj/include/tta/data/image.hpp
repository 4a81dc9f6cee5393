#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace tta::data {

inline constexpr std::size_t kChannels = 3;

/// RGB image stored channel-major (3 x H x W), values in [0, 1].
struct Image {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> values;

    Image() = default;
    Image(std::size_t h, std::size_t w, double fill = 0.0) : height(h), width(w), values(kChannels * h * w, fill) {}

    std::size_t plane() const { return height * width; }
    double& at(std::size_t c, std::size_t y, std::size_t x) { return values[c * plane() + y * width + x]; }
    double at(std::size_t c, std::size_t y, std::size_t x) const { return values[c * plane() + y * width + x]; }

    void clamp();
    bool operator==(const Image&) const = default;
};

/// ITU-R 601 luma: 0.299 R + 0.587 G + 0.114 B.
double luma(double r, double g, double b);

/// Hue, saturation and value all in [0, 1]; hue is a fraction of the circle.
std::array<double, 3> rgb_to_hsv(double r, double g, double b);
std::array<double, 3> hsv_to_rgb(double h, double s, double v);

/// Separable Gaussian blur; borders replicate the edge pixel.
/// The kernel spans `radius` pixels on each side of the center.
void gaussian_blur(Image& img, double sigma, std::size_t radius);

/// Mean of |a - b| over all values.
double mean_abs_difference(const Image& a, const Image& b);

}  // namespace tta::data
