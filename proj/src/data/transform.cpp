#include "tta/data/transform.hpp"

#include <algorithm>
#include <cmath>

#include "tta/core/error.hpp"

namespace tta::data {
namespace {

double draw_factor(Rng& rng, double spread) {
    return spread > 0.0 ? rng.uniform(std::max(0.0, 1.0 - spread), 1.0 + spread) : 1.0;
}

void crop_resize(Image& img, double area_fraction, Rng& rng) {
    const double side = std::sqrt(area_fraction);
    const double ch = side * static_cast<double>(img.height);
    const double cw = side * static_cast<double>(img.width);
    const double top = rng.uniform(0.0, static_cast<double>(img.height) - ch);
    const double left = rng.uniform(0.0, static_cast<double>(img.width) - cw);
    Image out(img.height, img.width);
    for (std::size_t y = 0; y < img.height; ++y)
        for (std::size_t x = 0; x < img.width; ++x) {
            const double sy = std::clamp(top + (y + 0.5) * ch / img.height - 0.5, 0.0, img.height - 1.0);
            const double sx = std::clamp(left + (x + 0.5) * cw / img.width - 0.5, 0.0, img.width - 1.0);
            const auto y0 = static_cast<std::size_t>(sy), x0 = static_cast<std::size_t>(sx);
            const std::size_t y1 = std::min(y0 + 1, img.height - 1), x1 = std::min(x0 + 1, img.width - 1);
            const double fy = sy - y0, fx = sx - x0;
            for (std::size_t c = 0; c < kChannels; ++c) {
                out.at(c, y, x) = (1 - fy) * ((1 - fx) * img.at(c, y0, x0) + fx * img.at(c, y0, x1)) +
                                  fy * ((1 - fx) * img.at(c, y1, x0) + fx * img.at(c, y1, x1));
            }
        }
    img = std::move(out);
}

void hflip(Image& img) {
    for (std::size_t c = 0; c < kChannels; ++c)
        for (std::size_t y = 0; y < img.height; ++y)
            for (std::size_t x = 0; x < img.width / 2; ++x) std::swap(img.at(c, y, x), img.at(c, y, img.width - 1 - x));
}

}  // namespace

TransformSpec TransformSpec::shift_default() { return TransformSpec{}; }

TransformSpec TransformSpec::projector_default() {
    TransformSpec spec;
    spec.crop_probability = 1.0;
    spec.hflip_probability = 0.5;
    return spec;
}

TransformSpec TransformSpec::identity() {
    TransformSpec spec;
    spec.color_jitter = false;
    spec.brightness = spec.contrast = spec.saturation = spec.hue = 0.0;
    spec.choice_probability = 0.0;
    spec.blur_probability = 0.0;
    spec.crop_probability = 0.0;
    spec.hflip_probability = 0.0;
    return spec;
}

void TransformSpec::validate() const {
    const auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(choice_probability) || !prob(blur_probability) || !prob(crop_probability) || !prob(hflip_probability)) {
        throw Error("transform: probabilities must lie in [0, 1]");
    }
    const auto factor = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!factor(brightness) || !factor(contrast) || !factor(saturation) || hue < 0 || hue > 0.5) {
        throw Error("transform: jitter ranges must lie in [0, 1] and hue in [0, 0.5]");
    }
    if (!(blur_sigma_min > 0.0) || blur_sigma_max < blur_sigma_min) throw Error("transform: invalid blur sigma range");
    if (!(crop_min_scale > 0.0) || crop_min_scale > 1.0) throw Error("transform: crop scale must lie in (0, 1]");
}

void to_grayscale(Image& img) {
    for (std::size_t y = 0; y < img.height; ++y)
        for (std::size_t x = 0; x < img.width; ++x) {
            const double g = luma(img.at(0, y, x), img.at(1, y, x), img.at(2, y, x));
            for (std::size_t c = 0; c < kChannels; ++c) img.at(c, y, x) = g;
        }
}

void invert(Image& img) {
    for (double& v : img.values) v = 1.0 - v;
}

void adjust_brightness(Image& img, double factor) {
    for (double& v : img.values) v *= factor;
    img.clamp();
}

void adjust_contrast(Image& img, double factor) {
    double mean = 0.0;
    for (std::size_t y = 0; y < img.height; ++y)
        for (std::size_t x = 0; x < img.width; ++x) mean += luma(img.at(0, y, x), img.at(1, y, x), img.at(2, y, x));
    mean /= static_cast<double>(img.plane());
    for (double& v : img.values) v = (v - mean) * factor + mean;
    img.clamp();
}

void adjust_saturation(Image& img, double factor) {
    for (std::size_t y = 0; y < img.height; ++y)
        for (std::size_t x = 0; x < img.width; ++x) {
            const double g = luma(img.at(0, y, x), img.at(1, y, x), img.at(2, y, x));
            for (std::size_t c = 0; c < kChannels; ++c) img.at(c, y, x) = g + (img.at(c, y, x) - g) * factor;
        }
    img.clamp();
}

void rotate_hue(Image& img, double shift) {
    for (std::size_t y = 0; y < img.height; ++y)
        for (std::size_t x = 0; x < img.width; ++x) {
            auto hsv = rgb_to_hsv(img.at(0, y, x), img.at(1, y, x), img.at(2, y, x));
            auto rgb = hsv_to_rgb(hsv[0] + shift, hsv[1], hsv[2]);
            for (std::size_t c = 0; c < kChannels; ++c) img.at(c, y, x) = rgb[c];
        }
    img.clamp();
}

Image apply_transform(const Image& img, const TransformSpec& spec, Rng& rng) {
    Image out = img;
    if (spec.color_jitter) {
        const double b = draw_factor(rng, spec.brightness);
        const double c = draw_factor(rng, spec.contrast);
        const double s = draw_factor(rng, spec.saturation);
        const double h = spec.hue > 0.0 ? rng.uniform(-spec.hue, spec.hue) : 0.0;
        if (b != 1.0) adjust_brightness(out, b);
        if (c != 1.0) adjust_contrast(out, c);
        if (s != 1.0) adjust_saturation(out, s);
        if (h != 0.0) rotate_hue(out, h);
    }
    if (spec.choice_probability > 0.0 && rng.bernoulli(spec.choice_probability)) {
        const bool gray = spec.allow_grayscale && (!spec.allow_invert || rng.bernoulli(0.5));
        if (gray) {
            to_grayscale(out);
        } else if (spec.allow_invert) {
            invert(out);
        }
    }
    if (spec.blur_probability > 0.0 && rng.bernoulli(spec.blur_probability)) {
        gaussian_blur(out, rng.uniform(spec.blur_sigma_min, spec.blur_sigma_max), 1);
    }
    if (spec.crop_probability > 0.0 && rng.bernoulli(spec.crop_probability)) {
        crop_resize(out, rng.uniform(spec.crop_min_scale, 1.0), rng);
    }
    if (spec.hflip_probability > 0.0 && rng.bernoulli(spec.hflip_probability)) hflip(out);
    out.clamp();
    return out;
}

}  // namespace tta::data
