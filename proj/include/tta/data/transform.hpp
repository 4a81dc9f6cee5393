#pragma once

#include "tta/core/rng.hpp"
#include "tta/data/image.hpp"

namespace tta::data {

/// Stochastic augmentation pipeline that mimics color and blur shifts.
///
/// Stages, in order:
///  1. color jitter (if enabled): brightness, contrast, saturation factors
///     drawn uniformly from [1 - x, 1 + x], then a hue rotation drawn from
///     [-hue, hue] of the hue circle (applied in HSV with wraparound).
///     Brightness scales RGB, contrast blends with the mean luma, saturation
///     blends with the per-pixel luma. Values are clamped after each factor.
///  2. with choice_probability: grayscale or invert, picked uniformly among
///     the allowed ones.
///  3. with blur_probability: 3x3 Gaussian blur, sigma uniform in
///     [blur_sigma_min, blur_sigma_max].
///  4. with crop_probability: square crop covering a uniform [crop_min_scale, 1]
///     fraction of the area, resized back with bilinear sampling.
///  5. with hflip_probability: horizontal flip.
struct TransformSpec {
    bool color_jitter = true;
    double brightness = 0.8;
    double contrast = 0.8;
    double saturation = 0.8;
    double hue = 0.2;

    double choice_probability = 0.5;
    bool allow_grayscale = true;
    bool allow_invert = true;

    double blur_probability = 0.5;
    double blur_sigma_min = 1.0;
    double blur_sigma_max = 2.0;

    double crop_probability = 0.0;
    double crop_min_scale = 0.6;
    double hflip_probability = 0.0;

    /// Color jitter, grayscale/invert choice, blur.
    static TransformSpec shift_default();
    /// shift_default() plus random crop and horizontal flip.
    static TransformSpec projector_default();
    /// Every stage disabled.
    static TransformSpec identity();

    /// Throws when a probability or range is outside its domain.
    void validate() const;
};

Image apply_transform(const Image& img, const TransformSpec& spec, Rng& rng);

void to_grayscale(Image& img);
void invert(Image& img);
void adjust_brightness(Image& img, double factor);
void adjust_contrast(Image& img, double factor);
void adjust_saturation(Image& img, double factor);
void rotate_hue(Image& img, double shift);

}  // namespace tta::data
