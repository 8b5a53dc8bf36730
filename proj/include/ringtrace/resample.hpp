#pragma once

#include <optional>
#include <vector>

#include "ringtrace/types.hpp"

namespace ringtrace {

// Rectangular resampling of the annulus outside a base curve: S radial samples
// per ray, one column per ray. values[s][j] holds the luminance at
//   origin + unit(angle_j) * (base.radii[j] + s * width_px / (S - 1)).
// Samples outside the source image (or outside the mask, when one was given)
// carry value 0 and an out-of-bounds flag.
struct PolarStrip {
    RingCurve base;
    double width_px = 0.0;
    int n_samples = 0;
    int source_width = 0;
    int source_height = 0;
    std::vector<float> values;    // n_samples * theta, row s major
    std::vector<std::uint8_t> oob;  // parallel to values

    int theta() const { return base.theta(); }

    double radius(int j, int s) const {
        return base.radii[j] + s * width_px / (n_samples - 1);
    }
    Vec2 position(int j, int s) const {
        const double a = base.angle(j);
        return base.origin + Vec2{std::cos(a), std::sin(a)} * radius(j, s);
    }

    float at(int s, int j) const { return values[static_cast<std::size_t>(s) * theta() + j]; }
    bool out_of_bounds(int s, int j) const {
        return oob[static_cast<std::size_t>(s) * theta() + j] != 0;
    }
};

// sinc(x) * sinc(x/a) inside |x| < a, zero outside; sinc(0) = 1.
double lanczos_kernel(double x, int a = 3);

// Aspect-preserving resize so the longest output dimension equals `target`
// (upscales smaller inputs too). Separable Lanczos-a filtering with per-pixel
// weight normalization and replicate borders; the secondary dimension rounds
// half away from zero, minimum 1.
ImageRGB resize_longest(const ImageRGB& image, int target = 1500, int a = 3);

// Label rasters use nearest-neighbour so values never blend; same dimension
// rule as resize_longest.
Mask resize_longest_nearest(const Mask& mask, int target = 1500);
ClassMap resize_longest_nearest(const ClassMap& map, int target = 1500);
InstanceMap resize_longest_nearest(const InstanceMap& map, int target = 1500);

// Bilinear luminance sample of the image at a continuous position (pixel-center
// convention); nullopt outside the image.
std::optional<double> sample_luminance(const ImageRGB& image, const Vec2& pos);

// Samples the strip geometry over the image. When `mask` is given, samples at
// positions where the mask is false are flagged out-of-bounds as well.
PolarStrip sample_polar_strip(const ImageRGB& image, const RingCurve& base, double width_px,
                              int n_samples, const Mask* mask = nullptr);

}  // namespace ringtrace
