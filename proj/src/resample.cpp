#include "ringtrace/resample.hpp"

#include <algorithm>
#include <cmath>

namespace ringtrace {

double lanczos_kernel(double x, int a) {
    if (a < 1) throw ValidationError("lanczos window must be >= 1");
    const double ax = std::abs(x);
    if (ax >= a) return 0.0;
    // Integer arguments snap to their exact values so same-size resampling is
    // a true identity instead of accumulating sin(pi*k) rounding dust.
    if (x == std::round(x)) return x == 0.0 ? 1.0 : 0.0;
    const double px = M_PI * x;
    return a * std::sin(px) * std::sin(px / a) / (px * px);
}

namespace {

struct OutputDims {
    int width;
    int height;
};

// Longest output dimension = target; the other scales proportionally and
// rounds half away from zero, never below 1.
OutputDims scaled_dims(int w, int h, int target) {
    if (w < 1 || h < 1) throw ValidationError("resize: dimensions must be >= 1");
    if (target < 1) throw ValidationError("resize: target must be >= 1");
    OutputDims out{};
    if (w >= h) {
        out.width = target;
        out.height = std::max(1, static_cast<int>(std::round(
                                     static_cast<double>(h) * target / w)));
    } else {
        out.height = target;
        out.width = std::max(1, static_cast<int>(std::round(
                                    static_cast<double>(w) * target / h)));
    }
    return out;
}

// Precomputed filter taps of one output row/column position.
struct Taps {
    int first;                    // first source index (clamped later)
    std::vector<double> weights;  // normalized
};

std::vector<Taps> build_taps(int n_in, int n_out, int a) {
    const double scale = static_cast<double>(n_in) / n_out;
    const double fscale = std::max(1.0, scale);  // widen the kernel on downscale
    const double radius = a * fscale;
    std::vector<Taps> taps(static_cast<std::size_t>(n_out));
    for (int o = 0; o < n_out; ++o) {
        const double center = (o + 0.5) * scale - 0.5;
        const int lo = static_cast<int>(std::ceil(center - radius));
        const int hi = static_cast<int>(std::floor(center + radius));
        Taps& t = taps[static_cast<std::size_t>(o)];
        t.first = lo;
        t.weights.resize(static_cast<std::size_t>(hi - lo + 1));
        double sum = 0.0;
        for (int i = lo; i <= hi; ++i) {
            const double w = lanczos_kernel((i - center) / fscale, a);
            t.weights[static_cast<std::size_t>(i - lo)] = w;
            sum += w;
        }
        if (sum != 0.0) {
            for (double& w : t.weights) w /= sum;
        }
    }
    return taps;
}

inline int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

}  // namespace

ImageRGB resize_longest(const ImageRGB& image, int target, int a) {
    if (image.width < 1 || image.height < 1) {
        throw ValidationError("resize: image dimensions must be >= 1");
    }
    const OutputDims dims = scaled_dims(image.width, image.height, target);

    // Horizontal pass into a double buffer, then vertical, then one quantize.
    const auto htaps = build_taps(image.width, dims.width, a);
    std::vector<double> mid(static_cast<std::size_t>(dims.width) * image.height * 3);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < dims.width; ++x) {
            const Taps& t = htaps[static_cast<std::size_t>(x)];
            double acc[3] = {0, 0, 0};
            for (std::size_t k = 0; k < t.weights.size(); ++k) {
                const int sx = clamp_index(t.first + static_cast<int>(k), image.width);
                const std::uint8_t* p = image.px(sx, y);
                const double w = t.weights[k];
                acc[0] += w * p[0];
                acc[1] += w * p[1];
                acc[2] += w * p[2];
            }
            double* q = &mid[(static_cast<std::size_t>(y) * dims.width + x) * 3];
            q[0] = acc[0];
            q[1] = acc[1];
            q[2] = acc[2];
        }
    }

    const auto vtaps = build_taps(image.height, dims.height, a);
    ImageRGB out(dims.width, dims.height);
    for (int y = 0; y < dims.height; ++y) {
        const Taps& t = vtaps[static_cast<std::size_t>(y)];
        for (int x = 0; x < dims.width; ++x) {
            double acc[3] = {0, 0, 0};
            for (std::size_t k = 0; k < t.weights.size(); ++k) {
                const int sy = clamp_index(t.first + static_cast<int>(k), image.height);
                const double* p = &mid[(static_cast<std::size_t>(sy) * dims.width + x) * 3];
                const double w = t.weights[k];
                acc[0] += w * p[0];
                acc[1] += w * p[1];
                acc[2] += w * p[2];
            }
            auto* q = out.px(x, y);
            for (int c = 0; c < 3; ++c) {
                q[c] = static_cast<std::uint8_t>(
                    std::lround(std::clamp(acc[c], 0.0, 255.0)));
            }
        }
    }
    return out;
}

namespace {

template <typename MapT>
MapT nearest_resize(const MapT& in, int target) {
    const OutputDims dims = scaled_dims(in.width, in.height, target);
    MapT out(dims.width, dims.height);
    const double sx = static_cast<double>(in.width) / dims.width;
    const double sy = static_cast<double>(in.height) / dims.height;
    for (int y = 0; y < dims.height; ++y) {
        const int iy = clamp_index(static_cast<int>((y + 0.5) * sy), in.height);
        for (int x = 0; x < dims.width; ++x) {
            const int ix = clamp_index(static_cast<int>((x + 0.5) * sx), in.width);
            out.set(x, y, in.at(ix, iy));
        }
    }
    return out;
}

}  // namespace

Mask resize_longest_nearest(const Mask& mask, int target) {
    return nearest_resize(mask, target);
}
ClassMap resize_longest_nearest(const ClassMap& map, int target) {
    return nearest_resize(map, target);
}
InstanceMap resize_longest_nearest(const InstanceMap& map, int target) {
    return nearest_resize(map, target);
}

std::optional<double> sample_luminance(const ImageRGB& image, const Vec2& pos) {
    if (pos.x < 0 || pos.x >= image.width || pos.y < 0 || pos.y >= image.height) {
        return std::nullopt;
    }
    // Bilinear over the four pixel centers surrounding the position; border
    // neighbours replicate.
    const double gx = pos.x - 0.5;
    const double gy = pos.y - 0.5;
    const int x0 = static_cast<int>(std::floor(gx));
    const int y0 = static_cast<int>(std::floor(gy));
    const double fx = gx - x0;
    const double fy = gy - y0;
    double value = 0.0;
    for (int dy = 0; dy <= 1; ++dy) {
        for (int dx = 0; dx <= 1; ++dx) {
            const int x = clamp_index(x0 + dx, image.width);
            const int y = clamp_index(y0 + dy, image.height);
            const std::uint8_t* p = image.px(x, y);
            const double lum = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
            const double w = (dx ? fx : 1 - fx) * (dy ? fy : 1 - fy);
            value += w * lum;
        }
    }
    return value;
}

PolarStrip sample_polar_strip(const ImageRGB& image, const RingCurve& base, double width_px,
                              int n_samples, const Mask* mask) {
    validate_ring_curve(base, /*min_theta=*/3, "strip base");
    if (!(width_px > 0)) throw ValidationError("strip width must be positive");
    if (n_samples < 2) throw ValidationError("strip needs at least 2 radial samples");
    if (mask && (mask->width != image.width || mask->height != image.height)) {
        throw ValidationError("mask dimensions must match the image");
    }

    PolarStrip strip;
    strip.base = base;
    strip.width_px = width_px;
    strip.n_samples = n_samples;
    strip.source_width = image.width;
    strip.source_height = image.height;
    const int theta = base.theta();
    strip.values.assign(static_cast<std::size_t>(n_samples) * theta, 0.0f);
    strip.oob.assign(strip.values.size(), 0);

    for (int s = 0; s < n_samples; ++s) {
        for (int j = 0; j < theta; ++j) {
            const Vec2 pos = strip.position(j, s);
            const std::size_t idx = static_cast<std::size_t>(s) * theta + j;
            const auto lum = sample_luminance(image, pos);
            bool outside = !lum.has_value();
            if (!outside && mask) {
                const int px = static_cast<int>(std::floor(pos.x));
                const int py = static_cast<int>(std::floor(pos.y));
                outside = !mask->in_bounds(px, py) || !mask->at(px, py);
            }
            if (outside) {
                strip.oob[idx] = 1;
            } else {
                strip.values[idx] = static_cast<float>(*lum);
            }
        }
    }
    return strip;
}

}  // namespace ringtrace
