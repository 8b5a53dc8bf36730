#include "ringtrace/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ringtrace {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

// splitmix64 finalizer. Drawing every random quantity from a fixed counter
// keyed by the seed makes the generator reproducible and evaluation-order
// independent.
std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

struct CounterRng {
    std::uint64_t seed;

    double uniform(std::uint64_t counter) const {  // [0, 1)
        return static_cast<double>(mix(seed ^ mix(counter)) >> 11) * 0x1.0p-53;
    }

    double gaussian(std::uint64_t counter) const {  // Box-Muller
        const double u1 = std::max(uniform(2 * counter), 1e-300);
        const double u2 = uniform(2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTau * u2);
    }
};

// Counter layout: 0-9 texture, 16+2k per-ring jitter, high range per-pixel
// noise (gaussian consumes two uniforms per counter, so ranges stay disjoint).
constexpr std::uint64_t kNoiseBase = 1ull << 20;

struct Resolved {
    double pith_radius;
    double gap;
};

Resolved resolve(const SynthConfig& cfg) {
    const double r0 = cfg.base_radius > 0 ? cfg.base_radius : 0.04 * cfg.size;
    const double gap =
        cfg.ring_gap > 0 ? cfg.ring_gap : (0.41 * cfg.size - r0) / cfg.n_rings;
    return {r0, gap};
}

std::vector<Vec2> circle_polygon(Vec2 center, double radius, int vertices = 360) {
    std::vector<Vec2> poly;
    poly.reserve(static_cast<std::size_t>(vertices));
    for (int j = 0; j < vertices; ++j) {
        const double a = kTau * j / vertices;
        poly.push_back(center + Vec2{std::cos(a), std::sin(a)} * radius);
    }
    return poly;
}

}  // namespace

void validate_synth_config(const SynthConfig& cfg) {
    if (cfg.size < 16) throw ValidationError("synth config: size must be at least 16");
    if (cfg.n_rings < 1) throw ValidationError("synth config: n_rings must be positive");
    if (cfg.base_radius < 0 || !std::isfinite(cfg.base_radius)) {
        throw ValidationError("synth config: base_radius must be non-negative");
    }
    if (cfg.ring_gap < 0 || !std::isfinite(cfg.ring_gap)) {
        throw ValidationError("synth config: ring_gap must be non-negative");
    }
    if (cfg.eccentricity < 0 || cfg.eccentricity >= 0.5) {
        throw ValidationError("synth config: eccentricity must be in [0, 0.5)");
    }
    if (cfg.ring_contrast < 0 || cfg.ring_contrast > 1) {
        throw ValidationError("synth config: ring_contrast must be in [0, 1]");
    }
    if (cfg.noise_sigma < 0 || cfg.noise_sigma > 1) {
        throw ValidationError("synth config: noise_sigma must be in [0, 1]");
    }
    const auto [r0, gap] = resolve(cfg);
    if (r0 < 2) throw ValidationError("synth config: pith radius resolves below 2 px");
    if (gap < 2) throw ValidationError("synth config: ring gap resolves below 2 px");
    const double outer = r0 + cfg.n_rings * gap + 5.0;
    if (outer > cfg.size / 2.0 - 1.0) {
        throw ValidationError("synth config: rings do not fit inside the image");
    }
}

SynthResult generate_disk(const SynthConfig& cfg) {
    validate_synth_config(cfg);
    const auto [pith_radius, gap] = resolve(cfg);
    const int size = cfg.size;
    const Vec2 center{size / 2.0, size / 2.0};
    const CounterRng rng{cfg.seed};

    // Each ring circle is jittered off the common center by up to
    // eccentricity * gap, which keeps consecutive circles strictly nested.
    const int n = cfg.n_rings;
    std::vector<Vec2> centers(static_cast<std::size_t>(n + 1), center);
    std::vector<double> radii(static_cast<std::size_t>(n + 1), pith_radius);
    for (int k = 1; k <= n; ++k) {
        const double r = cfg.eccentricity * gap * rng.uniform(16 + 2 * static_cast<std::uint64_t>(k));
        const double a = kTau * rng.uniform(17 + 2 * static_cast<std::uint64_t>(k));
        centers[static_cast<std::size_t>(k)] = center + Vec2{std::cos(a), std::sin(a)} * r;
        radii[static_cast<std::size_t>(k)] = pith_radius + k * gap;
    }

    // Low-amplitude radial grain: two sinusoids with periods off the ring
    // spacing, so their gradients stay far below any band edge.
    const double period1 = 2.5 * gap * (0.9 + 0.2 * rng.uniform(0));
    const double period2 = 0.8 * gap * (0.9 + 0.2 * rng.uniform(1));
    const double phase1 = kTau * rng.uniform(2);
    const double phase2 = kTau * rng.uniform(3);

    const double sigma_in = 0.8;
    const double sigma_out = std::clamp(gap / 8.0, 1.2, 6.0);
    const double mask_radius = radii[static_cast<std::size_t>(n)] + 5.0;
    const Vec2 outer_center = centers[static_cast<std::size_t>(n)];

    SynthResult result;
    result.image = ImageRGB(size, size);
    result.mask = Mask(size, size);

    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const Vec2 p{x + 0.5, y + 0.5};
            const bool inside = (p - outer_center).norm() <= mask_radius;
            if (inside) result.mask.set(x, y, true);

            double r = 14, g = 12, b = 11;
            if (inside) {
                const double d0 = (p - center).norm();
                const double texture = 1.0 + 0.03 * std::sin(kTau * d0 / period1 + phase1) +
                                       0.018 * std::sin(kTau * d0 / period2 + phase2);
                // Darker pith with a smooth 1 px transition.
                const double outside_pith = 0.5 * std::erfc((pith_radius - d0) / std::numbers::sqrt2);
                double shade = texture * (0.55 + 0.45 * outside_pith);
                // Ring bands: sharp inside edge, softer decay outward, each
                // band fainter than the last.
                for (int k = 1; k <= n; ++k) {
                    const double delta =
                        (p - centers[static_cast<std::size_t>(k)]).norm() - radii[static_cast<std::size_t>(k)];
                    const double sigma = delta <= 0 ? sigma_in : sigma_out;
                    const double depth = cfg.ring_contrast * std::pow(0.88, k - 1);
                    shade *= 1.0 - depth * std::exp(-0.5 * delta * delta / (sigma * sigma));
                }
                r = 209 * shade;
                g = 173 * shade;
                b = 128 * shade;
            }
            if (cfg.noise_sigma > 0) {
                // One draw per pixel, applied to all channels, so the noise
                // perturbs luminance without tinting.
                const double noise =
                    255.0 * cfg.noise_sigma *
                    rng.gaussian(kNoiseBase + static_cast<std::uint64_t>(y) * size + x);
                r += noise;
                g += noise;
                b += noise;
            }
            result.image.set(x, y, static_cast<std::uint8_t>(std::lround(std::clamp(r, 0.0, 255.0))),
                             static_cast<std::uint8_t>(std::lround(std::clamp(g, 0.0, 255.0))),
                             static_cast<std::uint8_t>(std::lround(std::clamp(b, 0.0, 255.0))));
        }
    }

    result.annotation.image = "synthetic-" + std::to_string(cfg.seed);
    result.annotation.width = size;
    result.annotation.height = size;
    result.annotation.pith = circle_polygon(center, pith_radius);
    for (int k = 1; k <= n; ++k) {
        result.annotation.rings.push_back(
            circle_polygon(centers[static_cast<std::size_t>(k)], radii[static_cast<std::size_t>(k)]));
    }
    return result;
}

}  // namespace ringtrace
