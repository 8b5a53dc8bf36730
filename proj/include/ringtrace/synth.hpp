#pragma once

#include <cstdint>

#include "ringtrace/annotations.hpp"
#include "ringtrace/types.hpp"

namespace ringtrace {

struct SynthConfig {
    int size = 512;              // longest image dimension
    int n_rings = 8;             // ring boundaries outside the pith
    double base_radius = 0.0;    // pith radius; 0 = auto (4% of size)
    double ring_gap = 0.0;       // spacing between rings; 0 = auto (fills ~41% of size)
    double eccentricity = 0.0;   // per-ring center jitter, fraction of the gap, [0, 0.5)
    double ring_contrast = 0.55; // darkness of ring bands, [0, 1]
    double noise_sigma = 0.0;    // additive Gaussian noise, fraction of full scale
    std::uint64_t seed = 1;
};

struct SynthResult {
    ImageRGB image;
    Mask mask;
    Annotation annotation;
};

void validate_synth_config(const SynthConfig& cfg);

// Renders a wood-toned disk with n_rings dark ring bands around a darker pith,
// radial texture, and optional noise; the annotation holds the exact analytic
// curves the bands were rendered from (360-vertex polygons). Deterministic in
// the seed. The mask covers the disk: outermost ring dilated by 5 px.
SynthResult generate_disk(const SynthConfig& cfg);

}  // namespace ringtrace
