#pragma once

#include <optional>

#include "ringtrace/scorer.hpp"
#include "ringtrace/types.hpp"

namespace ringtrace {

struct TraceConfig {
    int theta = 360;              // rays per curve
    int n_samples = 64;           // radial samples per strip
    double width_factor = 2.0;    // strip width = factor * previous ring width
    double min_auto_width = 16.0; // below this the floor kicks in
    double floor_fraction = 0.25; // fallback width as a fraction of the image
    double stop_fraction = 0.5;   // background vote needed to stop
    int max_rings = 80;
    double min_step = 1.0;        // enforced outward progress per iteration
};

void validate_trace_config(const TraceConfig& cfg);

// Strip width for the next iteration: width_factor times the previous ring
// width when that is known and large enough, otherwise floor_fraction of the
// image's longest dimension.
double estimate_patch_width(std::optional<double> prev_ring_width, int image_longest,
                            const TraceConfig& cfg);

// The iterative next-boundary loop: starting at the given pith boundary,
// sample a polar strip, score it, append the predicted curve, and stop when
// the background vote reaches stop_fraction, the candidate would leave the
// mask, or max_rings is reached. Output curves grow by at least min_step per
// ray per iteration, so the result always satisfies the outward-monotonicity
// invariant.
DiskDetection trace_rings(const ImageRGB& image, const RingCurve& pith, const Mask& mask,
                          const BoundaryScorer& scorer, const TraceConfig& cfg = {});

}  // namespace ringtrace
