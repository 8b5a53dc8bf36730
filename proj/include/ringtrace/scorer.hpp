#pragma once

#include <vector>

#include "ringtrace/resample.hpp"
#include "ringtrace/types.hpp"

namespace ringtrace {

// Per-ray answer to "where is the next boundary outward from the base curve":
// radial offset in pixels from the base, whether the ray ran into background
// before any boundary, and a confidence in [0, 1] for the call that was made.
struct ScorerPrediction {
    std::vector<double> offsets;
    std::vector<bool> background;
    std::vector<double> confidence;
};

// The next-boundary predictor seam. Implementations must be pure: same strip,
// same prediction.
class BoundaryScorer {
public:
    virtual ~BoundaryScorer() = default;
    virtual ScorerPrediction score(const PolarStrip& strip) const = 0;
};

struct GradientScorerParams {
    double min_offset_px = 3.0;
    double smooth_sigma = 1.0;  // in radial samples
};

// Classical edge detector: per ray, Gaussian-smooth the luminance radially and
// take the position of maximum absolute derivative (at or beyond
// min_offset_px), then median-filter offsets over a 5-ray circular window.
// A ray whose samples are majority out-of-bounds votes background.
class GradientScorer : public BoundaryScorer {
public:
    explicit GradientScorer(GradientScorerParams params = {}) : params_(params) {}
    ScorerPrediction score(const PolarStrip& strip) const override;

private:
    GradientScorerParams params_;
};

// Reads precomputed class-probability maps: per ray, the offset is the first
// local maximum of the boundary-class probability exceeding `threshold` (at or
// beyond min_offset_px), falling back to the global argmax; a ray votes
// background when the background-class probability wins the majority of its
// samples.
class MapScorer : public BoundaryScorer {
public:
    explicit MapScorer(const ProbabilityMaps& maps, double threshold = 0.5,
                       double min_offset_px = 3.0)
        : maps_(&maps), threshold_(threshold), min_offset_px_(min_offset_px) {}
    ScorerPrediction score(const PolarStrip& strip) const override;

private:
    const ProbabilityMaps* maps_;
    double threshold_;
    double min_offset_px_;
};

}  // namespace ringtrace
