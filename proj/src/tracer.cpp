#include "ringtrace/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ringtrace/geometry.hpp"
#include "ringtrace/resample.hpp"

namespace ringtrace {

void validate_trace_config(const TraceConfig& cfg) {
    if (cfg.theta < 8) throw ValidationError("trace config: theta must be at least 8");
    if (cfg.n_samples < 4) throw ValidationError("trace config: n_samples must be at least 4");
    if (!(cfg.width_factor > 0) || !std::isfinite(cfg.width_factor)) {
        throw ValidationError("trace config: width_factor must be positive");
    }
    if (!(cfg.min_auto_width > 0) || !std::isfinite(cfg.min_auto_width)) {
        throw ValidationError("trace config: min_auto_width must be positive");
    }
    if (!(cfg.floor_fraction > 0) || cfg.floor_fraction > 1) {
        throw ValidationError("trace config: floor_fraction must be in (0, 1]");
    }
    if (!(cfg.stop_fraction > 0) || cfg.stop_fraction > 1) {
        throw ValidationError("trace config: stop_fraction must be in (0, 1]");
    }
    if (cfg.max_rings < 1) throw ValidationError("trace config: max_rings must be positive");
    if (!(cfg.min_step > 0) || !std::isfinite(cfg.min_step)) {
        throw ValidationError("trace config: min_step must be positive");
    }
}

double estimate_patch_width(std::optional<double> prev_ring_width, int image_longest,
                            const TraceConfig& cfg) {
    if (prev_ring_width) {
        const double width = cfg.width_factor * *prev_ring_width;
        if (width >= cfg.min_auto_width) return width;
    }
    return cfg.floor_fraction * image_longest;
}

namespace {

// Pixel under a continuous position, or nullopt outside the image.
bool inside_mask(const Mask& mask, const Vec2& pos) {
    const int x = static_cast<int>(std::floor(pos.x));
    const int y = static_cast<int>(std::floor(pos.y));
    if (x < 0 || x >= mask.width || y < 0 || y >= mask.height) return false;
    return mask.at(x, y);
}

}  // namespace

DiskDetection trace_rings(const ImageRGB& image, const RingCurve& pith, const Mask& mask,
                          const BoundaryScorer& scorer, const TraceConfig& cfg) {
    validate_trace_config(cfg);
    validate_ring_curve(pith, 8, "pith");
    if (mask.width != image.width || mask.height != image.height) {
        throw ValidationError("mask dimensions do not match the image");
    }

    RingCurve current = pith.theta() == cfg.theta ? pith : resample_curve(pith, cfg.theta);
    for (int j = 0; j < cfg.theta; ++j) {
        if (!inside_mask(mask, current.point(j))) {
            throw ValidationError("pith boundary leaves the mask at ray " + std::to_string(j));
        }
    }

    DiskDetection result;
    result.pith = current;

    const int longest = std::max(image.width, image.height);
    std::optional<double> prev_width;
    std::vector<double> filled(static_cast<std::size_t>(cfg.theta));

    while (static_cast<int>(result.rings.size()) < cfg.max_rings) {
        const double width = estimate_patch_width(prev_width, longest, cfg);
        const PolarStrip strip = sample_polar_strip(image, current, width, cfg.n_samples, &mask);

        ScorerPrediction pred;
        try {
            pred = scorer.score(strip);
        } catch (const std::exception& e) {
            throw ValidationError("scorer failed at ring " +
                                  std::to_string(result.rings.size() + 1) + ": " + e.what());
        }
        if (static_cast<int>(pred.offsets.size()) != cfg.theta ||
            static_cast<int>(pred.background.size()) != cfg.theta ||
            static_cast<int>(pred.confidence.size()) != cfg.theta) {
            throw ValidationError("scorer returned a prediction of the wrong arity at ring " +
                                  std::to_string(result.rings.size() + 1));
        }

        int background_votes = 0;
        for (int j = 0; j < cfg.theta; ++j) background_votes += pred.background[j];
        if (background_votes >= cfg.stop_fraction * cfg.theta) break;

        // Rays that voted background get the median offset of the rest, so a
        // locally occluded sector follows its neighbours outward.
        std::vector<double> good;
        good.reserve(static_cast<std::size_t>(cfg.theta));
        for (int j = 0; j < cfg.theta; ++j) {
            if (!pred.background[j]) good.push_back(pred.offsets[j]);
        }
        std::nth_element(good.begin(), good.begin() + good.size() / 2, good.end());
        const double median = good[good.size() / 2];
        for (int j = 0; j < cfg.theta; ++j) {
            filled[static_cast<std::size_t>(j)] = pred.background[j] ? median : pred.offsets[j];
        }

        RingCurve candidate;
        candidate.origin = current.origin;
        candidate.radii.resize(static_cast<std::size_t>(cfg.theta));
        int exit_votes = 0;
        double growth_sum = 0.0;
        for (int j = 0; j < cfg.theta; ++j) {
            const double step = std::max(filled[static_cast<std::size_t>(j)], cfg.min_step);
            candidate.radii[static_cast<std::size_t>(j)] = current.radii[static_cast<std::size_t>(j)] + step;
            growth_sum += step;
            exit_votes += !inside_mask(mask, candidate.point(j));
        }
        if (exit_votes >= cfg.stop_fraction * cfg.theta) break;

        double conf_sum = 0.0;
        for (int j = 0; j < cfg.theta; ++j) conf_sum += pred.confidence[j];
        result.rings.push_back(candidate);
        result.confidence.push_back(conf_sum / cfg.theta);
        prev_width = growth_sum / cfg.theta;
        current = std::move(candidate);
    }
    return result;
}

}  // namespace ringtrace
