#include "ringtrace/scorer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace ringtrace {

namespace {

// Offset in pixels of radial sample s.
double sample_to_px(const PolarStrip& strip, double s) {
    return s * strip.width_px / (strip.n_samples - 1);
}

// First radial sample index at or beyond min_offset_px.
int first_candidate_sample(const PolarStrip& strip, double min_offset_px) {
    const double step = strip.width_px / (strip.n_samples - 1);
    int s = static_cast<int>(std::ceil(min_offset_px / step - 1e-9));
    return std::clamp(s, 0, strip.n_samples - 1);
}

// Circular median filter, window 5, applied in one pass over a copy.
std::vector<double> circular_median5(const std::vector<double>& values) {
    const int n = static_cast<int>(values.size());
    if (n < 5) return values;
    std::vector<double> out(values.size());
    std::array<double, 5> window;
    for (int j = 0; j < n; ++j) {
        for (int k = -2; k <= 2; ++k) {
            window[static_cast<std::size_t>(k + 2)] = values[static_cast<std::size_t>((j + k + n) % n)];
        }
        std::sort(window.begin(), window.end());
        out[static_cast<std::size_t>(j)] = window[2];
    }
    return out;
}

}  // namespace

ScorerPrediction GradientScorer::score(const PolarStrip& strip) const {
    const int S = strip.n_samples;
    const int theta = strip.theta();
    if (S < 4) throw ValidationError("gradient scorer needs at least 4 radial samples");

    ScorerPrediction pred;
    pred.offsets.resize(theta);
    pred.background.resize(theta);
    pred.confidence.assign(theta, 0.0);

    const int s_min = first_candidate_sample(strip, params_.min_offset_px);
    std::vector<double> raw(static_cast<std::size_t>(S));
    std::vector<double> smooth(static_cast<std::size_t>(S));
    std::vector<double> deriv(static_cast<std::size_t>(S));
    std::vector<double> magnitude(static_cast<std::size_t>(theta), 0.0);
    std::vector<int> oob_dist(static_cast<std::size_t>(S));

    // Samples within one image pixel of an out-of-bounds position blend
    // pixels from beyond the mask (bilinear footprint), so the replacement
    // below also covers this guard band around every out-of-bounds run.
    const double step_px = strip.width_px / (S - 1);
    const int guard = step_px > 0 ? static_cast<int>(std::ceil(1.0 / step_px)) : 1;

    // Precompute the radial Gaussian kernel.
    const double sigma = std::max(params_.smooth_sigma, 1e-6);
    const int radius = std::max(1, static_cast<int>(std::ceil(3 * sigma)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double ksum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        ksum += kernel[static_cast<std::size_t>(k + radius)] = std::exp(-0.5 * k * k / (sigma * sigma));
    }
    for (double& k : kernel) k /= ksum;

    for (int j = 0; j < theta; ++j) {
        // Majority of out-of-bounds samples makes the ray vote background.
        int oob_count = 0;
        for (int s = 0; s < S; ++s) oob_count += strip.out_of_bounds(s, j);
        pred.background[j] = 2 * oob_count > S;

        // Distance to the nearest out-of-bounds sample, for the guard band.
        int dist = S;
        for (int s = 0; s < S; ++s) {
            dist = strip.out_of_bounds(s, j) ? 0 : dist + 1;
            oob_dist[static_cast<std::size_t>(s)] = dist;
        }
        dist = S;
        for (int s = S - 1; s >= 0; --s) {
            dist = strip.out_of_bounds(s, j) ? 0 : dist + 1;
            oob_dist[static_cast<std::size_t>(s)] =
                std::min(oob_dist[static_cast<std::size_t>(s)], dist);
        }

        // Replace out-of-bounds samples (and their guard bands) with the
        // nearest trusted value so the mask edge itself never reads as a
        // luminance edge.
        int last_valid = -1;
        for (int s = 0; s < S; ++s) {
            if (oob_dist[static_cast<std::size_t>(s)] > guard) {
                raw[static_cast<std::size_t>(s)] = strip.at(s, j);
                last_valid = s;
            } else {
                raw[static_cast<std::size_t>(s)] =
                    last_valid >= 0 ? raw[static_cast<std::size_t>(last_valid)] : 0.0;
            }
        }
        // Carry the first trusted value backwards over a leading gap.
        int first_valid = 0;
        while (first_valid < S && oob_dist[static_cast<std::size_t>(first_valid)] <= guard)
            ++first_valid;
        for (int s = 0; s < first_valid && first_valid < S; ++s) {
            raw[static_cast<std::size_t>(s)] = raw[static_cast<std::size_t>(first_valid)];
        }

        for (int s = 0; s < S; ++s) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int idx = std::clamp(s + k, 0, S - 1);
                acc += kernel[static_cast<std::size_t>(k + radius)] * raw[static_cast<std::size_t>(idx)];
            }
            smooth[static_cast<std::size_t>(s)] = acc;
        }
        for (int s = 0; s < S; ++s) {
            if (s == 0) {
                deriv[0] = smooth[1] - smooth[0];
            } else if (s == S - 1) {
                deriv[static_cast<std::size_t>(s)] = smooth[static_cast<std::size_t>(s)] -
                                                     smooth[static_cast<std::size_t>(s - 1)];
            } else {
                deriv[static_cast<std::size_t>(s)] = 0.5 * (smooth[static_cast<std::size_t>(s + 1)] -
                                                            smooth[static_cast<std::size_t>(s - 1)]);
            }
        }

        // Candidates stop where central differences are defined: the one-sided
        // estimate at the last sample carries the full slope (not half), so a
        // feature merely grazing the strip's top edge would outweigh a nearer
        // interior edge of twice its physical strength.
        int best = std::max(s_min, 1);
        double best_mag = -1.0;
        for (int s = best; s <= S - 2; ++s) {
            const double m = std::abs(deriv[static_cast<std::size_t>(s)]);
            if (m > best_mag) {
                best_mag = m;
                best = s;
            }
        }

        if (best_mag <= 0.0) {
            // Featureless ray: fall back to the minimum allowed offset.
            pred.offsets[j] = params_.min_offset_px;
            magnitude[static_cast<std::size_t>(j)] = 0.0;
            continue;
        }

        // Parabolic sub-sample refinement of the argmax (clamped to half a
        // sample) so coarse radial grids still land on the edge.
        double refined = best;
        if (best > 0 && best < S - 1) {
            const double m0 = std::abs(deriv[static_cast<std::size_t>(best - 1)]);
            const double m1 = best_mag;
            const double m2 = std::abs(deriv[static_cast<std::size_t>(best + 1)]);
            const double denom = m0 - 2 * m1 + m2;
            if (std::abs(denom) > 1e-12) {
                refined += std::clamp(0.5 * (m0 - m2) / denom, -0.5, 0.5);
            }
        }
        pred.offsets[j] = std::clamp(sample_to_px(strip, refined), params_.min_offset_px,
                                     strip.width_px);
        magnitude[static_cast<std::size_t>(j)] = best_mag;
    }

    pred.offsets = circular_median5(pred.offsets);

    // Confidence: derivative magnitude normalized by the strip-wide maximum,
    // which keeps it invariant to global affine intensity changes.
    const double peak = *std::max_element(magnitude.begin(), magnitude.end());
    if (peak > 0) {
        for (int j = 0; j < theta; ++j) pred.confidence[j] = magnitude[static_cast<std::size_t>(j)] / peak;
    }
    return pred;
}

namespace {

// Bilinear sample of one probability plane at a continuous position; zero
// outside the image.
double sample_plane(const ProbabilityMaps& maps, int cls, const Vec2& pos) {
    if (pos.x < 0 || pos.x >= maps.width || pos.y < 0 || pos.y >= maps.height) return 0.0;
    const double gx = pos.x - 0.5;
    const double gy = pos.y - 0.5;
    const int x0 = static_cast<int>(std::floor(gx));
    const int y0 = static_cast<int>(std::floor(gy));
    const double fx = gx - x0;
    const double fy = gy - y0;
    double value = 0.0;
    for (int dy = 0; dy <= 1; ++dy) {
        for (int dx = 0; dx <= 1; ++dx) {
            const int x = std::clamp(x0 + dx, 0, maps.width - 1);
            const int y = std::clamp(y0 + dy, 0, maps.height - 1);
            const double w = (dx ? fx : 1 - fx) * (dy ? fy : 1 - fy);
            value += w * maps.at(cls, x, y);
        }
    }
    return value;
}

}  // namespace

ScorerPrediction MapScorer::score(const PolarStrip& strip) const {
    if (maps_->width != strip.source_width || maps_->height != strip.source_height) {
        throw ValidationError("probability map dimensions do not match the strip's source image");
    }
    const int S = strip.n_samples;
    const int theta = strip.theta();

    ScorerPrediction pred;
    pred.offsets.resize(theta);
    pred.background.resize(theta);
    pred.confidence.resize(theta);

    const int s_min = first_candidate_sample(strip, min_offset_px_);
    std::vector<double> boundary(static_cast<std::size_t>(S));

    for (int j = 0; j < theta; ++j) {
        int background_votes = 0;
        for (int s = 0; s < S; ++s) {
            const Vec2 pos = strip.position(j, s);
            boundary[static_cast<std::size_t>(s)] =
                sample_plane(*maps_, static_cast<int>(PixelClass::Boundary), pos);
            const bool outside = strip.out_of_bounds(s, j);
            const double bg =
                outside ? 1.0 : sample_plane(*maps_, static_cast<int>(PixelClass::Background), pos);
            background_votes += bg > 0.5;
        }
        pred.background[j] = 2 * background_votes > S;

        // First local maximum of the boundary probability above the threshold
        // (the nearest boundary outward); fall back to the global argmax.
        int chosen = -1;
        for (int s = s_min; s < S; ++s) {
            const double b = boundary[static_cast<std::size_t>(s)];
            if (b <= threshold_) continue;
            const double prev = s > 0 ? boundary[static_cast<std::size_t>(s - 1)] : -1.0;
            const double next = s < S - 1 ? boundary[static_cast<std::size_t>(s + 1)] : -1.0;
            if (b >= prev && b >= next) {
                chosen = s;
                break;
            }
        }
        if (chosen < 0) {
            chosen = s_min;
            for (int s = s_min; s < S; ++s) {
                if (boundary[static_cast<std::size_t>(s)] > boundary[static_cast<std::size_t>(chosen)]) {
                    chosen = s;
                }
            }
        }
        pred.offsets[j] = std::clamp(sample_to_px(strip, chosen), 0.0, strip.width_px);
        pred.confidence[j] = std::clamp(boundary[static_cast<std::size_t>(chosen)], 0.0, 1.0);
    }
    return pred;
}

}  // namespace ringtrace
