#pragma once

#include <vector>

#include "ringtrace/metrics.hpp"
#include "ringtrace/types.hpp"

namespace ringtrace {

// Draws ground-truth curves in green and detections in red (detections last),
// stroke 2 px, on a copy of the image. Curves outside the canvas are clipped.
ImageRGB overlay(const ImageRGB& image, const DiskDetection& gt, const DiskDetection& det);

struct ErrorMapRender {
    ImageRGB image;
    double scale_max = 1.0;               // error mapped to pure blue, >= 1 px
    std::vector<double> ring_mean_error;  // per gt ring; NaN-free, 0 for unmatched
    std::vector<bool> matched;            // per gt ring
};

// Renders each ground-truth ring as a circular band on a square canvas; bands
// of matched rings are colored per ray from red (error 0) to blue (the
// band-set maximum error, at least 1 px); unmatched rings are white.
ErrorMapRender polar_error_map(const AssignmentResult& assignment, const DiskDetection& gt,
                               int canvas);

// Sidecar JSON with the color-scale maximum and per-ring mean errors.
std::string serialize_error_map_info(const ErrorMapRender& render);

}  // namespace ringtrace
