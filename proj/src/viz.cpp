#include "ringtrace/viz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "ringtrace/geometry.hpp"

namespace ringtrace {

namespace {

void stroke_curve(ImageRGB& image, const RingCurve& curve, std::uint8_t r, std::uint8_t g,
                  std::uint8_t b) {
    if (curve.theta() < 3) return;  // nothing drawable
    const auto poly = polygon_from_curve(curve);
    stroke_polygon(poly, image.width, image.height, 1.0,
                   [&](int x, int y) { image.set(x, y, r, g, b); });
}

}  // namespace

ImageRGB overlay(const ImageRGB& image, const DiskDetection& gt, const DiskDetection& det) {
    ImageRGB out = image;
    stroke_curve(out, gt.pith, 0, 255, 0);
    for (const auto& ring : gt.rings) stroke_curve(out, ring, 0, 255, 0);
    stroke_curve(out, det.pith, 255, 0, 0);
    for (const auto& ring : det.rings) stroke_curve(out, ring, 255, 0, 0);
    return out;
}

ErrorMapRender polar_error_map(const AssignmentResult& assignment, const DiskDetection& gt,
                               int canvas) {
    ErrorMapRender render;
    render.image = ImageRGB(canvas, canvas);

    const int n = static_cast<int>(gt.rings.size());
    render.ring_mean_error.assign(static_cast<std::size_t>(n), 0.0);
    render.matched.assign(static_cast<std::size_t>(n), false);

    // Per-ring error lookup: errors[g][j] for matched rings.
    std::vector<const RingMatch*> match_of(static_cast<std::size_t>(n), nullptr);
    double max_error = 0.0;
    for (const auto& pair : assignment.pairs) {
        if (pair.gt_index < 0 || pair.gt_index >= n) continue;
        match_of[static_cast<std::size_t>(pair.gt_index)] = &pair;
        render.matched[static_cast<std::size_t>(pair.gt_index)] = true;
        render.ring_mean_error[static_cast<std::size_t>(pair.gt_index)] = pair.mean_error();
        for (double e : pair.errors) max_error = std::max(max_error, e);
    }
    render.scale_max = std::max(1.0, max_error);
    if (n == 0) return render;

    // Concentric equal-width bands: a central hole the width of one band, then
    // one band per gt ring, innermost first, out to 96% of the half-canvas.
    const double span = 0.48 * canvas;
    const double band = span / (n + 1);
    const double cx = canvas / 2.0;
    const double cy = canvas / 2.0;

    for (int y = 0; y < canvas; ++y) {
        for (int x = 0; x < canvas; ++x) {
            const double dx = x + 0.5 - cx;
            const double dy = y + 0.5 - cy;
            const double d = std::hypot(dx, dy);
            const int g = static_cast<int>(std::floor(d / band)) - 1;
            if (g < 0 || g >= n) continue;
            const auto* match = match_of[static_cast<std::size_t>(g)];
            if (!match) {
                render.image.set(x, y, 255, 255, 255);
                continue;
            }
            const int theta = static_cast<int>(match->errors.size());
            double angle = std::atan2(dy, dx);
            if (angle < 0) angle += 2 * std::numbers::pi;
            const int j =
                static_cast<int>(std::lround(angle * theta / (2 * std::numbers::pi))) % theta;
            const double t =
                std::clamp(match->errors[static_cast<std::size_t>(j)] / render.scale_max, 0.0, 1.0);
            render.image.set(x, y, static_cast<std::uint8_t>(std::lround(255 * (1 - t))), 0,
                             static_cast<std::uint8_t>(std::lround(255 * t)));
        }
    }
    return render;
}

std::string serialize_error_map_info(const ErrorMapRender& render) {
    nlohmann::ordered_json doc;
    doc["scale_max"] = render.scale_max;
    doc["ring_mean_error"] = render.ring_mean_error;
    doc["matched"] = render.matched;
    return doc.dump(2) + "\n";
}

}  // namespace ringtrace
