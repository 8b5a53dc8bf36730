#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ringtrace/types.hpp"

namespace ringtrace {

// Pixel trace of the closed polyline through the curve points, clipped to
// [0,width) x [0,height). Returns every pixel whose cell the polyline crosses
// (8-connected as a path), sorted and deduplicated.
std::vector<Pixel> rasterize_curve(const RingCurve& curve, int width, int height);

// Polygon area of the curve's vertex polygon via the shoelace formula; >= 0.
double curve_enclosed_area(const RingCurve& curve);

double polygon_area(std::span<const Vec2> poly);

// Even-odd rule; p given in continuous coordinates (pixel centers at x+0.5).
bool point_in_polygon(const Vec2& p, std::span<const Vec2> poly);

// Calls emit(x, y, inside) for every pixel of every row; equivalent to testing
// each pixel center with point_in_polygon but computed per scanline.
void fill_polygon(std::span<const Vec2> poly, int width, int height,
                  const std::function<void(int, int)>& emit);

// Marks every pixel whose center lies within `radius` of the closed polyline.
void stroke_polygon(std::span<const Vec2> poly, int width, int height, double radius,
                    const std::function<void(int, int)>& emit);

// Resamples a closed polygon into a ring curve around `origin`: radius per ray
// is the farthest intersection of the ray with the polygon boundary. Rays that
// miss are filled by circular interpolation; throws if every ray misses.
RingCurve curve_from_polygon(std::span<const Vec2> poly, const Vec2& origin, int theta);

std::vector<Vec2> polygon_from_curve(const RingCurve& curve);

// Linear-in-angle resampling of a curve to a different ray count.
RingCurve resample_curve(const RingCurve& curve, int theta);

}  // namespace ringtrace
