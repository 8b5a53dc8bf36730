#include "ringtrace/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ringtrace {

namespace {

// Supercover traversal of the segment a->b: visits every grid cell the segment
// passes through, including cells touched only at a corner. Coordinates are
// continuous; cell (x,y) spans [x,x+1) x [y,y+1).
void traverse_segment(const Vec2& a, const Vec2& b,
                      const std::function<void(int, int)>& visit) {
    double dx = b.x - a.x;
    double dy = b.y - a.y;
    int x = static_cast<int>(std::floor(a.x));
    int y = static_cast<int>(std::floor(a.y));
    const int xe = static_cast<int>(std::floor(b.x));
    const int ye = static_cast<int>(std::floor(b.y));
    visit(x, y);
    if (x == xe && y == ye) return;

    const int sx = dx > 0 ? 1 : -1;
    const int sy = dy > 0 ? 1 : -1;
    // Parameter t to the next vertical / horizontal grid line.
    double tx = dx != 0 ? ((sx > 0 ? x + 1 - a.x : a.x - x) / std::abs(dx))
                        : std::numeric_limits<double>::infinity();
    double ty = dy != 0 ? ((sy > 0 ? y + 1 - a.y : a.y - y) / std::abs(dy))
                        : std::numeric_limits<double>::infinity();
    const double tdx = dx != 0 ? 1.0 / std::abs(dx) : 0.0;
    const double tdy = dy != 0 ? 1.0 / std::abs(dy) : 0.0;

    // Bound the loop: the segment can cross at most this many cell borders.
    int steps = std::abs(xe - x) + std::abs(ye - y) + 2;
    while (steps-- > 0) {
        if (std::abs(tx - ty) < 1e-12 && tx <= 1.0) {
            // Corner crossing: cover both neighbours so the trace stays
            // connected even through exact lattice points.
            visit(x + sx, y);
            visit(x, y + sy);
            x += sx;
            y += sy;
            tx += tdx;
            ty += tdy;
        } else if (tx < ty) {
            if (tx > 1.0) break;
            x += sx;
            tx += tdx;
        } else {
            if (ty > 1.0) break;
            y += sy;
            ty += tdy;
        }
        visit(x, y);
        if (x == xe && y == ye) break;
    }
}

}  // namespace

std::vector<Pixel> rasterize_curve(const RingCurve& curve, int width, int height) {
    validate_ring_curve(curve, /*min_theta=*/3);
    std::vector<Pixel> out;
    const int theta = curve.theta();
    auto visit = [&](int x, int y) {
        if (x >= 0 && x < width && y >= 0 && y < height) out.push_back({x, y});
    };
    for (int j = 0; j < theta; ++j) {
        traverse_segment(curve.point(j), curve.point((j + 1) % theta), visit);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double polygon_area(std::span<const Vec2> poly) {
    const std::size_t n = poly.size();
    if (n < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        twice += p.x * q.y - q.x * p.y;
    }
    return std::abs(twice) * 0.5;
}

double curve_enclosed_area(const RingCurve& curve) {
    validate_ring_curve(curve, /*min_theta=*/3);
    std::vector<Vec2> poly = polygon_from_curve(curve);
    return polygon_area(poly);
}

bool point_in_polygon(const Vec2& p, std::span<const Vec2> poly) {
    const std::size_t n = poly.size();
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        // Half-open edge rule: count edges crossing the horizontal line
        // through p with one endpoint strictly above and one at-or-below.
        if ((a.y > p.y) != (b.y > p.y)) {
            const double t = (p.y - a.y) / (b.y - a.y);
            if (p.x < a.x + t * (b.x - a.x)) inside = !inside;
        }
    }
    return inside;
}

void fill_polygon(std::span<const Vec2> poly, int width, int height,
                  const std::function<void(int, int)>& emit) {
    if (poly.size() < 3) return;
    double ymin = poly[0].y;
    double ymax = poly[0].y;
    for (const Vec2& v : poly) {
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
    }
    const int row0 = std::max(0, static_cast<int>(std::floor(ymin - 0.5)));
    const int row1 = std::min(height - 1, static_cast<int>(std::ceil(ymax)));
    std::vector<double> xs;
    for (int row = row0; row <= row1; ++row) {
        const double cy = row + 0.5;
        xs.clear();
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = poly[i];
            const Vec2& b = poly[(i + 1) % n];
            if ((a.y > cy) != (b.y > cy)) {
                const double t = (cy - a.y) / (b.y - a.y);
                xs.push_back(a.x + t * (b.x - a.x));
            }
        }
        std::sort(xs.begin(), xs.end());
        // Even-odd: pixels whose center x lies in [xs[2k], xs[2k+1]) are inside.
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            int x0 = static_cast<int>(std::ceil(xs[k] - 0.5));
            int x1 = static_cast<int>(std::ceil(xs[k + 1] - 0.5)) - 1;
            x0 = std::max(x0, 0);
            x1 = std::min(x1, width - 1);
            for (int x = x0; x <= x1; ++x) emit(x, row);
        }
    }
}

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 c{a.x + t * ab.x, a.y + t * ab.y};
    return (p - c).norm();
}

}  // namespace

void stroke_polygon(std::span<const Vec2> poly, int width, int height, double radius,
                    const std::function<void(int, int)>& emit) {
    if (poly.empty() || radius < 0) return;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - radius - 1)));
        const int x1 = std::min(width - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + radius + 1)));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - radius - 1)));
        const int y1 = std::min(height - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + radius + 1)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const Vec2 c{x + 0.5, y + 0.5};
                if (point_segment_distance(c, a, b) <= radius) emit(x, y);
            }
        }
    }
}

namespace {

// Farthest intersection of the ray origin + t*(cos, sin) with the polygon
// boundary; returns -1 if the ray misses entirely.
double ray_polygon_distance(const Vec2& origin, double angle, std::span<const Vec2> poly) {
    const Vec2 d{std::cos(angle), std::sin(angle)};
    double best = -1.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const Vec2 e = b - a;
        const double denom = cross(d, e);
        if (std::abs(denom) < 1e-14) continue;  // parallel
        const Vec2 ao = a - origin;
        const double t = cross(ao, e) / denom;   // distance along the ray
        const double s = cross(ao, d) / denom;   // position on the edge
        // Tolerant endpoint test: an exact vertex hit can round to s = 1 on
        // one edge and s = -eps on the next, dropping the corner from both.
        // Counting a corner twice is harmless here because only the farthest
        // t survives.
        if (t >= 0 && s >= -1e-9 && s <= 1.0 + 1e-9) best = std::max(best, t);
    }
    return best;
}

}  // namespace

RingCurve curve_from_polygon(std::span<const Vec2> poly, const Vec2& origin, int theta) {
    if (poly.size() < 3) throw ValidationError("polygon needs at least 3 vertices");
    if (theta < 3) throw ValidationError("ray count must be at least 3");
    RingCurve curve;
    curve.origin = origin;
    curve.radii.assign(static_cast<std::size_t>(theta), -1.0);
    int hits = 0;
    for (int j = 0; j < theta; ++j) {
        const double r = ray_polygon_distance(origin, curve.angle(j), poly);
        if (r > 0) {
            curve.radii[static_cast<std::size_t>(j)] = r;
            ++hits;
        }
    }
    if (hits == 0) {
        throw ValidationError("polygon does not enclose the origin: every ray missed");
    }
    if (hits < theta) {
        // Fill missed rays by interpolating circularly between the nearest
        // resolved rays on each side.
        for (int j = 0; j < theta; ++j) {
            if (curve.radii[static_cast<std::size_t>(j)] > 0) continue;
            int prev = j;
            int dp = 0;
            do {
                prev = (prev + theta - 1) % theta;
                ++dp;
            } while (curve.radii[static_cast<std::size_t>(prev)] <= 0);
            int next = j;
            int dn = 0;
            do {
                next = (next + 1) % theta;
                ++dn;
            } while (curve.radii[static_cast<std::size_t>(next)] <= 0);
            const double rp = curve.radii[static_cast<std::size_t>(prev)];
            const double rn = curve.radii[static_cast<std::size_t>(next)];
            curve.radii[static_cast<std::size_t>(j)] = rp + (rn - rp) * dp / (dp + dn);
        }
    }
    return curve;
}

std::vector<Vec2> polygon_from_curve(const RingCurve& curve) {
    std::vector<Vec2> poly;
    poly.reserve(static_cast<std::size_t>(curve.theta()));
    for (int j = 0; j < curve.theta(); ++j) poly.push_back(curve.point(j));
    return poly;
}

RingCurve resample_curve(const RingCurve& curve, int theta) {
    validate_ring_curve(curve, /*min_theta=*/3);
    if (theta < 3) throw ValidationError("ray count must be at least 3");
    RingCurve out;
    out.origin = curve.origin;
    out.radii.resize(static_cast<std::size_t>(theta));
    const int n = curve.theta();
    for (int j = 0; j < theta; ++j) {
        const double pos = static_cast<double>(j) * n / theta;
        const int lo = static_cast<int>(std::floor(pos)) % n;
        const int hi = (lo + 1) % n;
        const double f = pos - std::floor(pos);
        out.radii[static_cast<std::size_t>(j)] =
            curve.radii[static_cast<std::size_t>(lo)] * (1.0 - f) +
            curve.radii[static_cast<std::size_t>(hi)] * f;
    }
    return out;
}

}  // namespace ringtrace
