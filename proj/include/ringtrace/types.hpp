#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ringtrace {

// Thrown when an input violates a documented precondition or file schema.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when a file cannot be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::hypot(x, y); }
};

inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

struct Pixel {
    int x = 0;
    int y = 0;
    friend bool operator==(const Pixel&, const Pixel&) = default;
    friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

// 8-bit RGB raster, row-major, 3 bytes per pixel.
// Sub-pixel geometry uses the pixel-center convention: pixel (x, y) covers the
// unit square centered at (x + 0.5, y + 0.5).
struct ImageRGB {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    ImageRGB() = default;
    ImageRGB(int w, int h, std::uint8_t r = 0, std::uint8_t g = 0, std::uint8_t b = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3) {
        if (w < 1 || h < 1) throw ValidationError("ImageRGB: dimensions must be >= 1");
        for (std::size_t i = 0; i < data.size(); i += 3) {
            data[i] = r;
            data[i + 1] = g;
            data[i + 2] = b;
        }
    }

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    std::uint8_t* px(int x, int y) { return data.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
    const std::uint8_t* px(int x, int y) const {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }

    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        auto* p = px(x, y);
        p[0] = r;
        p[1] = g;
        p[2] = b;
    }
};

// Per-pixel boolean raster; true = inside the disk.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // 0 or 1

    Mask() = default;
    Mask(int w, int h, bool value = false)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, value ? 1 : 0) {
        if (w < 1 || h < 1) throw ValidationError("Mask: dimensions must be >= 1");
    }

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto v : data) n += v != 0;
        return n;
    }
};

// Semantic labels of the four-category annotation format.
enum class PixelClass : std::uint8_t {
    Background = 0,
    Ring = 1,
    Boundary = 2,
    Pith = 3,
};

// Per-pixel label in {0 = background, 1 = ring, 2 = boundary, 3 = pith}.
struct ClassMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    ClassMap() = default;
    ClassMap(int w, int h, std::uint8_t value = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, value) {
        if (w < 1 || h < 1) throw ValidationError("ClassMap: dimensions must be >= 1");
    }

    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    void set(int x, int y, std::uint8_t v) { data[static_cast<std::size_t>(y) * width + x] = v; }
};

// Per-pixel instance id; 0 = background, ids 1..K count ring regions from the
// pith outward (the pith region carries id 1).
struct InstanceMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> data;

    InstanceMap() = default;
    InstanceMap(int w, int h, std::uint16_t value = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, value) {
        if (w < 1 || h < 1) throw ValidationError("InstanceMap: dimensions must be >= 1");
    }

    std::uint16_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    void set(int x, int y, std::uint16_t v) { data[static_cast<std::size_t>(y) * width + x] = v; }

    std::uint16_t max_id() const {
        std::uint16_t m = 0;
        for (auto v : data) m = std::max(m, v);
        return m;
    }
};

// Closed boundary curve sampled at theta() uniformly spaced rays from a fixed
// origin; radii[j] is the distance along the ray with angle 2*pi*j/theta.
// Index arithmetic is modular: the curve is implicitly closed.
struct RingCurve {
    Vec2 origin;
    std::vector<double> radii;

    RingCurve() = default;
    RingCurve(Vec2 o, std::vector<double> r) : origin(o), radii(std::move(r)) {}

    int theta() const { return static_cast<int>(radii.size()); }
    double angle(int j) const { return 2.0 * M_PI * j / theta(); }
    Vec2 point(int j) const {
        const double a = angle(j);
        return origin + Vec2{std::cos(a), std::sin(a)} * radii[j];
    }
};

// Makes a circle curve; handy for fixtures and the synthetic generator.
inline RingCurve make_circle_curve(Vec2 origin, double radius, int theta) {
    std::vector<double> r(static_cast<std::size_t>(theta), radius);
    return RingCurve{origin, std::move(r)};
}

// Geometry helpers work with any closed polygonal curve (min_theta = 3);
// detections and traced output insist on at least 8 rays.
inline void validate_ring_curve(const RingCurve& c, int min_theta = 8,
                                const char* what = "RingCurve") {
    if (c.theta() < min_theta) {
        throw ValidationError(std::string(what) + ": needs at least " +
                              std::to_string(min_theta) + " rays");
    }
    for (double r : c.radii) {
        if (!(r > 0.0) || !std::isfinite(r))
            throw ValidationError(std::string(what) + ": radii must be positive and finite");
    }
}

// Ordered inner->outer set of ring curves plus the pith curve. All curves share
// the same origin and ray count; radii are monotone outward per ray.
struct DiskDetection {
    RingCurve pith;
    std::vector<RingCurve> rings;
    std::vector<double> confidence;  // optional, one value per ring when present
};

void validate_disk_detection(const DiskDetection& d);

// Per-pixel probability for the four classes (background, ring, boundary,
// pith); probabilities sum to 1 per pixel.
struct ProbabilityMaps {
    int width = 0;
    int height = 0;
    std::vector<float> prob[4];  // indexed by PixelClass value

    ProbabilityMaps() = default;
    ProbabilityMaps(int w, int h) : width(w), height(h) {
        if (w < 1 || h < 1) throw ValidationError("ProbabilityMaps: dimensions must be >= 1");
        for (auto& p : prob) p.assign(static_cast<std::size_t>(w) * h, 0.0f);
    }

    float at(int cls, int x, int y) const { return prob[cls][static_cast<std::size_t>(y) * width + x]; }
    void set(int cls, int x, int y, float v) { prob[cls][static_cast<std::size_t>(y) * width + x] = v; }
};

// Checks the per-pixel sum-to-one invariant up to `tol`.
void validate_probability_maps(const ProbabilityMaps& maps, double tol = 1e-6);

}  // namespace ringtrace
