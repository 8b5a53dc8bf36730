#include "ringtrace/types.hpp"

#include <cmath>

namespace ringtrace {

void validate_disk_detection(const DiskDetection& d) {
    validate_ring_curve(d.pith, 8, "pith");
    const int theta = d.pith.theta();
    for (std::size_t k = 0; k < d.rings.size(); ++k) {
        const std::string name = "ring " + std::to_string(k + 1);
        validate_ring_curve(d.rings[k], 8, name.c_str());
        const RingCurve& ring = d.rings[k];
        if (ring.theta() != theta) {
            throw ValidationError(name + ": ray count differs from the pith curve");
        }
        if (ring.origin.x != d.pith.origin.x || ring.origin.y != d.pith.origin.y) {
            throw ValidationError(name + ": origin differs from the pith curve");
        }
        const std::vector<double>& inner = k == 0 ? d.pith.radii : d.rings[k - 1].radii;
        for (int j = 0; j < theta; ++j) {
            if (ring.radii[j] < inner[j]) {
                throw ValidationError(name + ": radius at ray " + std::to_string(j) +
                                      " lies inside the previous boundary");
            }
        }
    }
    if (!d.confidence.empty() && d.confidence.size() != d.rings.size()) {
        throw ValidationError("confidence values must match the ring count");
    }
    for (double c : d.confidence) {
        if (!std::isfinite(c)) throw ValidationError("confidence values must be finite");
    }
}

void validate_probability_maps(const ProbabilityMaps& maps, double tol) {
    if (maps.width < 1 || maps.height < 1) {
        throw ValidationError("probability maps: dimensions must be >= 1");
    }
    const std::size_t n = static_cast<std::size_t>(maps.width) * maps.height;
    for (int cls = 0; cls < 4; ++cls) {
        if (maps.prob[cls].size() != n) {
            throw ValidationError("probability maps: plane " + std::to_string(cls) +
                                  " does not match the stated dimensions");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int cls = 0; cls < 4; ++cls) {
            const float v = maps.prob[cls][i];
            if (!(v >= 0.0f) || !(v <= 1.0f)) {
                throw ValidationError("probability maps: values must lie in [0, 1]");
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > tol) {
            throw ValidationError("probability maps: per-pixel sums must be 1");
        }
    }
}

}  // namespace ringtrace
