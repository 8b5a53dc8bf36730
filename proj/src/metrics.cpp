#include "ringtrace/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>

#include "ringtrace/geometry.hpp"

namespace ringtrace {

double RingMatch::mean_error() const {
    if (errors.empty()) return 0.0;
    return std::accumulate(errors.begin(), errors.end(), 0.0) / errors.size();
}

AssignmentResult assign_rings(const DiskDetection& det, const DiskDetection& gt,
                              double close_frac, double dist_frac) {
    if (close_frac <= 0 || close_frac > 1) {
        throw ValidationError("assign_rings: close_frac must be in (0, 1]");
    }
    if (dist_frac <= 0 || !std::isfinite(dist_frac)) {
        throw ValidationError("assign_rings: dist_frac must be positive");
    }
    const Vec2 delta = det.pith.origin - gt.pith.origin;
    if (std::abs(delta.x) > 1e-6 || std::abs(delta.y) > 1e-6) {
        throw ValidationError("assign_rings: detections do not share an origin");
    }

    AssignmentResult result;
    result.close_frac = close_frac;
    result.dist_frac = dist_frac;

    const int n_gt = static_cast<int>(gt.rings.size());
    const int n_det = static_cast<int>(det.rings.size());
    for (int d = 0; d < n_det; ++d) result.unmatched_det.push_back(d);
    for (int g = 0; g < n_gt; ++g) result.unmatched_gt.push_back(g);
    if (n_gt == 0 || n_det == 0) return result;

    const int theta = gt.rings.front().theta();
    std::vector<RingCurve> det_rings;
    det_rings.reserve(static_cast<std::size_t>(n_det));
    for (const auto& ring : det.rings) {
        det_rings.push_back(ring.theta() == theta ? ring : resample_curve(ring, theta));
    }

    // Local ground-truth ring width per ray: the gap to the neighbouring gt
    // rings, averaged when both exist; edge rings use their single
    // ring-neighbour gap, and a lone ring falls back to its gap to the pith.
    std::vector<std::vector<double>> widths(static_cast<std::size_t>(n_gt));
    for (int g = 0; g < n_gt; ++g) {
        auto& w = widths[static_cast<std::size_t>(g)];
        w.resize(static_cast<std::size_t>(theta));
        for (int j = 0; j < theta; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            const double r = gt.rings[static_cast<std::size_t>(g)].radii[jj];
            if (n_gt == 1) {
                w[jj] = r - gt.pith.radii[jj];
            } else if (g == 0) {
                w[jj] = gt.rings[1].radii[jj] - r;
            } else if (g == n_gt - 1) {
                w[jj] = r - gt.rings[static_cast<std::size_t>(g - 1)].radii[jj];
            } else {
                w[jj] = 0.5 * (gt.rings[static_cast<std::size_t>(g + 1)].radii[jj] -
                               gt.rings[static_cast<std::size_t>(g - 1)].radii[jj]);
            }
        }
    }

    struct Candidate {
        double mean;
        int g;
        int d;
        std::vector<double> errors;
    };
    std::vector<Candidate> candidates;
    for (int g = 0; g < n_gt; ++g) {
        for (int d = 0; d < n_det; ++d) {
            std::vector<double> errors(static_cast<std::size_t>(theta));
            int close = 0;
            double sum = 0.0;
            for (int j = 0; j < theta; ++j) {
                const auto jj = static_cast<std::size_t>(j);
                const double err = std::abs(det_rings[static_cast<std::size_t>(d)].radii[jj] -
                                            gt.rings[static_cast<std::size_t>(g)].radii[jj]);
                errors[jj] = err;
                sum += err;
                close += err <= dist_frac * widths[static_cast<std::size_t>(g)][jj];
            }
            if (close >= close_frac * theta - 1e-9) {
                candidates.push_back({sum / theta, g, d, std::move(errors)});
            }
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.mean != b.mean) return a.mean < b.mean;
        if (a.g != b.g) return a.g < b.g;
        return a.d < b.d;
    });

    std::vector<bool> gt_used(static_cast<std::size_t>(n_gt), false);
    std::vector<bool> det_used(static_cast<std::size_t>(n_det), false);
    for (auto& c : candidates) {
        if (gt_used[static_cast<std::size_t>(c.g)] || det_used[static_cast<std::size_t>(c.d)]) continue;
        gt_used[static_cast<std::size_t>(c.g)] = true;
        det_used[static_cast<std::size_t>(c.d)] = true;
        result.pairs.push_back({c.g, c.d, std::move(c.errors)});
    }
    std::erase_if(result.unmatched_gt, [&](int g) { return gt_used[static_cast<std::size_t>(g)]; });
    std::erase_if(result.unmatched_det, [&](int d) { return det_used[static_cast<std::size_t>(d)]; });
    return result;
}

Prf precision_recall_fscore(const AssignmentResult& assignment, int n_gt, int n_det) {
    const int tp = static_cast<int>(assignment.pairs.size());
    const int fp = n_det - tp;
    const int fn = n_gt - tp;
    if (fp < 0 || fn < 0) {
        throw ValidationError("precision_recall_fscore: more matches than rings");
    }
    Prf out;
    if (tp == 0) {
        const double value = (fp == 0 && fn == 0) ? 100.0 : 0.0;
        out.precision = out.recall = out.fscore = value;
        return out;
    }
    out.precision = 100.0 * tp / (tp + fp);
    out.recall = 100.0 * tp / (tp + fn);
    out.fscore = 2.0 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

namespace {

void require_same_dims(const InstanceMap& a, const InstanceMap& b, const char* op) {
    if (a.width != b.width || a.height != b.height) {
        throw ValidationError(std::string(op) + ": instance map dimensions differ");
    }
}

// Contingency counts over pixels that are foreground in both maps, plus the
// marginal counts per id. Ids are dense (≤ max_id), so flat tables suffice.
struct Contingency {
    std::vector<std::uint64_t> joint;  // (n_det_ids) x (n_gt_ids)
    std::vector<std::uint64_t> det_sum;
    std::vector<std::uint64_t> gt_sum;
    int n_det_ids = 0;
    int n_gt_ids = 0;

    std::uint64_t at(int i, int j) const {
        return joint[static_cast<std::size_t>(i) * n_gt_ids + j];
    }
};

Contingency build_contingency(const InstanceMap& det, const InstanceMap& gt) {
    Contingency c;
    c.n_det_ids = det.max_id();
    c.n_gt_ids = gt.max_id();
    if (c.n_det_ids == 0 || c.n_gt_ids == 0) return c;
    c.joint.assign(static_cast<std::size_t>(c.n_det_ids) * c.n_gt_ids, 0);
    c.det_sum.assign(static_cast<std::size_t>(c.n_det_ids), 0);
    c.gt_sum.assign(static_cast<std::size_t>(c.n_gt_ids), 0);
    for (std::size_t i = 0; i < det.data.size(); ++i) {
        const int di = det.data[i];
        const int gi = gt.data[i];
        if (di == 0 || gi == 0) continue;
        ++c.joint[(static_cast<std::size_t>(di) - 1) * c.n_gt_ids + (gi - 1)];
        ++c.det_sum[static_cast<std::size_t>(di) - 1];
        ++c.gt_sum[static_cast<std::size_t>(gi) - 1];
    }
    return c;
}

}  // namespace

double adapted_rand_error(const InstanceMap& det, const InstanceMap& gt) {
    require_same_dims(det, gt, "adapted_rand_error");
    bool det_empty = true;
    for (auto v : det.data) {
        if (v != 0) {
            det_empty = false;
            break;
        }
    }
    bool gt_empty = true;
    for (auto v : gt.data) {
        if (v != 0) {
            gt_empty = false;
            break;
        }
    }
    if (det_empty && gt_empty) return 0.0;

    const auto c = build_contingency(det, gt);
    std::uint64_t sum_joint_sq = 0, sum_det_sq = 0, sum_gt_sq = 0;
    for (auto v : c.joint) sum_joint_sq += v * v;
    for (auto v : c.det_sum) sum_det_sq += v * v;
    for (auto v : c.gt_sum) sum_gt_sq += v * v;
    // Disjoint foreground (or one side empty) leaves nothing in the table:
    // maximal disagreement.
    if (sum_joint_sq == 0) return 1.0;

    const double prec = static_cast<double>(sum_joint_sq) / static_cast<double>(sum_det_sq);
    const double rec = static_cast<double>(sum_joint_sq) / static_cast<double>(sum_gt_sq);
    return 1.0 - 2.0 * prec * rec / (prec + rec);
}

double mean_average_recall(const InstanceMap& det, const InstanceMap& gt) {
    require_same_dims(det, gt, "mean_average_recall");

    // Instance areas and pairwise intersections over positive ids.
    const int nd = det.max_id();
    const int ng = gt.max_id();
    std::vector<std::uint64_t> det_area(static_cast<std::size_t>(nd), 0);
    std::vector<std::uint64_t> gt_area(static_cast<std::size_t>(ng), 0);
    std::vector<std::uint64_t> inter(static_cast<std::size_t>(nd) * std::max(ng, 1), 0);
    for (std::size_t i = 0; i < det.data.size(); ++i) {
        const int di = det.data[i];
        const int gi = gt.data[i];
        if (di > 0) ++det_area[static_cast<std::size_t>(di) - 1];
        if (gi > 0) ++gt_area[static_cast<std::size_t>(gi) - 1];
        if (di > 0 && gi > 0) ++inter[(static_cast<std::size_t>(di) - 1) * ng + (gi - 1)];
    }
    int n_gt_instances = 0;
    for (auto a : gt_area) n_gt_instances += a > 0;
    int n_det_instances = 0;
    for (auto a : det_area) n_det_instances += a > 0;
    if (n_gt_instances == 0) return n_det_instances == 0 ? 1.0 : 0.0;

    struct Pair {
        double iou;
        int g;
        int d;
    };
    std::vector<Pair> pairs;
    for (int d = 0; d < nd; ++d) {
        for (int g = 0; g < ng; ++g) {
            const std::uint64_t in = inter[static_cast<std::size_t>(d) * ng + g];
            if (in == 0) continue;
            const std::uint64_t un = det_area[static_cast<std::size_t>(d)] +
                                     gt_area[static_cast<std::size_t>(g)] - in;
            pairs.push_back({static_cast<double>(in) / static_cast<double>(un), g, d});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (a.g != b.g) return a.g < b.g;
        return a.d < b.d;
    });

    double total = 0.0;
    for (int step = 0; step < 10; ++step) {
        const double threshold = 0.50 + 0.05 * step;
        std::vector<bool> g_used(static_cast<std::size_t>(ng), false);
        std::vector<bool> d_used(static_cast<std::size_t>(nd), false);
        int matches = 0;
        for (const auto& p : pairs) {
            if (p.iou < threshold) break;  // sorted descending
            if (g_used[static_cast<std::size_t>(p.g)] || d_used[static_cast<std::size_t>(p.d)]) continue;
            g_used[static_cast<std::size_t>(p.g)] = true;
            d_used[static_cast<std::size_t>(p.d)] = true;
            ++matches;
        }
        total += static_cast<double>(matches) / n_gt_instances;
    }
    return total / 10.0;
}

double segmentation_loss(const ProbabilityMaps& pred, const ClassMap& gt,
                         const LossWeights& weights) {
    if (pred.width != gt.width || pred.height != gt.height) {
        throw ValidationError("segmentation_loss: prediction and label dimensions differ");
    }
    constexpr double kEps = 1e-7;
    const std::size_t n = static_cast<std::size_t>(gt.width) * gt.height;

    double bce_bg = 0.0;
    double bce_pith = 0.0;
    double dice_inter = 0.0;
    double dice_pred = 0.0;
    double dice_gt = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto cls = static_cast<PixelClass>(gt.data[i]);
        const double p_bg =
            std::clamp<double>(pred.prob[static_cast<int>(PixelClass::Background)][i], kEps, 1 - kEps);
        const double p_boundary =
            std::clamp<double>(pred.prob[static_cast<int>(PixelClass::Boundary)][i], kEps, 1 - kEps);
        const double p_pith =
            std::clamp<double>(pred.prob[static_cast<int>(PixelClass::Pith)][i], kEps, 1 - kEps);

        bce_bg -= cls == PixelClass::Background ? std::log(p_bg) : std::log(1 - p_bg);
        bce_pith -= cls == PixelClass::Pith ? std::log(p_pith) : std::log(1 - p_pith);

        const double g_boundary = cls == PixelClass::Boundary ? 1.0 : 0.0;
        dice_inter += p_boundary * g_boundary;
        dice_pred += p_boundary;
        dice_gt += g_boundary;
    }
    const double dice = 1.0 - 2.0 * dice_inter / (dice_pred + dice_gt + kEps);
    return weights.lambda_bg * bce_bg / static_cast<double>(n) + weights.lambda_boundary * dice +
           weights.lambda_pith * bce_pith / static_cast<double>(n);
}

MetricsReport aggregate_reports(const std::vector<MetricsReport>& reports) {
    if (reports.empty()) throw ValidationError("aggregate_reports: no reports to aggregate");
    MetricsReport mean;
    double tp = 0, fp = 0, fn = 0;
    for (const auto& r : reports) {
        mean.precision += r.precision;
        mean.recall += r.recall;
        mean.fscore += r.fscore;
        mean.mar += r.mar;
        mean.arand += r.arand;
        tp += r.tp;
        fp += r.fp;
        fn += r.fn;
    }
    const double n = static_cast<double>(reports.size());
    mean.precision /= n;
    mean.recall /= n;
    mean.fscore /= n;
    mean.mar /= n;
    mean.arand /= n;
    mean.tp = static_cast<int>(std::lround(tp / n));
    mean.fp = static_cast<int>(std::lround(fp / n));
    mean.fn = static_cast<int>(std::lround(fn / n));
    return mean;
}

InstanceMap drop_pith_instance(const InstanceMap& map) {
    InstanceMap out = map;
    for (auto& v : out.data) {
        if (v == 1) {
            v = 0;
        } else if (v > 1) {
            v = static_cast<std::uint16_t>(v - 1);
        }
    }
    return out;
}

MetricsReport evaluate_detection(const DetectionDocument& det, const Annotation& gt,
                                 const Mask& mask, double close_frac, double dist_frac,
                                 bool exclude_pith, int theta, AssignmentResult* assignment_out,
                                 DiskDetection* det_curves_out, DiskDetection* gt_curves_out) {
    const Vec2 origin = polygon_vertex_mean(gt.pith);
    const DetectionDocument gt_doc{gt, {}};
    const DiskDetection gt_curves = document_to_detection(gt_doc, origin, theta);
    const DiskDetection det_curves = document_to_detection(det, origin, theta);

    AssignmentResult assignment = assign_rings(det_curves, gt_curves, close_frac, dist_frac);
    const Prf prf = precision_recall_fscore(assignment, static_cast<int>(gt.rings.size()),
                                            static_cast<int>(det.geometry.rings.size()));

    InstanceMap gt_instances = rasterize_instancemap(gt, mask);
    InstanceMap det_instances = rasterize_instancemap(det.geometry, mask);
    if (exclude_pith) {
        gt_instances = drop_pith_instance(gt_instances);
        det_instances = drop_pith_instance(det_instances);
    }

    MetricsReport report;
    report.precision = prf.precision;
    report.recall = prf.recall;
    report.fscore = prf.fscore;
    report.mar = mean_average_recall(det_instances, gt_instances);
    report.arand = adapted_rand_error(det_instances, gt_instances);
    report.tp = static_cast<int>(assignment.pairs.size());
    report.fp = static_cast<int>(det.geometry.rings.size()) - report.tp;
    report.fn = static_cast<int>(gt.rings.size()) - report.tp;

    if (assignment_out) *assignment_out = std::move(assignment);
    if (det_curves_out) *det_curves_out = det_curves;
    if (gt_curves_out) *gt_curves_out = gt_curves;
    return report;
}

}  // namespace ringtrace
