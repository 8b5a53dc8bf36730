#pragma once

#include <vector>

#include "ringtrace/annotations.hpp"
#include "ringtrace/types.hpp"

namespace ringtrace {

// One matched (ground truth, detection) ring pair with the per-ray absolute
// radial errors that justified the match.
struct RingMatch {
    int gt_index = -1;
    int det_index = -1;
    std::vector<double> errors;  // one per ray

    double mean_error() const;
};

struct AssignmentResult {
    std::vector<RingMatch> pairs;
    std::vector<int> unmatched_gt;
    std::vector<int> unmatched_det;
    double close_frac = 0.6;  // fraction of rays that must be close
    double dist_frac = 0.5;   // "close" = within dist_frac * local gt width
};

struct MetricsReport {
    double precision = 0.0;  // percent
    double recall = 0.0;     // percent
    double fscore = 0.0;     // percent
    double mar = 0.0;        // [0, 1]
    double arand = 0.0;      // [0, 1]
    int tp = 0;
    int fp = 0;
    int fn = 0;
};

struct LossWeights {
    double lambda_bg = 0.01;
    double lambda_boundary = 1.0;
    double lambda_pith = 0.1;
};

// Matches detected rings to ground-truth rings. A det/gt ray pair is close
// when the radial distance is at most dist_frac times the local gt ring width
// (gap to the neighbouring gt rings); a candidate pair is admissible when at
// least close_frac of the rays are close; admissible pairs are matched
// greedily by increasing mean radial distance. Curves must share the origin;
// the detection is resampled onto the ground truth's rays when the ray counts
// differ.
AssignmentResult assign_rings(const DiskDetection& det, const DiskDetection& gt,
                              double close_frac = 0.6, double dist_frac = 0.5);

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double fscore = 0.0;
};

// P = 100*TP/(TP+FP), R = 100*TP/(TP+FN), F = harmonic mean. All three are 0
// when TP = 0 and anything was detected or expected; all 100 when
// TP = FP = FN = 0.
Prf precision_recall_fscore(const AssignmentResult& assignment, int n_gt, int n_det);

// Instance-map error from the pixel-pair contingency table on pixels that are
// foreground in both maps (background id 0 excluded):
// 1 - F-combination of Rand precision and recall. 0 when both maps are empty.
double adapted_rand_error(const InstanceMap& det, const InstanceMap& gt);

// Mean over IoU thresholds {0.50, 0.55, ..., 0.95} of the recall of greedy
// instance matching by descending IoU. 1 when both maps are empty; 0 when the
// ground truth is empty but the detection is not.
double mean_average_recall(const InstanceMap& det, const InstanceMap& gt);

// Weighted sum of binary cross-entropy on the background class, soft Dice loss
// on the boundary class, and binary cross-entropy on the pith class.
// Probabilities are clamped to [eps, 1-eps], eps = 1e-7.
double segmentation_loss(const ProbabilityMaps& pred, const ClassMap& gt,
                         const LossWeights& weights = {});

// Unweighted arithmetic mean of every field (per-disk macro average).
MetricsReport aggregate_reports(const std::vector<MetricsReport>& reports);

// Drops instance id 1 (the pith region) from the map and shifts the remaining
// ids down so they stay contiguous.
InstanceMap drop_pith_instance(const InstanceMap& map);

// Full per-disk evaluation: assignment + P/R/F on the ring curves, mAR and
// ARAND on instance maps rasterized from both documents. The detection and
// ground truth are resolved into curves around the ground-truth pith center.
MetricsReport evaluate_detection(const DetectionDocument& det, const Annotation& gt,
                                 const Mask& mask, double close_frac = 0.6,
                                 double dist_frac = 0.5, bool exclude_pith = false,
                                 int theta = 360, AssignmentResult* assignment_out = nullptr,
                                 DiskDetection* det_curves_out = nullptr,
                                 DiskDetection* gt_curves_out = nullptr);

}  // namespace ringtrace
