#pragma once

#include <string>
#include <vector>

#include "ringtrace/types.hpp"

namespace ringtrace {

// Ground-truth document for one disk: the pith outline plus the ring boundary
// polygons ordered inner to outer. Coordinates are sub-pixel reals in image
// space (pixel-center convention).
struct Annotation {
    std::string image;
    int width = 0;
    int height = 0;
    std::vector<Vec2> pith;
    std::vector<std::vector<Vec2>> rings;
};

// A detection document carries the same geometry payload plus an optional
// per-ring confidence.
struct DetectionDocument {
    Annotation geometry;
    std::vector<double> confidence;  // empty, or one value per ring
};

// Parses and validates the annotation JSON; rings are re-sorted by enclosed
// area ascending and duplicate consecutive vertices dropped. Errors name the
// offending field.
Annotation ingest_annotation(const std::string& json_text);
std::string serialize_annotation(const Annotation& ann);

DetectionDocument ingest_detection(const std::string& json_text);
std::string serialize_detection(const DetectionDocument& det);

// Converts a traced result to its document form: curves become polygons of
// theta vertices.
DetectionDocument detection_to_document(const DiskDetection& det, const std::string& image,
                                        int width, int height);

// Resolves document polygons into ray-sampled curves around `origin` (the
// usual choice: pith_center of the ground truth, so detection and ground truth
// share rays). Curves are resampled to `theta` rays; no nesting is enforced.
DiskDetection document_to_detection(const DetectionDocument& doc, const Vec2& origin, int theta);

// Vertex mean of a polygon; the canonical evaluation origin.
Vec2 polygon_vertex_mean(const std::vector<Vec2>& poly);

// Multiplies every vertex by `factor`; width/height scale with the same
// rounding rule as the image resize.
Annotation scale_annotation(const Annotation& ann, double factor);

// Pixels outside the mask are background; the pith interior is pith; pixels
// within boundary_width/2 of a ring polyline are boundary; the rest of the
// mask interior is ring. Tie priority: boundary > pith > ring > background.
ClassMap rasterize_classmap(const Annotation& ann, const Mask& mask, int boundary_width = 3);

// Region ids grow outward: pith interior = 1, the band between ring k-1 and
// ring k = k+1, everything outside the outermost ring or the mask = 0.
// Rings must be strictly nested.
InstanceMap rasterize_instancemap(const Annotation& ann, const Mask& mask);

}  // namespace ringtrace
