#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ringtrace/annotations.hpp"
#include "ringtrace/metrics.hpp"
#include "ringtrace/types.hpp"

namespace ringtrace {

// --- PNG rasters ----------------------------------------------------------
// Images are 8-bit RGB (gray and paletted inputs are expanded; alpha is
// dropped). Masks and class maps are 8-bit grayscale; a mask treats any
// nonzero value as true and writes 0/255. Class maps hold the literal values
// {0,1,2,3}. Instance maps are 16-bit grayscale.

ImageRGB read_image_png(const std::string& path);
void write_image_png(const std::string& path, const ImageRGB& image);

Mask read_mask_png(const std::string& path);
void write_mask_png(const std::string& path, const Mask& mask);

ClassMap read_classmap_png(const std::string& path);
void write_classmap_png(const std::string& path, const ClassMap& map);

InstanceMap read_instancemap_png(const std::string& path);
void write_instancemap_png(const std::string& path, const InstanceMap& map);

// --- Probability maps -----------------------------------------------------
// One 16-bit grayscale PNG per class: <stem>.bg.png, <stem>.ring.png,
// <stem>.boundary.png, <stem>.pith.png; value/65535 = probability. On load,
// per-pixel sums must be within 1e-2 of 1 (quantization slack); maps are then
// renormalized to sum exactly.

ProbabilityMaps read_probability_maps(const std::string& stem);
void write_probability_maps(const std::string& stem, const ProbabilityMaps& maps);

// --- JSON documents -------------------------------------------------------

Annotation read_annotation_file(const std::string& path);
void write_annotation_file(const std::string& path, const Annotation& ann);

DetectionDocument read_detection_file(const std::string& path);
void write_detection_file(const std::string& path, const DetectionDocument& det);

// Per-disk report mirroring the metric columns; the CSV batch format is
// `disk,P,R,F,mAR,ARAND` with 1-decimal percents and 3-decimal ratios.
std::string serialize_report(const MetricsReport& report, const std::string& disk);
MetricsReport parse_report(const std::string& json_text);
void write_report_file(const std::string& path, const MetricsReport& report,
                       const std::string& disk);

std::string format_csv_row(const std::string& disk, const MetricsReport& report);
void write_reports_csv(const std::string& path,
                       const std::vector<std::pair<std::string, MetricsReport>>& rows);

// --- Plain text -----------------------------------------------------------

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ringtrace
