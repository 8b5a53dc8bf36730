#include "ringtrace/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "ringtrace/geometry.hpp"

namespace ringtrace {

namespace {

using nlohmann::ordered_json;

// Drops consecutive duplicates, including a closing vertex that repeats the
// first one.
std::vector<Vec2> dedup_polygon(std::vector<Vec2> poly) {
    std::vector<Vec2> out;
    for (const Vec2& v : poly) {
        if (!out.empty() && out.back().x == v.x && out.back().y == v.y) continue;
        out.push_back(v);
    }
    while (out.size() > 1 && out.front().x == out.back().x && out.front().y == out.back().y) {
        out.pop_back();
    }
    return out;
}

std::vector<Vec2> parse_polygon(const ordered_json& node, const std::string& field) {
    if (!node.is_array()) {
        throw ValidationError("annotation: field \"" + field + "\" must be an array of points");
    }
    std::vector<Vec2> poly;
    for (const auto& pt : node) {
        if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
            throw ValidationError("annotation: field \"" + field +
                                  "\" must contain [x, y] number pairs");
        }
        const double x = pt[0].get<double>();
        const double y = pt[1].get<double>();
        if (!std::isfinite(x) || !std::isfinite(y)) {
            throw ValidationError("annotation: field \"" + field +
                                  "\" contains non-finite coordinates");
        }
        poly.push_back({x, y});
    }
    poly = dedup_polygon(std::move(poly));
    if (poly.size() < 3) {
        throw ValidationError("annotation: field \"" + field +
                              "\" needs at least 3 distinct vertices");
    }
    return poly;
}

int parse_dimension(const ordered_json& doc, const char* field) {
    if (!doc.contains(field)) {
        throw ValidationError(std::string("annotation: missing field \"") + field + "\"");
    }
    const auto& node = doc.at(field);
    if (!node.is_number_integer() || node.get<long long>() < 1) {
        throw ValidationError(std::string("annotation: field \"") + field +
                              "\" must be a positive integer");
    }
    return node.get<int>();
}

ordered_json parse_document(const std::string& json_text) {
    try {
        return ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("annotation: invalid JSON: ") + e.what());
    }
}

Annotation parse_geometry(const ordered_json& doc) {
    if (!doc.is_object()) throw ValidationError("annotation: document must be a JSON object");
    Annotation ann;
    if (!doc.contains("image")) throw ValidationError("annotation: missing field \"image\"");
    if (!doc.at("image").is_string()) {
        throw ValidationError("annotation: field \"image\" must be a string");
    }
    ann.image = doc.at("image").get<std::string>();
    ann.width = parse_dimension(doc, "width");
    ann.height = parse_dimension(doc, "height");
    if (!doc.contains("pith")) throw ValidationError("annotation: missing field \"pith\"");
    ann.pith = parse_polygon(doc.at("pith"), "pith");
    if (!doc.contains("rings")) throw ValidationError("annotation: missing field \"rings\"");
    if (!doc.at("rings").is_array()) {
        throw ValidationError("annotation: field \"rings\" must be an array of polygons");
    }
    std::size_t index = 0;
    for (const auto& ring : doc.at("rings")) {
        ann.rings.push_back(parse_polygon(ring, "rings[" + std::to_string(index) + "]"));
        ++index;
    }
    return ann;
}

// Sorts rings by enclosed area ascending, carrying a parallel payload (the
// detection confidence) through the same permutation.
void sort_rings_by_area(std::vector<std::vector<Vec2>>& rings, std::vector<double>* payload) {
    std::vector<std::size_t> order(rings.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> areas(rings.size());
    for (std::size_t i = 0; i < rings.size(); ++i) areas[i] = polygon_area(rings[i]);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return areas[a] < areas[b]; });
    std::vector<std::vector<Vec2>> sorted_rings;
    sorted_rings.reserve(rings.size());
    for (std::size_t i : order) sorted_rings.push_back(std::move(rings[i]));
    rings = std::move(sorted_rings);
    if (payload && !payload->empty()) {
        std::vector<double> sorted_payload;
        sorted_payload.reserve(payload->size());
        for (std::size_t i : order) sorted_payload.push_back((*payload)[i]);
        *payload = std::move(sorted_payload);
    }
}

ordered_json polygon_to_json(const std::vector<Vec2>& poly) {
    ordered_json arr = ordered_json::array();
    for (const Vec2& v : poly) arr.push_back(ordered_json::array({v.x, v.y}));
    return arr;
}

ordered_json geometry_to_json(const Annotation& ann) {
    ordered_json doc;
    doc["image"] = ann.image;
    doc["width"] = ann.width;
    doc["height"] = ann.height;
    doc["pith"] = polygon_to_json(ann.pith);
    ordered_json rings = ordered_json::array();
    for (const auto& ring : ann.rings) rings.push_back(polygon_to_json(ring));
    doc["rings"] = rings;
    return doc;
}

}  // namespace

Annotation ingest_annotation(const std::string& json_text) {
    Annotation ann = parse_geometry(parse_document(json_text));
    sort_rings_by_area(ann.rings, nullptr);
    return ann;
}

std::string serialize_annotation(const Annotation& ann) {
    return geometry_to_json(ann).dump(2) + "\n";
}

DetectionDocument ingest_detection(const std::string& json_text) {
    const ordered_json doc = parse_document(json_text);
    DetectionDocument det;
    det.geometry = parse_geometry(doc);
    if (doc.contains("confidence")) {
        const auto& node = doc.at("confidence");
        if (!node.is_array()) {
            throw ValidationError("annotation: field \"confidence\" must be an array");
        }
        for (const auto& v : node) {
            if (!v.is_number()) {
                throw ValidationError("annotation: field \"confidence\" must contain numbers");
            }
            det.confidence.push_back(v.get<double>());
        }
        if (det.confidence.size() != det.geometry.rings.size()) {
            throw ValidationError(
                "annotation: field \"confidence\" must have one value per ring");
        }
    }
    sort_rings_by_area(det.geometry.rings, &det.confidence);
    return det;
}

std::string serialize_detection(const DetectionDocument& det) {
    ordered_json doc = geometry_to_json(det.geometry);
    if (!det.confidence.empty()) {
        if (det.confidence.size() != det.geometry.rings.size()) {
            throw ValidationError("detection: confidence must have one value per ring");
        }
        doc["confidence"] = det.confidence;
    }
    return doc.dump(2) + "\n";
}

DetectionDocument detection_to_document(const DiskDetection& det, const std::string& image,
                                        int width, int height) {
    DetectionDocument doc;
    doc.geometry.image = image;
    doc.geometry.width = width;
    doc.geometry.height = height;
    doc.geometry.pith = polygon_from_curve(det.pith);
    for (const RingCurve& ring : det.rings) {
        doc.geometry.rings.push_back(polygon_from_curve(ring));
    }
    doc.confidence = det.confidence;
    return doc;
}

DiskDetection document_to_detection(const DetectionDocument& doc, const Vec2& origin,
                                    int theta) {
    if (theta < 8) throw ValidationError("detection curves need at least 8 rays");
    DiskDetection det;
    det.pith = curve_from_polygon(doc.geometry.pith, origin, theta);
    for (const auto& ring : doc.geometry.rings) {
        det.rings.push_back(curve_from_polygon(ring, origin, theta));
    }
    det.confidence = doc.confidence;
    return det;
}

Vec2 polygon_vertex_mean(const std::vector<Vec2>& poly) {
    if (poly.empty()) throw ValidationError("cannot average an empty polygon");
    Vec2 sum{0, 0};
    for (const Vec2& v : poly) sum = sum + v;
    return sum * (1.0 / static_cast<double>(poly.size()));
}

Annotation scale_annotation(const Annotation& ann, double factor) {
    if (!(factor > 0) || !std::isfinite(factor)) {
        throw ValidationError("scale factor must be positive and finite");
    }
    Annotation out = ann;
    out.width = std::max(1, static_cast<int>(std::round(ann.width * factor)));
    out.height = std::max(1, static_cast<int>(std::round(ann.height * factor)));
    for (Vec2& v : out.pith) v = v * factor;
    for (auto& ring : out.rings) {
        for (Vec2& v : ring) v = v * factor;
    }
    return out;
}

ClassMap rasterize_classmap(const Annotation& ann, const Mask& mask, int boundary_width) {
    if (boundary_width < 1) throw ValidationError("boundary width must be >= 1");
    if (ann.width != mask.width || ann.height != mask.height) {
        throw ValidationError("annotation dimensions must match the mask");
    }
    const int w = ann.width;
    const int h = ann.height;
    ClassMap out(w, h, static_cast<std::uint8_t>(PixelClass::Background));

    // Everything inside the mask starts as ring tissue...
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (mask.at(x, y)) out.set(x, y, static_cast<std::uint8_t>(PixelClass::Ring));
        }
    }
    // ...the pith interior overrides ring...
    fill_polygon(ann.pith, w, h, [&](int x, int y) {
        if (mask.at(x, y)) out.set(x, y, static_cast<std::uint8_t>(PixelClass::Pith));
    });
    // ...and boundary strokes override everything inside the mask.
    for (const auto& ring : ann.rings) {
        stroke_polygon(ring, w, h, boundary_width / 2.0, [&](int x, int y) {
            if (mask.at(x, y)) out.set(x, y, static_cast<std::uint8_t>(PixelClass::Boundary));
        });
    }
    return out;
}

InstanceMap rasterize_instancemap(const Annotation& ann, const Mask& mask) {
    if (ann.width != mask.width || ann.height != mask.height) {
        throw ValidationError("annotation dimensions must match the mask");
    }
    // Nesting check: every polygon must contain all vertices of the one inside
    // it.
    const auto contains_all = [](const std::vector<Vec2>& outer,
                                 const std::vector<Vec2>& inner) {
        return std::all_of(inner.begin(), inner.end(),
                           [&](const Vec2& v) { return point_in_polygon(v, outer); });
    };
    if (!ann.rings.empty() && !contains_all(ann.rings.front(), ann.pith)) {
        throw ValidationError("rings are not nested: pith and ring 1");
    }
    for (std::size_t k = 1; k < ann.rings.size(); ++k) {
        if (!contains_all(ann.rings[k], ann.rings[k - 1])) {
            throw ValidationError("rings are not nested: ring " + std::to_string(k) +
                                  " and ring " + std::to_string(k + 1));
        }
    }

    const int w = ann.width;
    const int h = ann.height;
    InstanceMap out(w, h, 0);
    // Fill outermost first, inner fills overwrite: the band between ring k-1
    // and ring k keeps id k+1, the pith interior ends at id 1.
    for (std::size_t k = ann.rings.size(); k-- > 0;) {
        const auto id = static_cast<std::uint16_t>(k + 2);
        fill_polygon(ann.rings[k], w, h, [&](int x, int y) { out.set(x, y, id); });
    }
    fill_polygon(ann.pith, w, h, [&](int x, int y) { out.set(x, y, 1); });
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) out.set(x, y, 0);
        }
    }

    // Compact ids in case a degenerate band rasterized to nothing.
    const std::uint16_t top = out.max_id();
    std::vector<std::uint16_t> remap(static_cast<std::size_t>(top) + 1, 0);
    for (auto v : out.data) {
        if (v) remap[v] = 1;
    }
    std::uint16_t next = 0;
    for (std::size_t i = 1; i < remap.size(); ++i) {
        if (remap[i]) remap[i] = ++next;
    }
    for (auto& v : out.data) v = remap[v];
    return out;
}

}  // namespace ringtrace
