#include <cmath>
#include <numbers>

#include "doctest.h"
#include "json.hpp"
#include "ringtrace/viz.hpp"
#include "test_support.hpp"

using namespace ringtrace;

namespace {

struct ColorCount {
    int green = 0;
    int red = 0;
    int white = 0;
    int blue = 0;
};

ColorCount count_colors(const ImageRGB& image) {
    ColorCount c;
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            const auto* p = image.px(x, y);
            if (p[0] == 0 && p[1] == 255 && p[2] == 0) ++c.green;
            if (p[0] == 255 && p[1] == 0 && p[2] == 0) ++c.red;
            if (p[0] == 255 && p[1] == 255 && p[2] == 255) ++c.white;
            if (p[0] == 0 && p[1] == 0 && p[2] == 255) ++c.blue;
        }
    }
    return c;
}

}  // namespace

TEST_CASE("an empty detection leaves only green strokes") {
    const ImageRGB base(160, 160, 30, 30, 30);
    DiskDetection gt;
    gt.pith = make_circle_curve({80.0, 80.0}, 15.0, 72);
    gt.rings.push_back(make_circle_curve({80.0, 80.0}, 50.0, 72));

    const auto out = overlay(base, gt, DiskDetection{});
    const auto colors = count_colors(out);
    CHECK(colors.green > 0);
    CHECK(colors.red == 0);
}

TEST_CASE("detections drawn last cover identical ground truth") {
    const ImageRGB base(160, 160, 30, 30, 30);
    DiskDetection gt;
    gt.pith = make_circle_curve({80.0, 80.0}, 15.0, 72);
    gt.rings.push_back(make_circle_curve({80.0, 80.0}, 50.0, 72));

    const auto out = overlay(base, gt, gt);
    const auto colors = count_colors(out);
    CHECK(colors.red > 0);
    CHECK(colors.green == 0);  // every green pixel was repainted red
}

TEST_CASE("stroke coverage of a circle matches its perimeter band") {
    const ImageRGB base(256, 256, 0, 0, 0);
    DiskDetection gt;
    gt.rings.push_back(make_circle_curve({128.0, 128.0}, 50.0, 360));

    const auto out = overlay(base, gt, DiskDetection{});
    const auto colors = count_colors(out);
    const double expected = 2.0 * 2.0 * std::numbers::pi * 50.0;  // 2 px stroke
    CHECK(colors.green > 0.8 * expected);
    CHECK(colors.green < 1.2 * expected);
}

TEST_CASE("a perfect assignment renders pure red bands") {
    DiskDetection gt;
    gt.pith = make_circle_curve({100.0, 100.0}, 10.0, 36);
    gt.rings.push_back(make_circle_curve({100.0, 100.0}, 40.0, 36));
    gt.rings.push_back(make_circle_curve({100.0, 100.0}, 70.0, 36));
    const auto assignment = assign_rings(gt, gt);

    const auto render = polar_error_map(assignment, gt, 200);
    CHECK(render.scale_max == 1.0);
    CHECK(render.matched == std::vector<bool>{true, true});
    const auto colors = count_colors(render.image);
    CHECK(colors.red > 0);
    CHECK(colors.white == 0);
    CHECK(colors.blue == 0);
}

TEST_CASE("an empty assignment renders every band white") {
    DiskDetection gt;
    gt.pith = make_circle_curve({100.0, 100.0}, 10.0, 36);
    gt.rings.push_back(make_circle_curve({100.0, 100.0}, 40.0, 36));
    gt.rings.push_back(make_circle_curve({100.0, 100.0}, 70.0, 36));
    AssignmentResult none;
    none.unmatched_gt = {0, 1};

    const auto render = polar_error_map(none, gt, 200);
    CHECK(render.matched == std::vector<bool>{false, false});
    const auto colors = count_colors(render.image);
    CHECK(colors.white > 0);
    CHECK(colors.red == 0);
    CHECK(colors.blue == 0);
}

TEST_CASE("half-perfect rays split the band into red and blue halves") {
    DiskDetection gt;
    gt.pith = make_circle_curve({100.0, 100.0}, 10.0, 8);
    gt.rings.push_back(make_circle_curve({100.0, 100.0}, 50.0, 8));

    AssignmentResult assignment;
    RingMatch match;
    match.gt_index = 0;
    match.det_index = 0;
    match.errors = {0.0, 0.0, 0.0, 0.0, 6.0, 6.0, 6.0, 6.0};  // rays 0-3 perfect
    assignment.pairs.push_back(match);

    const auto render = polar_error_map(assignment, gt, 240);
    CHECK(render.scale_max == doctest::Approx(6.0));
    CHECK(render.ring_mean_error[0] == doctest::Approx(3.0));

    //

    // Band 0 spans radii [band, 2*band) = [57.6, 115.2); probe at angle 0
    // (ray 0, zero error) and angle pi (ray 4, max error).
    const auto* right = render.image.px(120 + 80, 120);
    CHECK(right[0] == 255);
    CHECK(right[2] == 0);
    const auto* left = render.image.px(120 - 80, 120);
    CHECK(left[0] == 0);
    CHECK(left[2] == 255);

    const auto colors = count_colors(render.image);
    CHECK(colors.red > 0);
    CHECK(colors.blue > 0);
    CHECK(colors.white == 0);
}

TEST_CASE("the color ramp is monotone in the error") {
    DiskDetection gt;
    gt.pith = make_circle_curve({100.0, 100.0}, 10.0, 16);
    gt.rings.push_back(make_circle_curve({100.0, 100.0}, 50.0, 16));

    AssignmentResult assignment;
    RingMatch match;
    match.gt_index = 0;
    match.det_index = 0;
    for (int j = 0; j < 16; ++j) match.errors.push_back(j);  // 0..15 px
    assignment.pairs.push_back(match);

    const auto render = polar_error_map(assignment, gt, 300);
    // Walk the band along increasing ray error and check redness never grows.
    const double band = 0.48 * 300 / 2.0;
    const double radius = band * 1.5;
    int prev_red = 256;
    for (int j = 0; j < 16; ++j) {
        const double angle = 2 * std::numbers::pi * j / 16;
        const int x = static_cast<int>(std::floor(150.0 + radius * std::cos(angle)));
        const int y = static_cast<int>(std::floor(150.0 + radius * std::sin(angle)));
        const auto* p = render.image.px(x, y);
        CAPTURE(j);
        CHECK(p[0] <= prev_red);
        prev_red = p[0];
    }
}

TEST_CASE("the sidecar JSON carries the scale and per-ring errors") {
    DiskDetection gt;
    gt.pith = make_circle_curve({100.0, 100.0}, 10.0, 8);
    gt.rings.push_back(make_circle_curve({100.0, 100.0}, 40.0, 8));
    gt.rings.push_back(make_circle_curve({100.0, 100.0}, 70.0, 8));

    AssignmentResult assignment;
    RingMatch match;
    match.gt_index = 1;
    match.det_index = 0;
    match.errors.assign(8, 2.5);
    assignment.pairs.push_back(match);
    assignment.unmatched_gt = {0};

    const auto render = polar_error_map(assignment, gt, 100);
    const auto doc = nlohmann::json::parse(serialize_error_map_info(render));
    CHECK(doc["scale_max"].get<double>() == doctest::Approx(2.5));
    REQUIRE(doc["ring_mean_error"].size() == 2);
    CHECK(doc["ring_mean_error"][0].get<double>() == 0.0);
    CHECK(doc["ring_mean_error"][1].get<double>() == doctest::Approx(2.5));
    CHECK(doc["matched"][0].get<bool>() == false);
    CHECK(doc["matched"][1].get<bool>() == true);
}
