#include <random>

#include "doctest.h"
#include "ringtrace/geometry.hpp"
#include "ringtrace/io.hpp"
#include "test_support.hpp"

using namespace ringtrace;
using test_support::ScratchDir;

TEST_CASE("rgb png round trip is lossless") {
    ScratchDir dir;
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> byte(0, 255);
    ImageRGB img(37, 23);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(byte(rng));
    const std::string path = dir.file("img.png");
    write_image_png(path, img);
    const ImageRGB back = read_image_png(path);
    CHECK(back.width == img.width);
    CHECK(back.height == img.height);
    CHECK(back.data == img.data);
}

TEST_CASE("grayscale pngs read back as rgb images") {
    ScratchDir dir;
    Mask mask(16, 16, false);
    for (int i = 0; i < 16; ++i) mask.set(i, i, true);
    const std::string path = dir.file("gray.png");
    write_mask_png(path, mask);
    const ImageRGB img = read_image_png(path);
    CHECK(img.width == 16);
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) {
            const auto* p = img.px(x, y);
            CHECK(p[0] == p[1]);
            CHECK(p[1] == p[2]);
            CHECK(p[0] == (x == y ? 255 : 0));
        }
    }
}

TEST_CASE("mask png round trip") {
    ScratchDir dir;
    std::mt19937_64 rng(43);
    std::bernoulli_distribution coin(0.4);
    Mask mask(29, 31);
    for (auto& v : mask.data) v = coin(rng) ? 1 : 0;
    const std::string path = dir.file("mask.png");
    write_mask_png(path, mask);
    const Mask back = read_mask_png(path);
    CHECK(back.data == mask.data);
}

TEST_CASE("classmap png round trip and value validation") {
    ScratchDir dir;
    std::mt19937_64 rng(47);
    std::uniform_int_distribution<int> label(0, 3);
    ClassMap map(21, 17);
    for (auto& v : map.data) v = static_cast<std::uint8_t>(label(rng));
    const std::string path = dir.file("cls.png");
    write_classmap_png(path, map);
    const ClassMap back = read_classmap_png(path);
    CHECK(back.data == map.data);

    ClassMap bad(4, 4);
    bad.data[5] = 7;  // outside the label alphabet
    const std::string bad_path = dir.file("bad.png");
    write_classmap_png(bad_path, bad);
    CHECK_THROWS_AS(read_classmap_png(bad_path), ValidationError);
}

TEST_CASE("instance map 16-bit png round trip keeps large ids") {
    ScratchDir dir;
    InstanceMap map(9, 5);
    std::uint16_t next = 0;
    for (auto& v : map.data) v = next += 1543;  // crosses the 255 boundary
    map.data[0] = 65535;
    map.data[1] = 256;
    map.data[2] = 255;
    const std::string path = dir.file("inst.png");
    write_instancemap_png(path, map);
    const InstanceMap back = read_instancemap_png(path);
    CHECK(back.data == map.data);
}

TEST_CASE("probability maps round trip within quantization error") {
    ScratchDir dir;
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ProbabilityMaps maps;
    maps.width = 13;
    maps.height = 11;
    const std::size_t n = 13 * 11;
    for (int cls = 0; cls < 4; ++cls) maps.prob[cls].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double raw[4];
        double sum = 0;
        for (double& r : raw) sum += r = u(rng) + 1e-3;
        for (int cls = 0; cls < 4; ++cls) {
            maps.prob[cls][i] = static_cast<float>(raw[cls] / sum);
        }
    }
    const std::string stem = dir.file("prob");
    write_probability_maps(stem, maps);
    const ProbabilityMaps back = read_probability_maps(stem);
    CHECK(back.width == maps.width);
    CHECK(back.height == maps.height);
    validate_probability_maps(back);  // renormalized on load
    for (int cls = 0; cls < 4; ++cls) {
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(back.prob[cls][i] - maps.prob[cls][i]) < 2.0 / 65535 + 1e-6);
        }
    }
}

TEST_CASE("probability maps failing the unit-sum check are rejected") {
    ScratchDir dir;
    ProbabilityMaps maps;
    maps.width = 4;
    maps.height = 4;
    for (int cls = 0; cls < 4; ++cls) maps.prob[cls].assign(16, 0.5f);  // sums to 2
    const std::string stem = dir.file("bad");
    write_probability_maps(stem, maps);
    CHECK_THROWS_AS(read_probability_maps(stem), ValidationError);
}

TEST_CASE("missing and corrupt files raise io errors") {
    ScratchDir dir;
    CHECK_THROWS_AS(read_image_png(dir.file("absent.png")), IoError);
    CHECK_THROWS_AS(read_text_file(dir.file("absent.json")), IoError);
    write_text_file(dir.file("fake.png"), "this is not a png");
    CHECK_THROWS_AS(read_image_png(dir.file("fake.png")), IoError);
    write_text_file(dir.file("trunc.png"), std::string("\x89PNG\r\n\x1a\n garbage", 17));
    CHECK_THROWS_AS(read_image_png(dir.file("trunc.png")), IoError);
}

TEST_CASE("annotation files round trip") {
    ScratchDir dir;
    Annotation ann;
    ann.image = "roundtrip";
    ann.width = 120;
    ann.height = 90;
    ann.pith = polygon_from_curve(make_circle_curve({60.5, 45.25}, 5, 16));
    ann.rings = {polygon_from_curve(make_circle_curve({60, 45}, 20, 32)),
                 polygon_from_curve(make_circle_curve({60, 45}, 35, 32))};
    const std::string path = dir.file("ann.json");
    write_annotation_file(path, ann);
    const Annotation back = read_annotation_file(path);
    CHECK(back.image == ann.image);
    REQUIRE(back.rings.size() == 2);
    CHECK(back.rings[1][7].x == ann.rings[1][7].x);
    CHECK(back.rings[1][7].y == ann.rings[1][7].y);
}

TEST_CASE("detection files round trip with confidence") {
    ScratchDir dir;
    DiskDetection det;
    det.pith = make_circle_curve({64, 64}, 7, 24);
    det.rings = {make_circle_curve({64, 64}, 20, 24), make_circle_curve({64, 64}, 40, 24)};
    det.confidence = {0.25, 0.875};
    const DetectionDocument doc = detection_to_document(det, "disk", 128, 128);
    const std::string path = dir.file("det.json");
    write_detection_file(path, doc);
    const DetectionDocument back = read_detection_file(path);
    REQUIRE(back.confidence.size() == 2);
    CHECK(back.confidence[0] == 0.25);
    CHECK(back.confidence[1] == 0.875);
    CHECK(back.geometry.rings.size() == 2);
}

TEST_CASE("report json and csv formatting") {
    MetricsReport report;
    report.precision = 91.3;
    report.recall = 95.5;
    report.fscore = 93.3;
    report.mar = 0.805;
    report.arand = 0.069;
    report.tp = 21;
    report.fp = 2;
    report.fn = 1;

    const std::string json = serialize_report(report, "F07d");
    const MetricsReport back = parse_report(json);
    CHECK(back.precision == report.precision);
    CHECK(back.mar == report.mar);
    CHECK(back.tp == 21);

    CHECK(format_csv_row("F07d", report) == "F07d,91.3,95.5,93.3,0.805,0.069");

    ScratchDir dir;
    const std::string csv_path = dir.file("batch.csv");
    write_reports_csv(csv_path, {{"F07d", report}});
    CHECK(read_text_file(csv_path) == "disk,P,R,F,mAR,ARAND\nF07d,91.3,95.5,93.3,0.805,0.069\n");
}
