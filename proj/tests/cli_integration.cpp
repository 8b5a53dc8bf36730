// End-to-end exercise of the command-line binary (path given as argv[1]):
// the synth -> convert -> resize -> trace -> eval -> viz workflow on a real
// scratch directory, plus exit codes, help text, stream discipline, and
// determinism. Library readers verify the files the binary writes.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ringtrace/annotations.hpp"
#include "ringtrace/io.hpp"
#include "ringtrace/metrics.hpp"
#include "ringtrace/types.hpp"

namespace fs = std::filesystem;
using namespace ringtrace;

namespace {

int failures = 0;

void check(bool ok, const std::string& label) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << label << "\n";
    if (!ok)
        ++failures;
}

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string g_binary;
fs::path g_scratch;

std::string slurp_or_empty(const fs::path& p) {
    std::error_code ec;
    if (!fs::exists(p, ec))
        return {};
    return read_text_file(p.string());
}

RunResult run(const std::string& args) {
    const fs::path out_file = g_scratch / "stdout.txt";
    const fs::path err_file = g_scratch / "stderr.txt";
    const std::string cmd =
        g_binary + " " + args + " >" + out_file.string() + " 2>" + err_file.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp_or_empty(out_file);
    r.err = slurp_or_empty(err_file);
    return r;
}

std::string path(const std::string& rel) { return (g_scratch / rel).string(); }

bool file_exists(const std::string& rel) {
    std::error_code ec;
    return fs::exists(g_scratch / rel, ec);
}

bool same_bytes(const std::string& rel_a, const std::string& rel_b) {
    return read_text_file(path(rel_a)) == read_text_file(path(rel_b));
}

// --- workflow -------------------------------------------------------------

void test_workflow() {
    RunResult r = run("synth --out " + path("disks") +
                      " --rings 5 --size 400 --seed 7 --noise 0.02 --ecc 0.1");
    check(r.code == 0, "synth exits 0");
    check(r.out.empty(), "synth writes nothing to stdout");
    check(file_exists("disks/synthetic-7.png") && file_exists("disks/synthetic-7.mask.png") &&
              file_exists("disks/synthetic-7.json"),
          "synth writes the image/mask/annotation triple");

    r = run("convert --ann " + path("disks/synthetic-7.json") + " --mask " +
            path("disks/synthetic-7.mask.png") + " --out " + path("labels"));
    check(r.code == 0, "convert exits 0");
    const ClassMap classes = read_classmap_png(path("labels/synthetic-7.classmap.png"));
    const InstanceMap instances = read_instancemap_png(path("labels/synthetic-7.instancemap.png"));
    bool class_values_ok = true;
    for (const auto v : classes.data)
        class_values_ok = class_values_ok && v <= 3;
    check(class_values_ok, "convert classmap holds only class values 0..3");
    check(instances.max_id() == 6, "convert instancemap ids reach pith + 5 bands");

    r = run("resize --in " + path("disks/synthetic-7.png") + " --target 300 --out " +
            path("small/synthetic-7.png") + " --ann " + path("disks/synthetic-7.json"));
    check(r.code == 0, "resize exits 0");
    const ImageRGB small = read_image_png(path("small/synthetic-7.png"));
    check(small.width == 300 && small.height == 300, "resize hits the target dimensions");
    const Annotation scaled = read_annotation_file(path("small/synthetic-7.json"));
    check(scaled.width == 300 && scaled.height == 300, "resize scales the annotation header");

    r = run("trace --image " + path("disks/synthetic-7.png") + " --pith " +
            path("disks/synthetic-7.json") + " --mask " + path("disks/synthetic-7.mask.png") +
            " --scorer gradient --out " + path("det/synthetic-7.det.json"));
    check(r.code == 0, "trace exits 0");
    check(r.out.empty(), "trace writes nothing to stdout");
    const DetectionDocument det = read_detection_file(path("det/synthetic-7.det.json"));
    check(det.geometry.rings.size() == 5, "trace finds all five rings");
    check(det.confidence.size() == 5, "trace records one confidence per ring");

    r = run("eval --det " + path("det/synthetic-7.det.json") + " --gt " +
            path("disks/synthetic-7.json") + " --mask " + path("disks/synthetic-7.mask.png") +
            " --out " + path("report.json") + " --csv " + path("report.csv"));
    check(r.code == 0, "eval exits 0");
    const MetricsReport report = parse_report(read_text_file(path("report.json")));
    check(report.fscore == 100.0 && report.tp == 5, "eval scores the gradient trace perfect");
    const std::string csv = read_text_file(path("report.csv"));
    check(csv.rfind("disk,P,R,F,mAR,ARAND\n", 0) == 0, "eval CSV starts with the header");
    check(csv.find("synthetic-7,100.0,100.0,100.0,") != std::string::npos,
          "eval CSV row carries the rounded percentages");

    r = run("viz --image " + path("disks/synthetic-7.png") + " --det " +
            path("det/synthetic-7.det.json") + " --gt " + path("disks/synthetic-7.json") +
            " --out " + path("viz"));
    check(r.code == 0, "viz exits 0");
    check(file_exists("viz/synthetic-7.overlay.png") && file_exists("viz/synthetic-7.errmap.png"),
          "viz writes overlay and error map");
    const std::string sidecar = read_text_file(path("viz/synthetic-7.errmap.json"));
    check(sidecar.find("\"scale_max\"") != std::string::npos &&
              sidecar.find("\"ring_mean_error\"") != std::string::npos,
          "viz sidecar carries the color scale");
}

// The ground-truth annotation doubles as a detection document (confidence is
// optional), so evaluating it against itself must come out exact.
void test_eval_identity() {
    const RunResult r =
        run("eval --det " + path("disks/synthetic-7.json") + " --gt " +
            path("disks/synthetic-7.json") + " --mask " + path("disks/synthetic-7.mask.png") +
            " --out " + path("identity.json"));
    check(r.code == 0, "identity eval exits 0");
    const MetricsReport report = parse_report(read_text_file(path("identity.json")));
    check(report.fscore == 100.0, "identity eval F = 100.0");
    check(report.arand == 0.0, "identity eval ARAND = 0.000");
    check(report.mar == 1.0, "identity eval mAR = 1.000");
}

// One-hot probability maps derived from the ground-truth class map drive the
// map scorer to the same five rings.
void test_maps_scorer() {
    const ClassMap classes = read_classmap_png(path("labels/synthetic-7.classmap.png"));
    ProbabilityMaps maps(classes.width, classes.height);
    for (int y = 0; y < classes.height; ++y)
        for (int x = 0; x < classes.width; ++x)
            maps.set(classes.at(x, y), x, y, 1.0f);
    write_probability_maps(path("labels/synthetic-7"), maps);

    const RunResult r =
        run("trace --image " + path("disks/synthetic-7.png") + " --pith " +
            path("disks/synthetic-7.json") + " --mask " + path("disks/synthetic-7.mask.png") +
            " --scorer maps --maps " + path("labels/synthetic-7") + " --out " +
            path("det/synthetic-7-maps.det.json"));
    check(r.code == 0, "maps trace exits 0");
    const DetectionDocument det = read_detection_file(path("det/synthetic-7-maps.det.json"));
    check(det.geometry.rings.size() == 5, "maps trace finds all five rings");

    const RunResult e = run("eval --det " + path("det/synthetic-7-maps.det.json") + " --gt " +
                            path("disks/synthetic-7.json") + " --mask " +
                            path("disks/synthetic-7.mask.png") + " --out " + path("maps.json"));
    check(e.code == 0, "maps eval exits 0");
    const MetricsReport report = parse_report(read_text_file(path("maps.json")));
    check(report.fscore >= 99.0, "maps trace scores F >= 99");
}

void test_loss_command() {
    const RunResult r = run("loss --pred " + path("labels/synthetic-7") + " --gt " +
                            path("labels/synthetic-7.classmap.png"));
    check(r.code == 0, "loss exits 0");
    double value = 1.0;
    check(static_cast<bool>(std::istringstream(r.out) >> value), "loss prints a number");
    check(value >= 0.0 && value <= 1e-5, "one-hot maps against their own class map cost ~0");

    const RunResult w = run("loss --pred " + path("labels/synthetic-7") + " --gt " +
                            path("labels/synthetic-7.classmap.png") + " --weights 1,1,1");
    double reweighted = -1.0;
    std::istringstream(w.out) >> reweighted;
    check(w.code == 0 && reweighted >= 0.0, "loss accepts custom weights");

    const RunResult bad = run("loss --pred " + path("labels/synthetic-7") + " --gt " +
                              path("labels/synthetic-7.classmap.png") + " --weights 1,2");
    check(bad.code == 3, "malformed --weights exits 3");
}

void test_directory_mode() {
    for (const int seed : {11, 12, 13})
        run("synth --out " + path("batch") + " --rings 4 --size 300 --seed " +
            std::to_string(seed) + " --noise 0.01");
    RunResult r = run("trace --image " + path("batch") + " --pith " + path("batch") +
                      " --mask " + path("batch") + " --scorer gradient --out " +
                      path("batch_det") + " --jobs 3");
    check(r.code == 0, "directory trace exits 0");
    check(file_exists("batch_det/synthetic-11.det.json") &&
              file_exists("batch_det/synthetic-12.det.json") &&
              file_exists("batch_det/synthetic-13.det.json"),
          "directory trace writes one detection per disk");

    r = run("trace --image " + path("batch") + " --pith " + path("batch") + " --mask " +
            path("batch") + " --scorer gradient --out " + path("batch_det_seq") + " --jobs 1");
    check(r.code == 0, "sequential directory trace exits 0");
    bool identical = true;
    for (const int seed : {11, 12, 13}) {
        const std::string name = "synthetic-" + std::to_string(seed) + ".det.json";
        identical = identical && same_bytes("batch_det/" + name, "batch_det_seq/" + name);
    }
    check(identical, "--jobs 3 and --jobs 1 write identical detections");

    r = run("eval --det " + path("batch_det") + " --gt " + path("batch") + " --mask " +
            path("batch") + " --out " + path("batch_reports") + " --csv " +
            path("batch.csv") + " --jobs 2");
    check(r.code == 0, "directory eval exits 0");
    const std::string csv = read_text_file(path("batch.csv"));
    check(csv.find("synthetic-11,") != std::string::npos &&
              csv.find("synthetic-12,") != std::string::npos &&
              csv.find("synthetic-13,") != std::string::npos,
          "directory eval CSV carries one row per disk");
}

void test_exit_codes() {
    RunResult r = run("");
    check(r.code == 2, "no subcommand exits 2");
    r = run("trace --image x.png");
    check(r.code == 2 && !r.err.empty(), "missing required flags exit 2 with a message");
    r = run("trace --image a --pith b --mask c --scorer sobel --out d");
    check(r.code == 2, "unknown scorer exits 2");
    r = run("synth --out " + path("bad") + " --rings 0");
    check(r.code == 3, "invalid config exits 3");
    r = run("eval --det " + path("missing.det.json") + " --gt " + path("disks/synthetic-7.json") +
            " --mask " + path("disks/synthetic-7.mask.png") + " --out " + path("x.json"));
    check(r.code == 4 && !r.err.empty(), "missing input file exits 4 with a message");
    write_text_file(path("garbage.json"), "{]");
    r = run("eval --det " + path("garbage.json") + " --gt " + path("disks/synthetic-7.json") +
            " --mask " + path("disks/synthetic-7.mask.png") + " --out " + path("x.json"));
    check(r.code == 3, "unparseable JSON exits 3");
}

void test_help() {
    RunResult r = run("--help");
    check(r.code == 0, "--help exits 0");
    for (const char* sub : {"synth", "convert", "resize", "trace", "eval", "loss", "viz"})
        check(r.out.find(sub) != std::string::npos, std::string("--help lists ") + sub);
    r = run("loss --help");
    check(r.out.find("0.01,1.0,0.1") != std::string::npos,
          "loss --help shows the default weights verbatim");
    r = run("trace --help");
    check(r.out.find("--stop-frac") != std::string::npos &&
              r.out.find("[0.5]") != std::string::npos,
          "trace --help documents flags with defaults");
}

void test_determinism() {
    run("synth --out " + path("again") + " --rings 5 --size 400 --seed 7 --noise 0.02 --ecc 0.1");
    check(same_bytes("again/synthetic-7.png", "disks/synthetic-7.png") &&
              same_bytes("again/synthetic-7.json", "disks/synthetic-7.json"),
          "repeated synth is byte-identical");
    run("trace --image " + path("disks/synthetic-7.png") + " --pith " +
        path("disks/synthetic-7.json") + " --mask " + path("disks/synthetic-7.mask.png") +
        " --scorer gradient --out " + path("det/again.det.json"));
    check(same_bytes("det/again.det.json", "det/synthetic-7.det.json"),
          "repeated trace is byte-identical");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_integration <path-to-binary>\n";
        return 1;
    }
    g_binary = argv[1];
    g_scratch = fs::temp_directory_path() / "ringtrace-cli-test";
    std::error_code ec;
    fs::remove_all(g_scratch, ec);
    fs::create_directories(g_scratch);

    test_workflow();
    test_eval_identity();
    test_maps_scorer();
    test_loss_command();
    test_directory_mode();
    test_exit_codes();
    test_help();
    test_determinism();

    if (failures == 0) {
        std::cout << "cli_integration: all checks passed\n";
        return 0;
    }
    std::cout << "cli_integration: " << failures << " check(s) FAILED\n";
    return 1;
}
