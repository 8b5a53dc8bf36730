// Command-line front end. Each subcommand wires files through the library;
// exceptions map to exit codes: 0 success, 2 usage, 3 validation, 4 I/O.
// Diagnostics go to stderr; machine output goes to files (or stdout for
// `loss`, which prints the scalar).

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "ringtrace/annotations.hpp"
#include "ringtrace/geometry.hpp"
#include "ringtrace/io.hpp"
#include "ringtrace/metrics.hpp"
#include "ringtrace/resample.hpp"
#include "ringtrace/scorer.hpp"
#include "ringtrace/synth.hpp"
#include "ringtrace/tracer.hpp"
#include "ringtrace/types.hpp"
#include "ringtrace/viz.hpp"

namespace fs = std::filesystem;
using namespace ringtrace;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitIo = 4;

// Disk name from a companion file: strips the extension plus the derived-file
// tag, so "oak-3.det.json", "oak-3.mask.png" and "oak-3.png" all give "oak-3".
std::string disk_stem(const std::string& path) {
    fs::path p = fs::path(path).filename();
    p.replace_extension();
    const std::string tag = p.extension().string();
    if (tag == ".det" || tag == ".mask" || tag == ".report" || tag == ".classmap" ||
        tag == ".instancemap")
        p.replace_extension();
    return p.string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void ensure_parent_dir(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty())
        ensure_dir(parent.string());
}

// A disk image is any .png that is not one of the derived rasters living next
// to it (mask, label maps, probability maps, visualization output).
bool is_disk_image(const std::string& name) {
    if (!name.ends_with(".png"))
        return false;
    for (const char* tag : {".mask.png", ".classmap.png", ".instancemap.png", ".bg.png",
                            ".ring.png", ".boundary.png", ".pith.png", ".overlay.png",
                            ".errmap.png"})
        if (name.ends_with(tag))
            return false;
    return true;
}

std::vector<std::string> list_disk_stems(const std::string& dir) {
    std::error_code ec;
    fs::directory_iterator it(dir, ec);
    if (ec)
        throw IoError("cannot list " + dir + ": " + ec.message());
    std::vector<std::string> stems;
    for (const auto& entry : it) {
        if (!entry.is_regular_file())
            continue;
        const std::string name = entry.path().filename().string();
        if (is_disk_image(name))
            stems.push_back(name.substr(0, name.size() - 4));
    }
    std::sort(stems.begin(), stems.end());
    return stems;
}

struct JobFailure {
    std::string item;
    std::string message;
    bool io = false;
};

// Runs fn over every item on `jobs` threads. Failures are collected rather
// than aborting the batch, so one bad disk does not hide the rest; the list
// comes back sorted by item for stable diagnostics.
std::vector<JobFailure> run_jobs(int jobs, const std::vector<std::string>& items,
                                 const std::function<void(const std::string&)>& fn) {
    std::vector<JobFailure> failures;
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
            try {
                fn(items[i]);
            } catch (const IoError& e) {
                const std::lock_guard<std::mutex> lock(mu);
                failures.push_back({items[i], e.what(), true});
            } catch (const std::exception& e) {
                const std::lock_guard<std::mutex> lock(mu);
                failures.push_back({items[i], e.what(), false});
            }
        }
    };
    const int n_threads = std::clamp<int>(jobs, 1, std::max<int>(1, items.size()));
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    std::sort(failures.begin(), failures.end(),
              [](const JobFailure& a, const JobFailure& b) { return a.item < b.item; });
    return failures;
}

int report_failures(const char* cmd, const std::vector<JobFailure>& failures) {
    if (failures.empty())
        return kExitOk;
    bool any_io = false;
    for (const auto& f : failures) {
        std::cerr << "ringtrace " << cmd << ": " << f.item << ": " << f.message << "\n";
        any_io = any_io || f.io;
    }
    return any_io ? kExitIo : kExitValidation;
}

// --- synth ----------------------------------------------------------------

struct SynthOpts {
    std::string out;
    int rings = 8;
    int size = 512;
    std::uint64_t seed = 1;
    double noise = 0.0;
    double ecc = 0.0;
};

int run_synth(const SynthOpts& opt) {
    SynthConfig cfg;
    cfg.size = opt.size;
    cfg.n_rings = opt.rings;
    cfg.eccentricity = opt.ecc;
    cfg.noise_sigma = opt.noise;
    cfg.seed = opt.seed;
    const SynthResult disk = generate_disk(cfg);
    ensure_dir(opt.out);
    const fs::path out(opt.out);
    const std::string& stem = disk.annotation.image;
    write_image_png((out / (stem + ".png")).string(), disk.image);
    write_mask_png((out / (stem + ".mask.png")).string(), disk.mask);
    write_annotation_file((out / (stem + ".json")).string(), disk.annotation);
    return kExitOk;
}

// --- convert --------------------------------------------------------------

struct ConvertOpts {
    std::string ann;
    std::string mask;
    std::string out;
    int boundary_width = 3;
};

int run_convert(const ConvertOpts& opt) {
    const Annotation ann = read_annotation_file(opt.ann);
    const Mask mask = read_mask_png(opt.mask);
    const ClassMap classes = rasterize_classmap(ann, mask, opt.boundary_width);
    const InstanceMap instances = rasterize_instancemap(ann, mask);
    ensure_dir(opt.out);
    const fs::path out(opt.out);
    const std::string stem = disk_stem(opt.ann);
    write_classmap_png((out / (stem + ".classmap.png")).string(), classes);
    write_instancemap_png((out / (stem + ".instancemap.png")).string(), instances);
    return kExitOk;
}

// --- resize ---------------------------------------------------------------

struct ResizeOpts {
    std::string in;
    std::string out;
    std::string ann;
    int target = 1500;
};

int run_resize(const ResizeOpts& opt) {
    const ImageRGB image = read_image_png(opt.in);
    ensure_parent_dir(opt.out);
    write_image_png(opt.out, resize_longest(image, opt.target));
    if (!opt.ann.empty()) {
        const Annotation ann = read_annotation_file(opt.ann);
        const int longest = std::max(image.width, image.height);
        const Annotation scaled =
            scale_annotation(ann, static_cast<double>(opt.target) / longest);
        // The scaled annotation lands next to the output image.
        fs::path ann_out(opt.out);
        ann_out.replace_extension(".json");
        write_annotation_file(ann_out.string(), scaled);
    }
    return kExitOk;
}

// --- trace ----------------------------------------------------------------

struct TraceOpts {
    std::string image;
    std::string pith;
    std::string mask;
    std::string scorer;
    std::string maps;
    std::string out;
    int theta = 360;
    double stop_frac = 0.5;
    double width_factor = 2.0;
    double floor_frac = 0.25;
    int jobs = 1;
};

void trace_one(const std::string& image_path, const std::string& ann_path,
               const std::string& mask_path, const std::string& maps_stem,
               const std::string& out_path, const TraceConfig& cfg, bool use_maps) {
    const ImageRGB image = read_image_png(image_path);
    const Annotation ann = read_annotation_file(ann_path);
    const Mask mask = read_mask_png(mask_path);
    const Vec2 origin = polygon_vertex_mean(ann.pith);
    const RingCurve pith = curve_from_polygon(ann.pith, origin, cfg.theta);
    DiskDetection det;
    if (use_maps) {
        const ProbabilityMaps maps = read_probability_maps(maps_stem);
        const MapScorer scorer(maps);
        det = trace_rings(image, pith, mask, scorer, cfg);
    } else {
        const GradientScorer scorer;
        det = trace_rings(image, pith, mask, scorer, cfg);
    }
    const DetectionDocument doc =
        detection_to_document(det, disk_stem(image_path), image.width, image.height);
    write_detection_file(out_path, doc);
}

int run_trace(const TraceOpts& opt) {
    TraceConfig cfg;
    cfg.theta = opt.theta;
    cfg.stop_fraction = opt.stop_frac;
    cfg.width_factor = opt.width_factor;
    cfg.floor_fraction = opt.floor_frac;
    validate_trace_config(cfg);
    const bool use_maps = opt.scorer == "maps";
    if (use_maps && opt.maps.empty())
        throw ValidationError("trace: --maps is required with --scorer maps");
    if (!fs::is_directory(opt.image)) {
        ensure_parent_dir(opt.out);
        trace_one(opt.image, opt.pith, opt.mask, opt.maps, opt.out, cfg, use_maps);
        return kExitOk;
    }
    // Directory mode: --pith/--mask/--maps/--out name directories and every
    // companion is looked up by stem (X.png, X.json, X.mask.png -> X.det.json).
    const std::vector<std::string> stems = list_disk_stems(opt.image);
    if (stems.empty())
        throw ValidationError("trace: no disk images in " + opt.image);
    ensure_dir(opt.out);
    const auto failures = run_jobs(opt.jobs, stems, [&](const std::string& stem) {
        trace_one((fs::path(opt.image) / (stem + ".png")).string(),
                  (fs::path(opt.pith) / (stem + ".json")).string(),
                  (fs::path(opt.mask) / (stem + ".mask.png")).string(),
                  use_maps ? (fs::path(opt.maps) / stem).string() : std::string(),
                  (fs::path(opt.out) / (stem + ".det.json")).string(), cfg, use_maps);
    });
    return report_failures("trace", failures);
}

// --- eval -----------------------------------------------------------------

struct EvalOpts {
    std::string det;
    std::string gt;
    std::string mask;
    std::string out;
    std::string csv;
    double close_frac = 0.6;
    double dist_frac = 0.5;
    bool exclude_pith = false;
    int jobs = 1;
};

MetricsReport eval_one(const std::string& det_path, const std::string& gt_path,
                       const std::string& mask_path, const std::string& out_path,
                       const EvalOpts& opt) {
    const DetectionDocument det = read_detection_file(det_path);
    const Annotation gt = read_annotation_file(gt_path);
    const Mask mask = read_mask_png(mask_path);
    const MetricsReport report =
        evaluate_detection(det, gt, mask, opt.close_frac, opt.dist_frac, opt.exclude_pith);
    write_report_file(out_path, report, disk_stem(det_path));
    return report;
}

int run_eval(const EvalOpts& opt) {
    if (!fs::is_directory(opt.det)) {
        ensure_parent_dir(opt.out);
        const MetricsReport report = eval_one(opt.det, opt.gt, opt.mask, opt.out, opt);
        if (!opt.csv.empty()) {
            ensure_parent_dir(opt.csv);
            write_reports_csv(opt.csv, {{disk_stem(opt.det), report}});
        }
        return kExitOk;
    }
    // Directory mode, paired by stem: X.det.json + X.json + X.mask.png ->
    // X.report.json. The CSV is only written when every disk evaluated, so a
    // partial batch never masquerades as a complete one.
    std::vector<std::string> stems;
    {
        std::error_code ec;
        fs::directory_iterator it(opt.det, ec);
        if (ec)
            throw IoError("cannot list " + opt.det + ": " + ec.message());
        for (const auto& entry : it) {
            const std::string name = entry.path().filename().string();
            if (entry.is_regular_file() && name.ends_with(".det.json"))
                stems.push_back(name.substr(0, name.size() - 9));
        }
    }
    std::sort(stems.begin(), stems.end());
    if (stems.empty())
        throw ValidationError("eval: no .det.json files in " + opt.det);
    ensure_dir(opt.out);
    std::vector<std::pair<std::string, MetricsReport>> rows;
    std::mutex rows_mu;
    const auto failures = run_jobs(opt.jobs, stems, [&](const std::string& stem) {
        const MetricsReport report =
            eval_one((fs::path(opt.det) / (stem + ".det.json")).string(),
                     (fs::path(opt.gt) / (stem + ".json")).string(),
                     (fs::path(opt.mask) / (stem + ".mask.png")).string(),
                     (fs::path(opt.out) / (stem + ".report.json")).string(), opt);
        const std::lock_guard<std::mutex> lock(rows_mu);
        rows.emplace_back(stem, report);
    });
    if (!opt.csv.empty() && failures.empty()) {
        std::sort(rows.begin(), rows.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        ensure_parent_dir(opt.csv);
        write_reports_csv(opt.csv, rows);
    }
    return report_failures("eval", failures);
}

// --- loss -----------------------------------------------------------------

struct LossOpts {
    std::string pred;
    std::string gt;
    std::string weights = "0.01,1.0,0.1";
};

LossWeights parse_weights(const std::string& text) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string part;
    try {
        while (std::getline(ss, part, ',')) {
            std::size_t used = 0;
            vals.push_back(std::stod(part, &used));
            if (used != part.size())
                throw std::invalid_argument(part);
        }
    } catch (const std::exception&) {
        vals.clear();
    }
    if (vals.size() != 3)
        throw ValidationError("loss: --weights expects three comma-separated numbers, got '" +
                              text + "'");
    return LossWeights{vals[0], vals[1], vals[2]};
}

int run_loss(const LossOpts& opt) {
    const LossWeights weights = parse_weights(opt.weights);
    const ProbabilityMaps pred = read_probability_maps(opt.pred);
    const ClassMap gt = read_classmap_png(opt.gt);
    std::printf("%.9g\n", segmentation_loss(pred, gt, weights));
    return kExitOk;
}

// --- viz ------------------------------------------------------------------

struct VizOpts {
    std::string image;
    std::string det;
    std::string gt;
    std::string out;
};

int run_viz(const VizOpts& opt) {
    const ImageRGB image = read_image_png(opt.image);
    const DetectionDocument det = read_detection_file(opt.det);
    const Annotation ann = read_annotation_file(opt.gt);
    const Vec2 origin = polygon_vertex_mean(ann.pith);
    const int theta = 360;
    const DiskDetection gt_curves = document_to_detection({ann, {}}, origin, theta);
    const DiskDetection det_curves = document_to_detection(det, origin, theta);
    const ImageRGB composite = overlay(image, gt_curves, det_curves);
    const AssignmentResult assignment = assign_rings(det_curves, gt_curves);
    const int canvas = std::max(64, std::min(image.width, image.height));
    const ErrorMapRender render = polar_error_map(assignment, gt_curves, canvas);
    ensure_dir(opt.out);
    const fs::path out(opt.out);
    const std::string stem = disk_stem(opt.image);
    write_image_png((out / (stem + ".overlay.png")).string(), composite);
    write_image_png((out / (stem + ".errmap.png")).string(), render.image);
    write_text_file((out / (stem + ".errmap.json")).string(), serialize_error_map_info(render));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tree-ring delineation toolkit: synthetic disks, boundary tracing, "
                 "evaluation, and visualization."};
    app.require_subcommand(1);

    SynthOpts synth_opts;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic disk triple "
                                                  "(image, mask, annotation).");
    synth_cmd->add_option("--out", synth_opts.out, "output directory")->required();
    synth_cmd->add_option("--rings", synth_opts.rings, "number of ring boundaries")
        ->capture_default_str();
    synth_cmd->add_option("--size", synth_opts.size, "image size in pixels")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth_opts.seed, "random seed")->capture_default_str();
    synth_cmd->add_option("--noise", synth_opts.noise, "noise sigma, fraction of full scale")
        ->capture_default_str();
    synth_cmd->add_option("--ecc", synth_opts.ecc, "ring center jitter, fraction of the gap")
        ->capture_default_str();

    ConvertOpts convert_opts;
    auto* convert_cmd = app.add_subcommand("convert", "Rasterize an annotation into class "
                                                      "and instance maps.");
    convert_cmd->add_option("--ann", convert_opts.ann, "annotation JSON")->required();
    convert_cmd->add_option("--mask", convert_opts.mask, "disk mask PNG")->required();
    convert_cmd->add_option("--out", convert_opts.out, "output directory")->required();
    convert_cmd
        ->add_option("--boundary-width", convert_opts.boundary_width,
                     "boundary band width in pixels")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    ResizeOpts resize_opts;
    auto* resize_cmd = app.add_subcommand("resize", "Lanczos-resize an image (and its "
                                                    "annotation) to a target longest side.");
    resize_cmd->add_option("--in", resize_opts.in, "input image PNG")->required();
    resize_cmd->add_option("--target", resize_opts.target, "longest output dimension")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    resize_cmd->add_option("--out", resize_opts.out, "output image PNG")->required();
    resize_cmd->add_option("--ann", resize_opts.ann,
                           "annotation JSON to scale alongside (written next to --out)");

    TraceOpts trace_opts;
    auto* trace_cmd = app.add_subcommand("trace", "Trace ring boundaries outward from the "
                                                  "pith; directories process every disk.");
    trace_cmd->add_option("--image", trace_opts.image, "disk image PNG, or a directory")
        ->required();
    trace_cmd->add_option("--pith", trace_opts.pith, "annotation JSON providing the pith")
        ->required();
    trace_cmd->add_option("--mask", trace_opts.mask, "disk mask PNG")->required();
    trace_cmd->add_option("--scorer", trace_opts.scorer, "boundary scorer")
        ->required()
        ->check(CLI::IsMember({"gradient", "maps"}));
    trace_cmd->add_option("--maps", trace_opts.maps,
                          "probability-map stem (<stem>.bg.png ...); required with "
                          "--scorer maps");
    trace_cmd->add_option("--out", trace_opts.out, "detection JSON output")->required();
    trace_cmd->add_option("--theta", trace_opts.theta, "rays per curve")
        ->capture_default_str();
    trace_cmd->add_option("--stop-frac", trace_opts.stop_frac,
                          "background vote fraction that stops the trace")
        ->capture_default_str();
    trace_cmd->add_option("--width-factor", trace_opts.width_factor,
                          "strip width as a multiple of the previous ring width")
        ->capture_default_str();
    trace_cmd->add_option("--floor-frac", trace_opts.floor_frac,
                          "fallback strip width as a fraction of the image")
        ->capture_default_str();
    trace_cmd->add_option("--jobs", trace_opts.jobs, "worker threads in directory mode")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    EvalOpts eval_opts;
    auto* eval_cmd = app.add_subcommand("eval", "Score a detection against ground truth; "
                                                "directories evaluate every disk.");
    eval_cmd->add_option("--det", eval_opts.det, "detection JSON, or a directory")->required();
    eval_cmd->add_option("--gt", eval_opts.gt, "ground-truth annotation JSON")->required();
    eval_cmd->add_option("--mask", eval_opts.mask, "disk mask PNG")->required();
    eval_cmd->add_option("--out", eval_opts.out, "report JSON output")->required();
    eval_cmd->add_option("--csv", eval_opts.csv, "also append rows to this CSV");
    eval_cmd->add_option("--close-frac", eval_opts.close_frac,
                         "fraction of rays that must be close to match a ring")
        ->capture_default_str();
    eval_cmd->add_option("--dist-frac", eval_opts.dist_frac,
                         "close = within this fraction of the local ring width")
        ->capture_default_str();
    eval_cmd->add_flag("--exclude-pith", eval_opts.exclude_pith,
                       "drop the pith instance before mAR/ARAND");
    eval_cmd->add_option("--jobs", eval_opts.jobs, "worker threads in directory mode")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    LossOpts loss_opts;
    auto* loss_cmd = app.add_subcommand("loss", "Print the segmentation loss of predicted "
                                                "probability maps against a class map.");
    loss_cmd->add_option("--pred", loss_opts.pred, "probability-map stem (<stem>.bg.png ...)")
        ->required();
    loss_cmd->add_option("--gt", loss_opts.gt, "ground-truth class map PNG")->required();
    loss_cmd->add_option("--weights", loss_opts.weights,
                         "background,boundary,pith loss weights")
        ->capture_default_str();

    VizOpts viz_opts;
    auto* viz_cmd = app.add_subcommand("viz", "Render a detection/ground-truth overlay and "
                                              "a polar error map.");
    viz_cmd->add_option("--image", viz_opts.image, "disk image PNG")->required();
    viz_cmd->add_option("--det", viz_opts.det, "detection JSON")->required();
    viz_cmd->add_option("--gt", viz_opts.gt, "ground-truth annotation JSON")->required();
    viz_cmd->add_option("--out", viz_opts.out, "output directory")->required();

    std::function<int()> runner;
    synth_cmd->callback([&] { runner = [&] { return run_synth(synth_opts); }; });
    convert_cmd->callback([&] { runner = [&] { return run_convert(convert_opts); }; });
    resize_cmd->callback([&] { runner = [&] { return run_resize(resize_opts); }; });
    trace_cmd->callback([&] { runner = [&] { return run_trace(trace_opts); }; });
    eval_cmd->callback([&] { runner = [&] { return run_eval(eval_opts); }; });
    loss_cmd->callback([&] { runner = [&] { return run_loss(loss_opts); }; });
    viz_cmd->callback([&] { runner = [&] { return run_viz(viz_opts); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the usage message to stderr
        return kExitUsage;
    }

    try {
        return runner();
    } catch (const ValidationError& e) {
        std::cerr << "ringtrace: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "ringtrace: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "ringtrace: " << e.what() << "\n";
        return kExitValidation;
    }
}
