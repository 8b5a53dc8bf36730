#include "ringtrace/io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ringtrace {

namespace {

// Raw grayscale/RGB frame decoded from a PNG, 8 or 16 bits per channel.
struct DecodedPng {
    int width = 0;
    int height = 0;
    int channels = 0;  // 1 = gray, 3 = rgb
    int bit_depth = 0; // 8 or 16
    std::vector<std::uint8_t> bytes;  // packed rows, 16-bit values big-endian
};

// Decodes a PNG file. expand_to_rgb8 forces 8-bit RGB output (any input
// flavor); otherwise grayscale inputs stay grayscale at their stored depth
// (1/2/4-bit grays expand to 8).
DecodedPng decode_png(const std::string& path, bool expand_to_rgb8) {
    FILE* file = std::fopen(path.c_str(), "rb");
    if (!file) throw IoError("cannot open " + path + " for reading");

    png_byte header[8];
    if (std::fread(header, 1, 8, file) != 8 || png_sig_cmp(header, 0, 8) != 0) {
        std::fclose(file);
        throw IoError(path + " is not a PNG file");
    }

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(file);
        throw IoError("libpng initialization failed");
    }

    DecodedPng out;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(file);
        throw IoError("failed to decode " + path);
    }

    png_init_io(png, file);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);

    if (expand_to_rgb8) {
        if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
        if (depth == 16) png_set_strip_16(png);
        if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
            png_set_gray_to_rgb(png);
        }
        png_set_strip_alpha(png);
    } else {
        if (color_type != PNG_COLOR_TYPE_GRAY) {
            png_destroy_read_struct(&png, &info, nullptr);
            std::fclose(file);
            throw IoError(path + ": expected a grayscale PNG");
        }
        if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    }
    png_read_update_info(png, info);

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.bit_depth = png_get_bit_depth(png, info);
    out.channels = png_get_channels(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    out.bytes.resize(rowbytes * out.height);
    rows.resize(static_cast<std::size_t>(out.height));
    for (int y = 0; y < out.height; ++y) rows[static_cast<std::size_t>(y)] = out.bytes.data() + rowbytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(file);
    return out;
}

// Writes one frame. channels 1 or 3, depth 8 or 16 (16-bit data given
// big-endian, the PNG wire order).
void encode_png(const std::string& path, int width, int height, int channels, int depth,
                const std::uint8_t* bytes) {
    FILE* file = std::fopen(path.c_str(), "wb");
    if (!file) throw IoError("cannot open " + path + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, &info);
        std::fclose(file);
        throw IoError("libpng initialization failed");
    }

    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    const std::size_t rowbytes =
        static_cast<std::size_t>(width) * channels * (depth / 8);
    for (int y = 0; y < height; ++y) {
        rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(bytes) + rowbytes * y;
    }

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(file);
        throw IoError("failed to encode " + path);
    }

    png_init_io(png, file);
    const int color = channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 depth, color, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fclose(file) != 0) throw IoError("failed to finish writing " + path);
}

// Reassembles big-endian 16-bit samples; 8-bit grays widen by value.
std::vector<std::uint16_t> gray16_values(const DecodedPng& png) {
    const std::size_t n = static_cast<std::size_t>(png.width) * png.height;
    std::vector<std::uint16_t> values(n);
    if (png.bit_depth == 16) {
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = static_cast<std::uint16_t>((png.bytes[2 * i] << 8) | png.bytes[2 * i + 1]);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) values[i] = png.bytes[i];
    }
    return values;
}

std::vector<std::uint8_t> to_big_endian(const std::vector<std::uint16_t>& values) {
    std::vector<std::uint8_t> bytes(values.size() * 2);
    for (std::size_t i = 0; i < values.size(); ++i) {
        bytes[2 * i] = static_cast<std::uint8_t>(values[i] >> 8);
        bytes[2 * i + 1] = static_cast<std::uint8_t>(values[i] & 0xff);
    }
    return bytes;
}

}  // namespace

ImageRGB read_image_png(const std::string& path) {
    const DecodedPng png = decode_png(path, /*expand_to_rgb8=*/true);
    ImageRGB image(png.width, png.height);
    image.data = png.bytes;
    return image;
}

void write_image_png(const std::string& path, const ImageRGB& image) {
    encode_png(path, image.width, image.height, 3, 8, image.data.data());
}

Mask read_mask_png(const std::string& path) {
    const DecodedPng png = decode_png(path, /*expand_to_rgb8=*/false);
    Mask mask(png.width, png.height);
    const auto values = gray16_values(png);
    for (std::size_t i = 0; i < values.size(); ++i) mask.data[i] = values[i] != 0 ? 1 : 0;
    return mask;
}

void write_mask_png(const std::string& path, const Mask& mask) {
    std::vector<std::uint8_t> bytes(mask.data.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.data[i] ? 255 : 0;
    encode_png(path, mask.width, mask.height, 1, 8, bytes.data());
}

ClassMap read_classmap_png(const std::string& path) {
    const DecodedPng png = decode_png(path, /*expand_to_rgb8=*/false);
    if (png.bit_depth != 8) {
        throw ValidationError(path + ": class maps must be 8-bit grayscale");
    }
    ClassMap map(png.width, png.height);
    for (std::size_t i = 0; i < png.bytes.size(); ++i) {
        if (png.bytes[i] > 3) {
            throw ValidationError(path + ": class map value " + std::to_string(png.bytes[i]) +
                                  " is outside {0,1,2,3}");
        }
        map.data[i] = png.bytes[i];
    }
    return map;
}

void write_classmap_png(const std::string& path, const ClassMap& map) {
    encode_png(path, map.width, map.height, 1, 8, map.data.data());
}

InstanceMap read_instancemap_png(const std::string& path) {
    const DecodedPng png = decode_png(path, /*expand_to_rgb8=*/false);
    InstanceMap map(png.width, png.height);
    map.data = gray16_values(png);
    return map;
}

void write_instancemap_png(const std::string& path, const InstanceMap& map) {
    const auto bytes = to_big_endian(map.data);
    encode_png(path, map.width, map.height, 1, 16, bytes.data());
}

namespace {

const char* const kProbSuffixes[4] = {".bg.png", ".ring.png", ".boundary.png", ".pith.png"};

}  // namespace

ProbabilityMaps read_probability_maps(const std::string& stem) {
    ProbabilityMaps maps;
    for (int cls = 0; cls < 4; ++cls) {
        const std::string path = stem + kProbSuffixes[cls];
        const DecodedPng png = decode_png(path, /*expand_to_rgb8=*/false);
        if (png.bit_depth != 16) {
            throw ValidationError(path + ": probability maps must be 16-bit grayscale");
        }
        if (cls == 0) {
            maps.width = png.width;
            maps.height = png.height;
        } else if (png.width != maps.width || png.height != maps.height) {
            throw ValidationError(path + ": probability map dimensions disagree");
        }
        const auto values = gray16_values(png);
        maps.prob[cls].resize(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            maps.prob[cls][i] = static_cast<float>(values[i] / 65535.0);
        }
    }
    // Quantization slack on load, then renormalize so downstream consumers see
    // exact per-pixel unit sums.
    const std::size_t n = static_cast<std::size_t>(maps.width) * maps.height;
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int cls = 0; cls < 4; ++cls) sum += maps.prob[cls][i];
        if (std::abs(sum - 1.0) > 1e-2) {
            throw ValidationError(stem + ": probability maps sum to " + std::to_string(sum) +
                                  " at pixel " + std::to_string(i) + ", expected 1");
        }
        for (int cls = 0; cls < 4; ++cls) {
            maps.prob[cls][i] = static_cast<float>(maps.prob[cls][i] / sum);
        }
    }
    return maps;
}

void write_probability_maps(const std::string& stem, const ProbabilityMaps& maps) {
    const std::size_t n = static_cast<std::size_t>(maps.width) * maps.height;
    for (int cls = 0; cls < 4; ++cls) {
        if (maps.prob[cls].size() != n) {
            throw ValidationError("probability maps: plane sizes disagree with dimensions");
        }
        std::vector<std::uint16_t> values(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = std::clamp(static_cast<double>(maps.prob[cls][i]), 0.0, 1.0);
            values[i] = static_cast<std::uint16_t>(std::lround(v * 65535.0));
        }
        encode_png(stem + kProbSuffixes[cls], maps.width, maps.height, 1, 16,
                   to_big_endian(values).data());
    }
}

Annotation read_annotation_file(const std::string& path) {
    return ingest_annotation(read_text_file(path));
}

void write_annotation_file(const std::string& path, const Annotation& ann) {
    write_text_file(path, serialize_annotation(ann));
}

DetectionDocument read_detection_file(const std::string& path) {
    return ingest_detection(read_text_file(path));
}

void write_detection_file(const std::string& path, const DetectionDocument& det) {
    write_text_file(path, serialize_detection(det));
}

std::string serialize_report(const MetricsReport& report, const std::string& disk) {
    nlohmann::ordered_json doc;
    doc["disk"] = disk;
    doc["P"] = report.precision;
    doc["R"] = report.recall;
    doc["F"] = report.fscore;
    doc["mAR"] = report.mar;
    doc["ARAND"] = report.arand;
    doc["TP"] = report.tp;
    doc["FP"] = report.fp;
    doc["FN"] = report.fn;
    return doc.dump(2) + "\n";
}

MetricsReport parse_report(const std::string& json_text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("report: invalid JSON: ") + e.what());
    }
    MetricsReport report;
    const auto number = [&](const char* field) {
        if (!doc.contains(field) || !doc.at(field).is_number()) {
            throw ValidationError(std::string("report: missing numeric field \"") + field + "\"");
        }
        return doc.at(field).get<double>();
    };
    report.precision = number("P");
    report.recall = number("R");
    report.fscore = number("F");
    report.mar = number("mAR");
    report.arand = number("ARAND");
    report.tp = static_cast<int>(number("TP"));
    report.fp = static_cast<int>(number("FP"));
    report.fn = static_cast<int>(number("FN"));
    return report;
}

void write_report_file(const std::string& path, const MetricsReport& report,
                       const std::string& disk) {
    write_text_file(path, serialize_report(report, disk));
}

std::string format_csv_row(const std::string& disk, const MetricsReport& report) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.1f,%.1f,%.1f,%.3f,%.3f", report.precision, report.recall,
                  report.fscore, report.mar, report.arand);
    return disk + "," + buf;
}

void write_reports_csv(const std::string& path,
                       const std::vector<std::pair<std::string, MetricsReport>>& rows) {
    std::string text = "disk,P,R,F,mAR,ARAND\n";
    for (const auto& [disk, report] : rows) text += format_csv_row(disk, report) + "\n";
    write_text_file(path, text);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("failed to read " + path);
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed to write " + path);
}

}  // namespace ringtrace
