#include "glme/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include <json.hpp>

#include "glme/errors.hpp"

namespace glme {

namespace {

std::uint64_t to_le_bits(double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) {
        bits = __builtin_bswap64(bits);
    }
    return bits;
}

double from_le_bits(std::uint64_t bits) {
    if constexpr (std::endian::native == std::endian::big) {
        bits = __builtin_bswap64(bits);
    }
    return std::bit_cast<double>(bits);
}

std::string sidecar_path(const std::string& data_path) { return data_path + ".json"; }

unsigned char quantize(double v, double lo, double hi) {
    if (!(hi > lo)) return 128;  // constant band
    const double t = (v - lo) / (hi - lo);
    const double scaled = std::round(t * 255.0);
    return static_cast<unsigned char>(std::clamp(scaled, 0.0, 255.0));
}

void band_range(const ImageStack& stack, std::size_t band, double& lo, double& hi) {
    lo = hi = stack.data(band, 0);
    for (std::size_t p = 1; p < stack.pixels(); ++p) {
        lo = std::min(lo, stack.data(band, p));
        hi = std::max(hi, stack.data(band, p));
    }
}

struct PngWriter {
    std::FILE* file = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;

    ~PngWriter() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (file) std::fclose(file);
    }
};

void write_png_rows(const std::string& path, std::size_t height, std::size_t width,
                    int color_type, const std::vector<std::vector<unsigned char>>& rows) {
    PngWriter w;
    w.file = std::fopen(path.c_str(), "wb");
    if (!w.file) throw IoError("cannot open for writing: " + path);
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!w.png) throw IoError("png_create_write_struct failed");
    w.info = png_create_info_struct(w.png);
    if (!w.info) throw IoError("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(w.png))) {
        throw IoError("libpng failure while writing " + path);
    }
    png_init_io(w.png, w.file);
    png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(width),
                 static_cast<png_uint_32>(height), 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    for (const auto& row : rows) {
        png_write_row(w.png, const_cast<png_bytep>(row.data()));
    }
    png_write_end(w.png, w.info);
}

}  // namespace

void write_image_stack(const std::string& data_path, const ImageStack& stack) {
    validate_image_stack(stack);

    std::ofstream out(data_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + data_path);
    for (std::size_t i = 0; i < stack.data.size(); ++i) {
        const std::uint64_t bits = to_le_bits(stack.data.data()[i]);
        out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
    }
    if (!out) throw IoError("write failed: " + data_path);
    out.close();

    nlohmann::json sidecar{{"bands", stack.bands},
                           {"height", stack.height},
                           {"width", stack.width},
                           {"dtype", "float64-le"},
                           {"order", "band-major"}};
    std::ofstream side(sidecar_path(data_path), std::ios::trunc);
    if (!side) throw IoError("cannot open for writing: " + sidecar_path(data_path));
    side << sidecar.dump(2) << '\n';
    if (!side) throw IoError("write failed: " + sidecar_path(data_path));
}

ImageStack read_image_stack(const std::string& data_path) {
    std::ifstream side(sidecar_path(data_path));
    if (!side) throw IoError("cannot open: " + sidecar_path(data_path));
    nlohmann::json sidecar;
    try {
        side >> sidecar;
    } catch (const nlohmann::json::exception& ex) {
        throw IoError("malformed sidecar " + sidecar_path(data_path) + ": " + ex.what());
    }
    std::size_t bands = 0, height = 0, width = 0;
    try {
        bands = sidecar.at("bands").get<std::size_t>();
        height = sidecar.at("height").get<std::size_t>();
        width = sidecar.at("width").get<std::size_t>();
    } catch (const nlohmann::json::exception& ex) {
        throw IoError("sidecar " + sidecar_path(data_path) +
                      " is missing a geometry field: " + ex.what());
    }
    ImageStack stack = make_image_stack(bands, height, width);

    std::ifstream in(data_path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + data_path);
    for (std::size_t i = 0; i < stack.data.size(); ++i) {
        std::uint64_t bits = 0;
        in.read(reinterpret_cast<char*>(&bits), sizeof(bits));
        if (!in) {
            throw IoError("short read (geometry/sidecar mismatch): " + data_path);
        }
        stack.data.data()[i] = from_le_bits(bits);
    }
    char extra = 0;
    if (in.read(&extra, 1)) {
        throw IoError("trailing bytes (geometry/sidecar mismatch): " + data_path);
    }
    validate_image_stack(stack);
    return stack;
}

void write_band_png(const std::string& path, const ImageStack& stack, std::size_t band) {
    validate_image_stack(stack);
    if (band >= stack.bands) throw DimensionError("write_band_png: band out of range");
    double lo = 0.0, hi = 0.0;
    band_range(stack, band, lo, hi);
    std::vector<std::vector<unsigned char>> rows(stack.height,
                                                 std::vector<unsigned char>(stack.width));
    for (std::size_t y = 0; y < stack.height; ++y) {
        for (std::size_t x = 0; x < stack.width; ++x) {
            rows[y][x] = quantize(stack.at(band, y, x), lo, hi);
        }
    }
    write_png_rows(path, stack.height, stack.width, PNG_COLOR_TYPE_GRAY, rows);
}

void write_rgb_png(const std::string& path, const ImageStack& stack, std::size_t r_band,
                   std::size_t g_band, std::size_t b_band) {
    validate_image_stack(stack);
    const std::size_t chans[3] = {r_band, g_band, b_band};
    double lo[3], hi[3];
    for (int c = 0; c < 3; ++c) {
        if (chans[c] >= stack.bands) throw DimensionError("write_rgb_png: band out of range");
        band_range(stack, chans[c], lo[c], hi[c]);
    }
    std::vector<std::vector<unsigned char>> rows(
        stack.height, std::vector<unsigned char>(stack.width * 3));
    for (std::size_t y = 0; y < stack.height; ++y) {
        for (std::size_t x = 0; x < stack.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                rows[y][x * 3 + c] = quantize(stack.at(chans[c], y, x), lo[c], hi[c]);
            }
        }
    }
    write_png_rows(path, stack.height, stack.width, PNG_COLOR_TYPE_RGB, rows);
}

}  // namespace glme
