#include "surftex/image.hpp"

#include "surftex/error.hpp"
#include "surftex/textio.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>

namespace surftex {

GrayImage::GrayImage(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width) +
                              "x" + std::to_string(height));
    }
    pixels_.assign(static_cast<std::size_t>(width) * height, 0.0);
}

GrayImage::GrayImage(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width) +
                              "x" + std::to_string(height));
    }
    if (pixels_.size() != static_cast<std::size_t>(width) * height) {
        throw InvalidArgument("pixel count " + std::to_string(pixels_.size()) +
                              " does not match " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
    for (double v : pixels_) {
        if (!std::isfinite(v) || v < 0.0 || v > 255.0) {
            throw InvalidArgument("intensity out of [0, 255]: " + std::to_string(v));
        }
    }
}

RgbImage::RgbImage(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("image dimensions must be positive");
    }
    if (pixels_.size() != static_cast<std::size_t>(width) * height) {
        throw InvalidArgument("pixel count does not match dimensions");
    }
}

// ---------------------------------------------------------------------------
// PGM

namespace {

struct HeaderReader {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;
    const std::string& origin;

    [[noreturn]] void fail(const std::string& why) const {
        throw DataError("corrupt PGM '" + origin + "': " + why);
    }

    void skip_space_and_comments() {
        while (pos < bytes.size()) {
            if (std::isspace(bytes[pos])) {
                ++pos;
            } else if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    int read_uint(const char* what) {
        skip_space_and_comments();
        long long v = 0;
        std::size_t start = pos;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos] - '0');
            if (v > (1 << 24)) fail(std::string(what) + " too large");
            ++pos;
        }
        if (pos == start) fail(std::string("missing ") + what);
        return static_cast<int>(v);
    }
};

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes, const std::string& origin) {
    HeaderReader r{bytes, 0, origin};
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        throw DataError("unsupported format in '" + origin + "': expected binary PGM magic P5");
    }
    r.pos = 2;
    int w = r.read_uint("width");
    int h = r.read_uint("height");
    int maxval = r.read_uint("maxval");
    if (w < 1 || h < 1) r.fail("non-positive dimensions");
    if (maxval != 255) r.fail("maxval must be 255, got " + std::to_string(maxval));
    if (r.pos >= bytes.size() || !std::isspace(bytes[r.pos])) r.fail("missing separator after header");
    ++r.pos;
    std::size_t n = static_cast<std::size_t>(w) * h;
    if (bytes.size() - r.pos < n) {
        r.fail("truncated payload, expected " + std::to_string(n) + " bytes, found " +
               std::to_string(bytes.size() - r.pos));
    }
    std::vector<double> px(n);
    for (std::size_t i = 0; i < n; ++i) px[i] = bytes[r.pos + i];
    return GrayImage(w, h, std::move(px));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
    std::string header = "P5\n" + std::to_string(img.width()) + " " +
                         std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + img.pixels().size());
    for (double v : img.pixels()) {
        out.push_back(static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)));
    }
    return out;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
    auto bytes = encode_pgm(img);
    textio::atomic_write(path, {reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

// ---------------------------------------------------------------------------
// PNG

namespace {

struct PngReadState {
    std::span<const std::uint8_t> data;
    std::size_t pos = 0;
};

void png_read_from_span(png_structp png, png_bytep out, png_size_t len) {
    auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (st->data.size() - st->pos < len) {
        png_error(png, "unexpected end of data");
    }
    std::copy_n(st->data.data() + st->pos, len, out);
    st->pos += len;
}

void png_error_handler(png_structp png, png_const_charp msg) {
    auto* err = static_cast<std::string*>(png_get_error_ptr(png));
    if (err) *err = msg;
    png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

AnyImage decode_png(std::span<const std::uint8_t> bytes, const std::string& origin) {
    std::string error;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler,
                                             png_warning_handler);
    if (!png) throw IoError("cannot initialise PNG decoder for '" + origin + "'");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("cannot initialise PNG decoder for '" + origin + "'");
    }

    PngReadState state{bytes, 0};
    // Declared before setjmp so they are destroyed normally on either path.
    std::vector<std::uint8_t> buffer;
    std::vector<png_bytep> rows;
    png_uint_32 w = 0, h = 0;
    int channels = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("corrupt PNG '" + origin + "': " + error);
    }
    png_set_read_fn(png, &state, png_read_from_span);
    png_read_info(png, info);

    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    w = png_get_image_width(png, info);
    h = png_get_image_height(png, info);
    channels = png_get_channels(png, info);
    std::size_t stride = png_get_rowbytes(png, info);
    buffer.resize(stride * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = buffer.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const int width = static_cast<int>(w);
    const int height = static_cast<int>(h);
    if (channels == 1) {
        std::vector<double> px(static_cast<std::size_t>(width) * height);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                px[static_cast<std::size_t>(y) * width + x] = rows[y][x];
        return GrayImage(width, height, std::move(px));
    }
    if (channels != 3) {
        throw DataError("unsupported PNG channel layout in '" + origin + "'");
    }
    std::vector<Rgb> px(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const auto* p = rows[y] + 3 * x;
            px[static_cast<std::size_t>(y) * width + x] = {p[0], p[1], p[2]};
        }
    return RgbImage(width, height, std::move(px));
}

void png_write_to_string(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::string*>(png_get_io_ptr(png));
    out->append(reinterpret_cast<const char*>(data), len);
}

void png_flush_noop(png_structp) {}

}  // namespace

void write_png(const std::filesystem::path& path, const RgbImage& img) {
    std::string error;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler,
                                              png_warning_handler);
    if (!png) throw IoError("cannot initialise PNG encoder");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("cannot initialise PNG encoder");
    }
    std::string encoded;
    std::vector<std::uint8_t> buffer(static_cast<std::size_t>(img.width()) * img.height() * 3);
    std::vector<png_bytep> rows(img.height());
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encoding failed for '" + path.string() + "': " + error);
    }
    for (int y = 0; y < img.height(); ++y) {
        rows[y] = buffer.data() + static_cast<std::size_t>(y) * img.width() * 3;
        for (int x = 0; x < img.width(); ++x) {
            std::copy_n(img.at(x, y).data(), 3, rows[y] + 3 * x);
        }
    }
    png_set_write_fn(png, &encoded, png_write_to_string, png_flush_noop);
    png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    textio::atomic_write(path, encoded);
}

// ---------------------------------------------------------------------------

AnyImage load_image(const std::filesystem::path& path) {
    const std::string origin = path.string();
    std::string raw;
    try {
        raw = textio::read_file(path);
    } catch (const IoError&) {
        throw IoError("cannot read image '" + origin + "'");
    }
    std::span<const std::uint8_t> bytes(reinterpret_cast<const std::uint8_t*>(raw.data()),
                                        raw.size());
    static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (bytes.size() >= 8 && std::equal(kPngSig, kPngSig + 8, bytes.begin())) {
        return decode_png(bytes, origin);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
        return decode_pgm(bytes, origin);
    }
    throw DataError("unsupported image format in '" + origin + "' (expected PNG or binary PGM)");
}

GrayImage load_gray(const std::filesystem::path& path) {
    auto img = load_image(path);
    if (auto* g = std::get_if<GrayImage>(&img)) return std::move(*g);
    return to_grayscale(std::get<RgbImage>(img));
}

GrayImage to_grayscale(const RgbImage& img) {
    std::vector<double> px;
    px.reserve(img.pixels().size());
    for (const auto& p : img.pixels()) {
        double v = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
        // The weights sum to 1 only up to rounding; keep the result in range.
        px.push_back(std::clamp(v, 0.0, 255.0));
    }
    return GrayImage(img.width(), img.height(), std::move(px));
}

GrayImage crop_patch(const GrayImage& img, int x0, int y0, int side) {
    if (side < 1 || x0 < 0 || y0 < 0 || x0 + side > img.width() || y0 + side > img.height()) {
        throw InvalidArgument("crop (" + std::to_string(x0) + ", " + std::to_string(y0) + ", " +
                              std::to_string(side) + ") outside " + std::to_string(img.width()) +
                              "x" + std::to_string(img.height()) + " image");
    }
    std::vector<double> px;
    px.reserve(static_cast<std::size_t>(side) * side);
    for (int y = y0; y < y0 + side; ++y) {
        auto r = img.row(y);
        px.insert(px.end(), r.begin() + x0, r.begin() + x0 + side);
    }
    return GrayImage(side, side, std::move(px));
}

}  // namespace surftex
