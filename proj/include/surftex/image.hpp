#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace surftex {

/// Row-major grid of real-valued intensities in [0, 255].
class GrayImage {
public:
    GrayImage() = default;
    /// Zero-filled image. Throws InvalidArgument if either side is < 1.
    GrayImage(int width, int height);
    /// Takes ownership of `pixels`; validates size and range.
    GrayImage(int width, int height, std::vector<double> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return pixels_.empty(); }

    double at(int x, int y) const { return pixels_[index(x, y)]; }
    double& at(int x, int y) { return pixels_[index(x, y)]; }

    std::span<const double> pixels() const noexcept { return pixels_; }
    std::span<const double> row(int y) const {
        return {pixels_.data() + static_cast<std::size_t>(y) * width_,
                static_cast<std::size_t>(width_)};
    }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> pixels_;
};

using Rgb = std::array<std::uint8_t, 3>;

class RgbImage {
public:
    RgbImage() = default;
    RgbImage(int width, int height, std::vector<Rgb> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    const Rgb& at(int x, int y) const {
        return pixels_[static_cast<std::size_t>(y) * width_ + x];
    }
    std::span<const Rgb> pixels() const noexcept { return pixels_; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> pixels_;
};

using AnyImage = std::variant<RgbImage, GrayImage>;

/// Decodes a binary PGM (P5, maxval 255) or an 8-bit PNG. PGM and
/// single-channel PNG decode to GrayImage; colour PNG decodes to RgbImage
/// (alpha dropped). Errors carry the path and the cause.
AnyImage load_image(const std::filesystem::path& path);

/// Loads any supported image and returns it as grayscale.
GrayImage load_gray(const std::filesystem::path& path);

GrayImage decode_pgm(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");

/// Encodes as P5 with maxval 255. Intensities are rounded to nearest and
/// clamped to [0, 255].
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

void write_pgm(const std::filesystem::path& path, const GrayImage& img);

/// Writes an 8-bit RGB PNG. Used for fixtures and debugging.
void write_png(const std::filesystem::path& path, const RgbImage& img);

/// BT.601 luma, 0.299 r + 0.587 g + 0.114 b, left unquantized.
GrayImage to_grayscale(const RgbImage& img);

/// side x side sub-image with top-left corner (x0, y0).
GrayImage crop_patch(const GrayImage& img, int x0, int y0, int side);

}  // namespace surftex
