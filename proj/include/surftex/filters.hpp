#pragma once

#include "surftex/image.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace surftex {

/// Real-valued map with the same shape as an image but no range limit.
/// Filter responses are returned in this form.
struct ResponseMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

enum class Padding { replicate, zero };

Padding parse_padding(std::string_view name);
std::string_view to_string(Padding p);

/// Parameters of a single real, even-symmetric Gabor kernel.
///
/// The kernel is sampled on integer offsets (x, y) in [-half_size, half_size]^2:
///   g(x, y) = exp(-0.5 * (xr^2 / sigma_x^2 + yr^2 / sigma_y^2)) * cos(2 pi freq xr)
///   xr =  x cos(theta) + y sin(theta)
///   yr = -x sin(theta) + y cos(theta)
struct GaborParams {
    double sigma_x = 0.0;
    double sigma_y = 0.0;
    double theta = 0.0;  ///< radians, [0, pi)
    double freq = 0.0;   ///< cycles per pixel
    int half_size = 0;

    /// Throws InvalidArgument unless every field is in range.
    void validate() const;
    int side() const noexcept { return 2 * half_size + 1; }
};

/// Square odd-sided grid of taps, row-major with y as the row index.
class Kernel {
public:
    Kernel() = default;
    Kernel(int side, std::vector<double> taps);

    int side() const noexcept { return side_; }
    int half() const noexcept { return side_ / 2; }
    /// Tap at offset (dx, dy) from the centre.
    double at(int dx, int dy) const {
        return taps_[static_cast<std::size_t>(dy + half()) * side_ + (dx + half())];
    }
    std::span<const double> taps() const noexcept { return taps_; }
    double sum() const;

    friend bool operator==(const Kernel&, const Kernel&) = default;

private:
    int side_ = 0;
    std::vector<double> taps_;
};

/// Evaluates the Gabor function at a single real offset.
double gabor_value(const GaborParams& p, double x, double y);

Kernel make_gabor_kernel(const GaborParams& p);

/// Describes a bank as the cross product of orientations and frequencies.
/// Each frequency f gets sigma_x = sigma_y = sigma_scale / f and
/// half_size = ceil(half_size_scale * sigma).
struct BankConfig {
    std::vector<double> orientations;
    std::vector<double> frequencies;
    double sigma_scale = 0.56;
    double half_size_scale = 3.0;

    void validate() const;
    GaborParams params_for(double theta, double freq) const;
};

/// 8 orientations k*pi/8 by 3 frequencies {1/16, 1/8, 1/4}.
BankConfig default_bank_config();

struct BankEntry {
    GaborParams params;
    Kernel kernel;
};

/// Frequency-major, then orientation.
std::vector<BankEntry> make_gabor_bank(const BankConfig& cfg);

/// Plain key/value text. Keys: orientations, frequencies (whitespace
/// separated lists), sigma_scale, half_size_scale. '#' starts a comment.
BankConfig parse_bank_config(std::string_view text, const std::string& origin = "<memory>");
BankConfig load_bank_config(const std::filesystem::path& path);
std::string format_bank_config(const BankConfig& cfg);

/// Same-size 2-D convolution (kernel flipped):
///   out(x, y) = sum_{dy} sum_{dx} k(dx, dy) * in(x - dx, y - dy)
/// with dy outermost and dx innermost, each ascending from -half.
/// Reads outside the image are resolved by `padding`.
ResponseMap convolve_same(const GrayImage& img, const Kernel& k, Padding padding = Padding::replicate);

/// Side of a square window; odd and >= 3.
struct WindowSpec {
    int side = 3;

    void validate() const;
};

std::vector<WindowSpec> default_windows();

/// Population standard deviation over the side x side window centred on
/// each pixel. Mean and squared deviations are accumulated in two passes.
ResponseMap stddev_filter(const GrayImage& img, WindowSpec w, Padding padding = Padding::replicate);

/// One row per kernel row, taps space separated at full precision.
std::string kernel_to_text(const Kernel& k);
/// Linear min..max rescale to 0..255 for viewing.
GrayImage kernel_to_image(const Kernel& k);

}  // namespace surftex
