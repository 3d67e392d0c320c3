#include "surftex/filters.hpp"

#include "surftex/error.hpp"
#include "surftex/textio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace surftex {

Padding parse_padding(std::string_view name) {
    if (name == "replicate") return Padding::replicate;
    if (name == "zero") return Padding::zero;
    throw InvalidArgument("unknown padding '" + std::string(name) + "' (replicate|zero)");
}

std::string_view to_string(Padding p) {
    return p == Padding::replicate ? "replicate" : "zero";
}

// ---------------------------------------------------------------------------
// Gabor

void GaborParams::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(sigma_x) || !positive(sigma_y)) {
        throw InvalidArgument("gabor sigma must be positive");
    }
    if (!positive(freq)) {
        throw InvalidArgument("gabor frequency must be positive");
    }
    if (!std::isfinite(theta) || theta < 0.0 || theta >= std::numbers::pi) {
        throw InvalidArgument("gabor theta must lie in [0, pi)");
    }
    if (half_size < 1) {
        throw InvalidArgument("gabor half_size must be >= 1");
    }
}

Kernel::Kernel(int side, std::vector<double> taps) : side_(side), taps_(std::move(taps)) {
    if (side < 1 || side % 2 == 0) {
        throw InvalidArgument("kernel side must be odd and positive, got " + std::to_string(side));
    }
    if (taps_.size() != static_cast<std::size_t>(side) * side) {
        throw InvalidArgument("kernel tap count does not match side");
    }
    if (!std::all_of(taps_.begin(), taps_.end(), [](double t) { return std::isfinite(t); })) {
        throw InvalidArgument("kernel taps must be finite");
    }
}

double Kernel::sum() const {
    double s = 0.0;
    for (double t : taps_) s += t;
    return s;
}

double gabor_value(const GaborParams& p, double x, double y) {
    const double c = std::cos(p.theta);
    const double s = std::sin(p.theta);
    const double xr = x * c + y * s;
    const double yr = -x * s + y * c;
    const double envelope =
        std::exp(-0.5 * (xr * xr / (p.sigma_x * p.sigma_x) + yr * yr / (p.sigma_y * p.sigma_y)));
    return envelope * std::cos(2.0 * std::numbers::pi * p.freq * xr);
}

Kernel make_gabor_kernel(const GaborParams& p) {
    p.validate();
    const int h = p.half_size;
    const int side = p.side();
    std::vector<double> taps(static_cast<std::size_t>(side) * side);
    for (int y = -h; y <= h; ++y) {
        for (int x = -h; x <= h; ++x) {
            taps[static_cast<std::size_t>(y + h) * side + (x + h)] = gabor_value(p, x, y);
        }
    }
    // Enforce exact point symmetry; rounding in the rotation can otherwise
    // differ in the last bit between (x, y) and (-x, -y).
    const std::size_t n = taps.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        taps[n - 1 - i] = taps[i];
    }
    return Kernel(side, std::move(taps));
}

void BankConfig::validate() const {
    if (orientations.empty() || frequencies.empty()) {
        throw InvalidArgument("bank needs at least one orientation and one frequency");
    }
    for (double t : orientations) {
        if (!std::isfinite(t) || t < 0.0 || t >= std::numbers::pi) {
            throw InvalidArgument("bank orientation outside [0, pi): " + textio::format_double(t));
        }
    }
    for (double f : frequencies) {
        if (!std::isfinite(f) || f <= 0.0) {
            throw InvalidArgument("bank frequency must be positive");
        }
    }
    if (!(sigma_scale > 0.0) || !(half_size_scale > 0.0)) {
        throw InvalidArgument("bank sigma_scale and half_size_scale must be positive");
    }
}

GaborParams BankConfig::params_for(double theta, double freq) const {
    const double sigma = sigma_scale / freq;
    GaborParams p;
    p.sigma_x = sigma;
    p.sigma_y = sigma;
    p.theta = theta;
    p.freq = freq;
    p.half_size = std::max(1, static_cast<int>(std::ceil(half_size_scale * sigma)));
    return p;
}

BankConfig default_bank_config() {
    BankConfig cfg;
    for (int k = 0; k < 8; ++k) cfg.orientations.push_back(k * std::numbers::pi / 8.0);
    cfg.frequencies = {1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0};
    return cfg;
}

std::vector<BankEntry> make_gabor_bank(const BankConfig& cfg) {
    cfg.validate();
    std::vector<BankEntry> bank;
    bank.reserve(cfg.orientations.size() * cfg.frequencies.size());
    for (double f : cfg.frequencies) {
        for (double t : cfg.orientations) {
            auto p = cfg.params_for(t, f);
            bank.push_back({p, make_gabor_kernel(p)});
        }
    }
    return bank;
}

BankConfig parse_bank_config(std::string_view text, const std::string& origin) {
    BankConfig cfg;
    cfg.orientations.clear();
    cfg.frequencies.clear();
    int lineno = 0;
    for (const auto& raw : textio::lines(text)) {
        ++lineno;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = textio::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw DataError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        }
        auto key = textio::trim(line.substr(0, eq));
        auto value = textio::trim(line.substr(eq + 1));
        auto list = [&]() {
            std::vector<double> out;
            std::string spaced(value);
            std::replace(spaced.begin(), spaced.end(), ',', ' ');
            std::istringstream in{spaced};
            std::string tok;
            while (in >> tok) out.push_back(textio::parse_double(tok, key));
            return out;
        };
        if (key == "orientations") {
            cfg.orientations = list();
        } else if (key == "frequencies") {
            cfg.frequencies = list();
        } else if (key == "sigma_scale") {
            cfg.sigma_scale = textio::parse_double(value, key);
        } else if (key == "half_size_scale") {
            cfg.half_size_scale = textio::parse_double(value, key);
        } else {
            throw DataError(origin + ":" + std::to_string(lineno) + ": unknown key '" +
                            std::string(key) + "'");
        }
    }
    try {
        cfg.validate();
    } catch (const InvalidArgument& e) {
        throw DataError(origin + ": " + e.what());
    }
    return cfg;
}

BankConfig load_bank_config(const std::filesystem::path& path) {
    return parse_bank_config(textio::read_file(path), path.string());
}

std::string format_bank_config(const BankConfig& cfg) {
    auto list = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ' ';
            s += textio::format_double(v[i]);
        }
        return s;
    };
    return "orientations = " + list(cfg.orientations) + "\n" +
           "frequencies = " + list(cfg.frequencies) + "\n" +
           "sigma_scale = " + textio::format_double(cfg.sigma_scale) + "\n" +
           "half_size_scale = " + textio::format_double(cfg.half_size_scale) + "\n";
}

// ---------------------------------------------------------------------------
// Convolution and windowed statistics

namespace {

// Image copy with a border of `margin` pixels on every side.
struct PaddedImage {
    int margin;
    int stride;
    std::vector<double> data;

    const double* row(int y) const {
        return data.data() + static_cast<std::size_t>(y + margin) * stride + margin;
    }
};

PaddedImage pad(const GrayImage& img, int margin, Padding padding) {
    const int w = img.width();
    const int h = img.height();
    PaddedImage out{margin, w + 2 * margin, {}};
    out.data.assign(static_cast<std::size_t>(out.stride) * (h + 2 * margin), 0.0);
    for (int py = 0; py < h + 2 * margin; ++py) {
        int sy = py - margin;
        bool row_inside = sy >= 0 && sy < h;
        if (!row_inside && padding == Padding::zero) continue;
        sy = std::clamp(sy, 0, h - 1);
        auto src = img.row(sy);
        double* dst = out.data.data() + static_cast<std::size_t>(py) * out.stride;
        for (int px = 0; px < out.stride; ++px) {
            int sx = px - margin;
            if (sx < 0 || sx >= w) {
                dst[px] = padding == Padding::zero ? 0.0 : src[std::clamp(sx, 0, w - 1)];
            } else {
                dst[px] = src[sx];
            }
        }
    }
    return out;
}

void check_fits(const GrayImage& img, int side, const char* what) {
    if (img.empty()) throw InvalidArgument("empty image");
    if (side > std::min(img.width(), img.height())) {
        throw InvalidArgument(std::string(what) + " of side " + std::to_string(side) +
                              " is larger than the " + std::to_string(img.width()) + "x" +
                              std::to_string(img.height()) + " image");
    }
}

}  // namespace

ResponseMap convolve_same(const GrayImage& img, const Kernel& k, Padding padding) {
    check_fits(img, k.side(), "kernel");
    const int w = img.width();
    const int h = img.height();
    const int r = k.half();
    const PaddedImage src = pad(img, r, padding);

    ResponseMap out{w, h, std::vector<double>(static_cast<std::size_t>(w) * h, 0.0)};
    for (int y = 0; y < h; ++y) {
        double* acc = out.values.data() + static_cast<std::size_t>(y) * w;
        // Per output pixel, terms are added in (dy, dx) ascending order; the
        // x loop is innermost so it vectorises without reordering any sum.
        for (int dy = -r; dy <= r; ++dy) {
            const double* srow = src.row(y - dy);
            for (int dx = -r; dx <= r; ++dx) {
                const double tap = k.at(dx, dy);
                const double* s = srow - dx;
                for (int x = 0; x < w; ++x) {
                    acc[x] += tap * s[x];
                }
            }
        }
    }
    return out;
}

void WindowSpec::validate() const {
    if (side < 3 || side % 2 == 0) {
        throw InvalidArgument("window side must be odd and >= 3, got " + std::to_string(side));
    }
}

std::vector<WindowSpec> default_windows() { return {{3}, {5}, {7}}; }

ResponseMap stddev_filter(const GrayImage& img, WindowSpec w, Padding padding) {
    w.validate();
    check_fits(img, w.side, "window");
    const int width = img.width();
    const int height = img.height();
    const int r = w.side / 2;
    const double n = static_cast<double>(w.side) * w.side;
    const PaddedImage src = pad(img, r, padding);

    ResponseMap out{width, height, std::vector<double>(static_cast<std::size_t>(width) * height)};
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            // Centred on the middle pixel so flat windows give exactly zero.
            const double ref = src.row(y)[x];
            double sum = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                const double* s = src.row(y + dy) + x;
                for (int dx = -r; dx <= r; ++dx) sum += s[dx] - ref;
            }
            const double mean = sum / n;
            double sq = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                const double* s = src.row(y + dy) + x;
                for (int dx = -r; dx <= r; ++dx) {
                    const double d = (s[dx] - ref) - mean;
                    sq += d * d;
                }
            }
            out.values[static_cast<std::size_t>(y) * width + x] = std::sqrt(sq / n);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string kernel_to_text(const Kernel& k) {
    std::string out;
    for (int y = 0; y < k.side(); ++y) {
        for (int x = 0; x < k.side(); ++x) {
            if (x) out += ' ';
            out += textio::format_double(k.taps()[static_cast<std::size_t>(y) * k.side() + x]);
        }
        out += '\n';
    }
    return out;
}

GrayImage kernel_to_image(const Kernel& k) {
    auto [lo, hi] = std::minmax_element(k.taps().begin(), k.taps().end());
    const double span = *hi - *lo;
    std::vector<double> px;
    px.reserve(k.taps().size());
    for (double t : k.taps()) {
        px.push_back(span > 0.0 ? std::round(255.0 * (t - *lo) / span) : 128.0);
    }
    return GrayImage(k.side(), k.side(), std::move(px));
}

}  // namespace surftex
