#include "surftex/textio.hpp"

#include "surftex/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace surftex::textio {

std::string format_double(double v) {
    if (!std::isfinite(v)) {
        throw InvalidArgument("cannot serialize non-finite value");
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

template <typename T>
T parse_number(std::string_view field, std::string_view what) {
    field = trim(field);
    T value{};
    const char* first = field.data();
    const char* last = first + field.size();
    if (!field.empty() && *first == '+') {
        ++first;
    }
    auto res = std::from_chars(first, last, value);
    if (field.empty() || res.ec != std::errc{} || res.ptr != last) {
        throw DataError("invalid " + std::string(what) + ": '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace

double parse_double(std::string_view field, std::string_view what) {
    double v = parse_number<double>(field, what);
    if (!std::isfinite(v)) {
        throw DataError("non-finite " + std::string(what));
    }
    return v;
}

long long parse_int(std::string_view field, std::string_view what) {
    return parse_number<long long>(field, what);
}

std::uint64_t parse_u64(std::string_view field, std::string_view what) {
    return parse_number<std::uint64_t>(field, what);
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            return out;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw IoError("read failed for '" + path.string() + "'");
    }
    return std::move(ss).str();
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write failed for '" + path.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path.string() + "': " + ec.message());
    }
}

std::vector<std::string> lines(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto pos = text.find('\n', start);
        auto end = pos == std::string_view::npos ? text.size() : pos;
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.emplace_back(line);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace surftex::textio
