#pragma once

// Grayscale raster I/O (PGM P2/P5, uncompressed 8-bit BMP) and CSV export of
// norm curves.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "rht/analysis.hpp"
#include "rht/errors.hpp"
#include "rht/grid.hpp"

namespace rht {

enum class RasterFormat { PgmBinary, PgmAscii, Bmp8 };

/// A decoded raster of any shape. Row 0 is the top row.
struct Raster {
    RasterFormat format = RasterFormat::PgmBinary;
    std::size_t width = 0;
    std::size_t height = 0;
    unsigned maxval = 255;
    std::vector<double> pixels;
};

namespace detail {

class PgmReader {
public:
    explicit PgmReader(std::span<const std::uint8_t> b) : b_(b) {}

    /// Next header integer, skipping whitespace and '#' comments.
    long header_int(const char* field) {
        skip_space_and_comments();
        if (pos_ >= b_.size()) throw ParseError(field, "missing (file truncated)");
        long v = 0;
        std::size_t digits = 0;
        while (pos_ < b_.size() && is_digit(b_[pos_])) {
            v = v * 10 + (b_[pos_] - '0');
            if (v > 1'000'000'000L) throw ParseError(field, "value too large");
            ++pos_;
            ++digits;
        }
        if (digits == 0) throw ParseError(field, "expected a decimal integer");
        if (pos_ < b_.size() && !is_space(b_[pos_]) && b_[pos_] != '#')
            throw ParseError(field, "expected a decimal integer");
        return v;
    }

    /// Consumes the single whitespace byte that ends a P5 header.
    void end_of_header() {
        if (pos_ >= b_.size() || !is_space(b_[pos_])) throw ParseError("maxval", "missing whitespace after header");
        ++pos_;
    }

    std::size_t pos() const noexcept { return pos_; }

    static bool is_space(std::uint8_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }
    static bool is_digit(std::uint8_t c) { return c >= '0' && c <= '9'; }

private:
    void skip_space_and_comments() {
        while (pos_ < b_.size()) {
            if (is_space(b_[pos_])) {
                ++pos_;
            } else if (b_[pos_] == '#') {
                while (pos_ < b_.size() && b_[pos_] != '\n' && b_[pos_] != '\r') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> b_;
    std::size_t pos_ = 2;
};

inline Raster parse_pgm(std::span<const std::uint8_t> bytes) {
    Raster r;
    const bool binary = bytes[1] == '5';
    r.format = binary ? RasterFormat::PgmBinary : RasterFormat::PgmAscii;
    PgmReader rd(bytes);
    const long w = rd.header_int("width");
    const long h = rd.header_int("height");
    const long maxval = rd.header_int("maxval");
    if (w <= 0) throw ParseError("width", "must be positive");
    if (h <= 0) throw ParseError("height", "must be positive");
    if (maxval <= 0) throw ParseError("maxval", "must be positive");
    if (maxval > 255) throw ParseError("maxval", std::to_string(maxval) + " > 255 is not supported");
    r.width = static_cast<std::size_t>(w);
    r.height = static_cast<std::size_t>(h);
    r.maxval = static_cast<unsigned>(maxval);
    const std::size_t count = r.width * r.height;
    r.pixels.resize(count);

    if (binary) {
        rd.end_of_header();
        const std::size_t start = rd.pos();
        if (bytes.size() - start < count)
            throw ParseError("pixel data", "truncated: expected " + std::to_string(count) + " bytes, got " +
                                               std::to_string(bytes.size() - start));
        for (std::size_t i = 0; i < count; ++i) {
            const std::uint8_t v = bytes[start + i];
            if (v > maxval) throw ParseError("pixel data", "value exceeds maxval");
            r.pixels[i] = v;
        }
        return r;
    }

    std::size_t pos = rd.pos();
    for (std::size_t i = 0; i < count; ++i) {
        while (pos < bytes.size() && PgmReader::is_space(bytes[pos])) ++pos;
        if (pos >= bytes.size())
            throw ParseError("pixel data", "truncated: expected " + std::to_string(count) + " values, got " +
                                               std::to_string(i));
        long v = 0;
        std::size_t digits = 0;
        while (pos < bytes.size() && PgmReader::is_digit(bytes[pos]) && digits < 6) {
            v = v * 10 + (bytes[pos] - '0');
            ++pos;
            ++digits;
        }
        if (digits == 0 || (pos < bytes.size() && !PgmReader::is_space(bytes[pos])))
            throw ParseError("pixel data", "expected a decimal integer");
        if (v > maxval) throw ParseError("pixel data", "value exceeds maxval");
        r.pixels[i] = static_cast<double>(v);
    }
    return r;
}

inline std::uint32_t le32(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
           static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}
inline std::uint16_t le16(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

inline Raster parse_bmp(std::span<const std::uint8_t> b) {
    constexpr std::size_t file_header = 14;
    if (b.size() < file_header + 4) throw ParseError("file header", "truncated");
    const std::uint32_t data_offset = le32(b, 10);
    const std::uint32_t info_size = le32(b, 14);
    if (info_size < 40) throw ParseError("header size", "only BITMAPINFOHEADER or later is supported");
    if (b.size() < file_header + info_size) throw ParseError("info header", "truncated");
    const auto width = static_cast<std::int32_t>(le32(b, 18));
    const auto height = static_cast<std::int32_t>(le32(b, 22));
    const std::uint16_t planes = le16(b, 26);
    const std::uint16_t bpp = le16(b, 28);
    const std::uint32_t compression = le32(b, 30);
    const std::uint32_t colors_used = le32(b, 46);
    if (width <= 0) throw ParseError("width", "must be positive");
    if (height == 0 || height == INT32_MIN) throw ParseError("height", "must be nonzero");
    if (planes != 1) throw ParseError("planes", "must be 1");
    if (bpp != 8) throw ParseError("bits per pixel", std::to_string(bpp) + " is not supported (8 required)");
    if (compression != 0) throw ParseError("compression", "only uncompressed (BI_RGB) is supported");
    const std::size_t palette_count = colors_used == 0 ? 256 : colors_used;
    if (palette_count > 256) throw ParseError("palette", "more than 256 entries");
    const std::size_t palette_at = file_header + info_size;
    if (b.size() < palette_at + 4 * palette_count) throw ParseError("palette", "truncated");
    std::vector<std::uint8_t> gray(palette_count);
    for (std::size_t i = 0; i < palette_count; ++i) {
        const std::uint8_t blue = b[palette_at + 4 * i];
        const std::uint8_t green = b[palette_at + 4 * i + 1];
        const std::uint8_t red = b[palette_at + 4 * i + 2];
        if (blue != green || green != red)
            throw ParseError("palette", "entry " + std::to_string(i) + " is not gray");
        gray[i] = red;
    }

    Raster r;
    r.format = RasterFormat::Bmp8;
    r.width = static_cast<std::size_t>(width);
    const bool bottom_up = height > 0;
    r.height = static_cast<std::size_t>(bottom_up ? height : -static_cast<std::int64_t>(height));
    r.maxval = 255;
    const std::size_t stride = (r.width + 3) & ~std::size_t{3};
    if (data_offset > b.size() || b.size() - data_offset < stride * r.height)
        throw ParseError("pixel data", "truncated");
    r.pixels.resize(r.width * r.height);
    for (std::size_t row = 0; row < r.height; ++row) {
        const std::size_t src_row = bottom_up ? r.height - 1 - row : row;
        const std::size_t at = data_offset + src_row * stride;
        for (std::size_t x = 0; x < r.width; ++x) {
            const std::uint8_t idx = b[at + x];
            if (idx >= palette_count) throw ParseError("pixel data", "palette index out of range");
            r.pixels[row * r.width + x] = gray[idx];
        }
    }
    return r;
}

inline std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

} // namespace detail

/// Decodes PGM (P2/P5, maxval <= 255) or 8-bit grayscale BMP. Throws
/// ParseError naming the offending field.
inline Raster parse_raster(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2) throw ParseError("magic", "file too short");
    if (bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) return detail::parse_pgm(bytes);
    if (bytes[0] == 'B' && bytes[1] == 'M') return detail::parse_bmp(bytes);
    throw ParseError("magic", "unsupported format (expected P2, P5 or BM)");
}

inline Raster read_raster(const std::string& path) {
    const auto bytes = detail::read_file(path);
    return parse_raster(bytes);
}

/// Throws DimensionError for non-square rasters.
inline GrayImage to_gray_image(const Raster& r) {
    if (r.width != r.height) throw DimensionError("image must be square; height", r.width, r.height);
    return GrayImage(r.width, r.pixels);
}

inline GrayImage load_gray(const std::string& path) { return to_gray_image(read_raster(path)); }

enum class PgmEncoding { Binary, Ascii };

/// Quantize: clamp to [0, 255] and round half away from zero. Otherwise the
/// values are first mapped affinely so min -> 0 and max -> 255 (a constant
/// image maps to 0).
template <class Tag>
std::vector<std::uint8_t> to_bytes(const SquareGrid<Tag>& img, bool quantize) {
    const auto v = img.values();
    std::vector<std::uint8_t> out(v.size());
    double lo = 0.0, hi = 0.0;
    if (!quantize && !v.empty()) {
        const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        lo = *mn;
        hi = *mx;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        double x = v[i];
        if (!quantize) x = hi > lo ? (x - lo) * 255.0 / (hi - lo) : 0.0;
        x = std::round(std::clamp(x, 0.0, 255.0));
        out[i] = static_cast<std::uint8_t>(x);
    }
    return out;
}

template <class Tag>
std::vector<std::uint8_t> encode_pgm(const SquareGrid<Tag>& img, bool quantize,
                                     PgmEncoding enc = PgmEncoding::Binary) {
    const std::size_t n = img.order();
    const auto px = to_bytes(img, quantize);
    std::string header = (enc == PgmEncoding::Binary ? "P5\n" : "P2\n") + std::to_string(n) + " " +
                         std::to_string(n) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    if (enc == PgmEncoding::Binary) {
        out.insert(out.end(), px.begin(), px.end());
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::string line;
        for (std::size_t j = 0; j < n; ++j) {
            if (j) line += ' ';
            line += std::to_string(px[i * n + j]);
        }
        line += '\n';
        out.insert(out.end(), line.begin(), line.end());
    }
    return out;
}

template <class Tag>
void save_pgm(const SquareGrid<Tag>& img, const std::string& path, bool quantize,
              PgmEncoding enc = PgmEncoding::Binary) {
    detail::write_file(path, encode_pgm(img, quantize, enc));
}

/// Bottom-up 8-bit BMP with a linear gray palette; pixels quantized.
template <class Tag>
std::vector<std::uint8_t> encode_bmp8(const SquareGrid<Tag>& img) {
    const std::size_t n = img.order();
    const auto px = to_bytes(img, true);
    const std::size_t stride = (n + 3) & ~std::size_t{3};
    const std::uint32_t data_offset = 14 + 40 + 256 * 4;
    const std::size_t size = data_offset + stride * n;
    std::vector<std::uint8_t> b(size, 0);
    auto put32 = [&](std::size_t at, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) b[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
    };
    auto put16 = [&](std::size_t at, std::uint16_t v) {
        b[at] = static_cast<std::uint8_t>(v);
        b[at + 1] = static_cast<std::uint8_t>(v >> 8);
    };
    b[0] = 'B';
    b[1] = 'M';
    put32(2, static_cast<std::uint32_t>(size));
    put32(10, data_offset);
    put32(14, 40);
    put32(18, static_cast<std::uint32_t>(n));
    put32(22, static_cast<std::uint32_t>(n));
    put16(26, 1);
    put16(28, 8);
    put32(34, static_cast<std::uint32_t>(stride * n));
    put32(46, 256);
    for (std::uint32_t i = 0; i < 256; ++i) {
        b[54 + 4 * i] = b[54 + 4 * i + 1] = b[54 + 4 * i + 2] = static_cast<std::uint8_t>(i);
    }
    for (std::size_t row = 0; row < n; ++row)
        for (std::size_t x = 0; x < n; ++x) b[data_offset + (n - 1 - row) * stride + x] = px[row * n + x];
    return b;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Header `n,mu`, one row per point, mu with 12 significant digits.
inline std::string format_csv(const NormCurve& c) {
    std::string out = "n,mu\n";
    for (const NormPoint& p : c.points()) out += std::to_string(p.n) + "," + format_g12(p.mu) + "\n";
    return out;
}

inline void write_csv(const NormCurve& c, const std::string& path) {
    const std::string s = format_csv(c);
    detail::write_file(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

/// Parses the format written by format_csv. Throws ParseError.
inline NormCurve parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("header", "missing");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "n,mu") throw ParseError("header", "expected 'n,mu'");
    NormCurve c;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("row " + std::to_string(lineno), "expected n,mu");
        try {
            std::size_t used = 0;
            const unsigned long n = std::stoul(line.substr(0, comma), &used);
            if (used != comma) throw std::invalid_argument("n");
            const std::string mu_s = line.substr(comma + 1);
            const double mu = std::stod(mu_s, &used);
            if (used != mu_s.size()) throw std::invalid_argument("mu");
            c.push_back(NormPoint{n, mu, std::nullopt});
        } catch (const std::exception& e) {
            throw ParseError("row " + std::to_string(lineno), e.what());
        }
    }
    return c;
}

inline NormCurve read_csv(const std::string& path) {
    const auto bytes = detail::read_file(path);
    return parse_csv(std::string(bytes.begin(), bytes.end()));
}

} // namespace rht
