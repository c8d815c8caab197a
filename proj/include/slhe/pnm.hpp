#pragma once

// Binary PNM (P5 grayscale / P6 color) codec. Decoding accepts arbitrary
// header whitespace and '#' comments; encoding emits one canonical header
// form so encode(decode(x)) is byte-identical on canonical files.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "slhe/image.hpp"

namespace slhe {

struct PnmError : std::runtime_error {
    enum class Kind { format, dimension, truncation, unsupported_depth };
    Kind kind;
    PnmError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

struct PnmImage {
    std::variant<ImagePlane, ColorImage> image;
    int maxval = 255;

    bool is_color() const { return std::holds_alternative<ColorImage>(image); }
    const ImagePlane& plane() const { return std::get<ImagePlane>(image); }
    const ColorImage& color() const { return std::get<ColorImage>(image); }
};

namespace detail {

class PnmHeaderReader {
public:
    explicit PnmHeaderReader(std::span<const unsigned char> b) : bytes_(b) {}

    // Whitespace- and comment-skipping token reader.
    std::string token() {
        skip_separators();
        if (pos_ >= bytes_.size())
            throw PnmError(PnmError::Kind::format, "pnm: truncated header");
        std::string t;
        while (pos_ < bytes_.size() && !is_space(bytes_[pos_]) && bytes_[pos_] != '#')
            t.push_back(static_cast<char>(bytes_[pos_++]));
        if (t.empty()) throw PnmError(PnmError::Kind::format, "pnm: malformed header");
        return t;
    }

    long number(const char* what) {
        std::string t = token();
        for (char c : t)
            if (c < '0' || c > '9')
                throw PnmError(PnmError::Kind::format,
                               std::string("pnm: non-numeric ") + what + " '" + t + "'");
        if (t.size() > 9) throw PnmError(PnmError::Kind::format, "pnm: oversized number");
        return std::stol(t);
    }

    // Consumes the single separator byte that precedes the raster.
    std::size_t raster_offset() {
        while (pos_ < bytes_.size() && bytes_[pos_] == '#') skip_comment();
        if (pos_ >= bytes_.size() || !is_space(bytes_[pos_]))
            throw PnmError(PnmError::Kind::format, "pnm: missing raster separator");
        return pos_ + 1;
    }

private:
    static bool is_space(unsigned char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    }
    void skip_comment() {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
    }
    void skip_separators() {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) { ++pos_; continue; }
            if (bytes_[pos_] == '#') { skip_comment(); continue; }
            break;
        }
    }

    std::span<const unsigned char> bytes_;
    std::size_t pos_ = 0;
};

inline double sample_at(std::span<const unsigned char> raster, std::size_t i, int maxval) {
    if (maxval == 255) return raster[i] / 255.0;
    // 16-bit samples are big-endian per PNM convention.
    std::uint16_t v = static_cast<std::uint16_t>((raster[2 * i] << 8) | raster[2 * i + 1]);
    return v / 65535.0;
}

inline void check_maxval(long maxval) {
    if (maxval != 255 && maxval != 65535)
        throw PnmError(PnmError::Kind::unsupported_depth,
                       "pnm: unsupported maxval " + std::to_string(maxval) +
                           " (only 255 and 65535)");
}

inline unsigned quantize(double sample, int maxval) {
    // Round half up, then clamp.
    double q = std::floor(sample * maxval + 0.5);
    if (q < 0.0) q = 0.0;
    if (q > maxval) q = maxval;
    return static_cast<unsigned>(q);
}

inline void put_sample(std::vector<unsigned char>& out, double sample, int maxval) {
    unsigned q = quantize(sample, maxval);
    if (maxval == 255) {
        out.push_back(static_cast<unsigned char>(q));
    } else {
        out.push_back(static_cast<unsigned char>(q >> 8));
        out.push_back(static_cast<unsigned char>(q & 0xff));
    }
}

inline std::string header(const char* magic, int w, int h, int maxval) {
    return std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n" +
           std::to_string(maxval) + "\n";
}

}  // namespace detail

inline PnmImage decode_pnm(std::span<const unsigned char> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
        throw PnmError(PnmError::Kind::format, "pnm: bad magic (need P5 or P6)");
    bool color = bytes[1] == '6';

    detail::PnmHeaderReader hdr(bytes);
    std::string magic = hdr.token();
    if (magic != "P5" && magic != "P6")
        throw PnmError(PnmError::Kind::format, "pnm: bad magic token");

    long w = hdr.number("width");
    long h = hdr.number("height");
    if (w <= 0 || h <= 0)
        throw PnmError(PnmError::Kind::dimension, "pnm: width and height must be positive");
    long maxval = hdr.number("maxval");
    detail::check_maxval(maxval);

    std::size_t off = hdr.raster_offset();
    int channels = color ? 3 : 1;
    int bps = maxval == 255 ? 1 : 2;
    std::size_t need = static_cast<std::size_t>(w) * h * channels * bps;
    if (bytes.size() - off < need)
        throw PnmError(PnmError::Kind::truncation, "pnm: raster shorter than header implies");
    std::span<const unsigned char> raster = bytes.subspan(off, need);

    PnmImage out;
    out.maxval = static_cast<int>(maxval);
    if (color) {
        ColorImage img(static_cast<int>(w), static_cast<int>(h), static_cast<int>(maxval));
        for (std::size_t i = 0; i < img.rgb.size(); ++i)
            img.rgb[i] = detail::sample_at(raster, i, out.maxval);
        out.image = std::move(img);
    } else {
        ImagePlane img(static_cast<int>(w), static_cast<int>(h));
        for (std::size_t i = 0; i < img.samples.size(); ++i)
            img.samples[i] = detail::sample_at(raster, i, out.maxval);
        out.image = std::move(img);
    }
    return out;
}

inline std::vector<unsigned char> encode_pnm(const ImagePlane& img, int maxval) {
    detail::check_maxval(maxval);
    std::string hdr = detail::header("P5", img.width, img.height, maxval);
    std::vector<unsigned char> out(hdr.begin(), hdr.end());
    out.reserve(out.size() + img.samples.size() * (maxval == 255 ? 1 : 2));
    for (double s : img.samples) detail::put_sample(out, s, maxval);
    return out;
}

inline std::vector<unsigned char> encode_pnm(const ColorImage& img, int maxval) {
    detail::check_maxval(maxval);
    std::string hdr = detail::header("P6", img.width, img.height, maxval);
    std::vector<unsigned char> out(hdr.begin(), hdr.end());
    out.reserve(out.size() + img.rgb.size() * (maxval == 255 ? 1 : 2));
    for (double s : img.rgb) detail::put_sample(out, s, maxval);
    return out;
}

inline std::vector<unsigned char> encode_pnm(const PnmImage& img) {
    if (img.is_color()) return encode_pnm(img.color(), img.maxval);
    return encode_pnm(img.plane(), img.maxval);
}

}  // namespace slhe
