#include "gcocr/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "gcocr/errors.hpp"

namespace gcocr {

GrayImage::GrayImage(std::size_t w, std::size_t h, std::uint32_t max)
    : width(w), height(h), maxval(max), pixels(w * h, 0) {}

GrayImage::GrayImage(std::size_t w, std::size_t h, std::uint32_t max, std::vector<std::uint32_t> px)
    : width(w), height(h), maxval(max), pixels(std::move(px)) {
    if (w == 0 || h == 0) throw ShapeError("image dimensions must be non-zero");
    if (pixels.size() != w * h) throw ShapeError("pixel count does not match width x height");
}

BinaryImage::BinaryImage(std::size_t w, std::size_t h) : width(w), height(h), pixels(w * h, 0) {}

BinaryImage::BinaryImage(std::size_t w, std::size_t h, std::vector<std::uint8_t> px)
    : width(w), height(h), pixels(std::move(px)) {
    if (pixels.size() != w * h) throw ShapeError("pixel count does not match width x height");
    for (auto v : pixels)
        if (v > 1) throw ShapeError("binary image pixels must be 0 or 1");
}

std::size_t BinaryImage::ink_count() const {
    return static_cast<std::size_t>(std::count(pixels.begin(), pixels.end(), std::uint8_t{1}));
}

AffineTransform AffineTransform::inverse() const {
    const double det = determinant();
    if (det == 0.0 || !std::isfinite(det)) throw ParameterError("affine transform is not invertible");
    AffineTransform r;
    r.m00 = m11 / det;
    r.m01 = -m01 / det;
    r.m10 = -m10 / det;
    r.m11 = m00 / det;
    r.m02 = -(r.m00 * m02 + r.m01 * m12);
    r.m12 = -(r.m10 * m02 + r.m11 * m12);
    return r;
}

AffineTransform AffineTransform::then(const AffineTransform& n) const {
    AffineTransform r;
    r.m00 = n.m00 * m00 + n.m01 * m10;
    r.m01 = n.m00 * m01 + n.m01 * m11;
    r.m02 = n.m00 * m02 + n.m01 * m12 + n.m02;
    r.m10 = n.m10 * m00 + n.m11 * m10;
    r.m11 = n.m10 * m01 + n.m11 * m11;
    r.m12 = n.m10 * m02 + n.m11 * m12 + n.m12;
    return r;
}

// ---------------------------------------------------------------------------
// PGM

namespace {

class PgmReader {
public:
    explicit PgmReader(const std::string& bytes) : data_(bytes) {}

    std::size_t pos() const { return pos_; }

    void skip_space_and_comments() {
        while (pos_ < data_.size()) {
            const char c = data_[pos_];
            if (c == '#') {
                while (pos_ < data_.size() && data_[pos_] != '\n' && data_[pos_] != '\r') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::uint64_t read_uint(const char* what) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        if (pos_ >= data_.size()) throw ParseError(std::string("unexpected end of file reading ") + what, pos_);
        std::uint64_t v = 0;
        while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
            v = v * 10 + static_cast<std::uint64_t>(data_[pos_] - '0');
            if (v > std::numeric_limits<std::uint32_t>::max())
                throw ParseError(std::string(what) + " is too large", start);
            ++pos_;
        }
        if (pos_ == start) throw ParseError(std::string("expected ") + what, start);
        if (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_])) && data_[pos_] != '#')
            throw ParseError(std::string("malformed ") + what, pos_);
        return v;
    }

    // Exactly one whitespace byte separates maxval from a binary raster.
    void expect_single_space() {
        if (pos_ >= data_.size() || !std::isspace(static_cast<unsigned char>(data_[pos_])))
            throw ParseError("expected whitespace before raster", pos_);
        ++pos_;
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    unsigned char byte() { return static_cast<unsigned char>(data_[pos_++]); }

private:
    const std::string& data_;
    std::size_t pos_ = 0;
};

}  // namespace

GrayImage parse_pgm(const std::string& bytes) {
    if (bytes.empty()) throw ParseError("empty PGM stream", 0);
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
        throw ParseError("bad magic number, expected P2 or P5", 0);
    const bool ascii = bytes[1] == '2';

    PgmReader in(bytes);
    in.byte();
    in.byte();
    const std::size_t width_at = in.pos();
    const auto width = in.read_uint("width");
    const auto height = in.read_uint("height");
    if (width == 0 || height == 0) throw ParseError("image dimensions must be non-zero", width_at);
    const std::size_t maxval_at = in.pos();
    const auto maxval = in.read_uint("maxval");
    if (maxval == 0 || maxval > 65535) throw ParseError("maxval must be in 1..65535", maxval_at);

    const std::size_t count = width * height;
    std::vector<std::uint32_t> px(count);
    if (ascii) {
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t at = in.pos();
            const auto v = in.read_uint("pixel value");
            if (v > maxval) throw ParseError("pixel value exceeds maxval", at);
            px[i] = static_cast<std::uint32_t>(v);
        }
    } else {
        in.expect_single_space();
        const std::size_t bpp = maxval > 255 ? 2 : 1;
        if (in.remaining() < count * bpp) throw ParseError("truncated raster", in.pos() + in.remaining());
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t at = in.pos();
            std::uint32_t v = in.byte();
            if (bpp == 2) v = (v << 8) | in.byte();
            if (v > maxval) throw ParseError("pixel value exceeds maxval", at);
            px[i] = v;
        }
    }
    return GrayImage(width, height, static_cast<std::uint32_t>(maxval), std::move(px));
}

GrayImage load_pgm(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    try {
        return parse_pgm(bytes);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.offset());
    }
}

std::string encode_pgm(const GrayImage& img, PgmFormat format) {
    if (img.maxval == 0 || img.maxval > 65535) throw ParameterError("maxval must be in 1..65535");
    std::ostringstream out;
    out << (format == PgmFormat::ascii ? "P2" : "P5") << '\n'
        << img.width << ' ' << img.height << '\n'
        << img.maxval << '\n';
    if (format == PgmFormat::ascii) {
        for (std::size_t r = 0; r < img.height; ++r) {
            for (std::size_t c = 0; c < img.width; ++c) {
                if (c) out << ' ';
                out << img.at(r, c);
            }
            out << '\n';
        }
    } else {
        const bool wide = img.maxval > 255;
        for (auto v : img.pixels) {
            if (wide) out.put(static_cast<char>((v >> 8) & 0xff));
            out.put(static_cast<char>(v & 0xff));
        }
    }
    return out.str();
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path, PgmFormat format) {
    const std::string bytes = encode_pgm(img, format);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

GrayImage to_gray(const BinaryImage& img) {
    GrayImage g(img.width, img.height, 255);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) g.pixels[i] = img.pixels[i] ? 255u : 0u;
    return g;
}

void save_pgm(const BinaryImage& img, const std::filesystem::path& path) {
    save_pgm(to_gray(img), path, PgmFormat::binary);
}

// ---------------------------------------------------------------------------
// binarization

std::uint64_t packed_rgb_intensity(std::uint32_t value, std::uint32_t maxval) {
    const std::uint64_t g = (static_cast<std::uint64_t>(value) * 255 + maxval / 2) / maxval;
    return (g << 16) | (g << 8) | g;
}

BinaryImage binarize(const GrayImage& img, std::uint64_t threshold) {
    BinaryImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) out.pixels[i] = img.pixels[i] >= threshold ? 1 : 0;
    return out;
}

BinaryImage binarize(const GrayImage& img, const ThresholdConfig& cfg) {
    BinaryImage out(img.width, img.height);
    if (cfg.mode == IntensityMode::direct) {
        const std::uint64_t t = cfg.threshold.value_or((static_cast<std::uint64_t>(img.maxval) + 1) / 2);
        for (std::size_t i = 0; i < img.pixels.size(); ++i)
            out.pixels[i] = (img.pixels[i] >= t) != cfg.invert ? 1 : 0;
    } else {
        const std::uint64_t t = cfg.threshold.value_or(packed_rgb_intensity(128, 255));
        for (std::size_t i = 0; i < img.pixels.size(); ++i)
            out.pixels[i] = (packed_rgb_intensity(img.pixels[i], img.maxval) >= t) != cfg.invert ? 1 : 0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// geometry

BoundingBox bounding_box(const BinaryImage& img) {
    BoundingBox box{img.height, 0, img.width, 0};
    bool any = false;
    for (std::size_t r = 0; r < img.height; ++r) {
        for (std::size_t c = 0; c < img.width; ++c) {
            if (!img.at(r, c)) continue;
            any = true;
            box.top = std::min(box.top, r);
            box.bottom = std::max(box.bottom, r);
            box.left = std::min(box.left, c);
            box.right = std::max(box.right, c);
        }
    }
    if (!any) throw EmptyGlyphError();
    return box;
}

BinaryImage crop(const BinaryImage& img, const BoundingBox& box) {
    if (box.top > box.bottom || box.left > box.right || box.bottom >= img.height || box.right >= img.width)
        throw RangeError("crop box outside image bounds");
    BinaryImage out(box.width(), box.height());
    for (std::size_t r = 0; r < out.height; ++r)
        for (std::size_t c = 0; c < out.width; ++c) out.at(r, c) = img.at(r + box.top, c + box.left);
    return out;
}

BinaryImage scale_to(const BinaryImage& img, std::size_t target_w, std::size_t target_h) {
    if (target_w == 0 || target_h == 0) throw RangeError("scale target must be at least 1x1");
    if (img.width == 0 || img.height == 0) throw RangeError("cannot scale an empty image");
    const auto inv = AffineTransform::scaling(static_cast<double>(img.width) / static_cast<double>(target_w),
                                              static_cast<double>(img.height) / static_cast<double>(target_h));
    BinaryImage out(target_w, target_h);
    const auto clamp_index = [](double v, std::size_t n) {
        const double f = std::floor(v);
        if (f < 0) return std::size_t{0};
        return std::min(static_cast<std::size_t>(f), n - 1);
    };
    for (std::size_t r = 0; r < target_h; ++r) {
        for (std::size_t c = 0; c < target_w; ++c) {
            const auto p = inv.apply(static_cast<double>(c) + 0.5, static_cast<double>(r) + 0.5);
            out.at(r, c) = img.at(clamp_index(p.y, img.height), clamp_index(p.x, img.width));
        }
    }
    return out;
}

}  // namespace gcocr
