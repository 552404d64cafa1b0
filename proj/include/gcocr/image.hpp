#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gcocr {

// Coordinates are (row, col) with row = y growing downward and col = x growing
// rightward, both 0-based. Pixel storage is row-major.

struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::uint32_t maxval = 255;
    std::vector<std::uint32_t> pixels;

    GrayImage() = default;
    GrayImage(std::size_t w, std::size_t h, std::uint32_t max = 255);
    GrayImage(std::size_t w, std::size_t h, std::uint32_t max, std::vector<std::uint32_t> px);

    std::uint32_t at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
    std::uint32_t& at(std::size_t row, std::size_t col) { return pixels[row * width + col]; }

    bool operator==(const GrayImage&) const = default;
};

// 1 = ink, 0 = background.
struct BinaryImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    BinaryImage() = default;
    BinaryImage(std::size_t w, std::size_t h);
    BinaryImage(std::size_t w, std::size_t h, std::vector<std::uint8_t> px);

    std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
    std::uint8_t& at(std::size_t row, std::size_t col) { return pixels[row * width + col]; }

    // Out-of-bounds reads return 0.
    std::uint8_t get(std::ptrdiff_t row, std::ptrdiff_t col) const {
        if (row < 0 || col < 0 || row >= static_cast<std::ptrdiff_t>(height) ||
            col >= static_cast<std::ptrdiff_t>(width))
            return 0;
        return pixels[static_cast<std::size_t>(row) * width + static_cast<std::size_t>(col)];
    }

    std::size_t ink_count() const;

    bool operator==(const BinaryImage&) const = default;
};

struct BoundingBox {
    std::size_t top = 0;
    std::size_t bottom = 0;
    std::size_t left = 0;
    std::size_t right = 0;

    std::size_t height() const { return bottom - top + 1; }
    std::size_t width() const { return right - left + 1; }

    bool operator==(const BoundingBox&) const = default;
};

// 2-D homogeneous mapping (x, y, 1) -> (x', y', 1):
//   x' = m00 x + m01 y + m02
//   y' = m10 x + m11 y + m12
struct AffineTransform {
    double m00 = 1, m01 = 0, m02 = 0;
    double m10 = 0, m11 = 1, m12 = 0;

    static AffineTransform scaling(double sx, double sy) { return {sx, 0, 0, 0, sy, 0}; }

    double determinant() const { return m00 * m11 - m01 * m10; }
    AffineTransform inverse() const;
    AffineTransform then(const AffineTransform& next) const;

    struct Point {
        double x;
        double y;
    };
    Point apply(double x, double y) const { return {m00 * x + m01 * y + m02, m10 * x + m11 * y + m12}; }
};

// --- PGM I/O ---------------------------------------------------------------

enum class PgmFormat { ascii /* P2 */, binary /* P5 */ };

GrayImage parse_pgm(const std::string& bytes);
GrayImage load_pgm(const std::filesystem::path& path);

// Writes the image with its own maxval, so load/save round-trips exactly.
std::string encode_pgm(const GrayImage& img, PgmFormat format = PgmFormat::binary);
void save_pgm(const GrayImage& img, const std::filesystem::path& path, PgmFormat format = PgmFormat::binary);

// Binary rasters are always written as P5, maxval 255, ink = 255.
void save_pgm(const BinaryImage& img, const std::filesystem::path& path);
GrayImage to_gray(const BinaryImage& img);

// --- binarization ----------------------------------------------------------

enum class IntensityMode {
    direct,      // compare raw intensities
    packed_rgb,  // expand to an 8-bit gray level g and compare (g<<16 | g<<8 | g)
};

struct ThresholdConfig {
    // Defaults to (maxval + 1) / 2 in direct mode. In packed_rgb mode the
    // default is the packed value of the mid gray level.
    std::optional<std::uint64_t> threshold;
    IntensityMode mode = IntensityMode::direct;
    // false: pixels >= threshold are ink (bright strokes on dark background).
    // true: pixels < threshold are ink (dark strokes on light background).
    bool invert = false;
};

std::uint64_t packed_rgb_intensity(std::uint32_t value, std::uint32_t maxval);

BinaryImage binarize(const GrayImage& img, std::uint64_t threshold);
BinaryImage binarize(const GrayImage& img, const ThresholdConfig& cfg);

// --- geometry --------------------------------------------------------------

BoundingBox bounding_box(const BinaryImage& img);
BinaryImage crop(const BinaryImage& img, const BoundingBox& box);

// Inverse nearest-neighbour mapping: each target pixel centre is sent through
// scaling(src_w / target_w, src_h / target_h) and reads the source pixel it
// lands in.
BinaryImage scale_to(const BinaryImage& img, std::size_t target_w, std::size_t target_h);

inline constexpr std::size_t kCanonicalSize = 100;

}  // namespace gcocr
