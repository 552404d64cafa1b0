#pragma once

#include <cstddef>
#include <vector>

#include "gcocr/image.hpp"

namespace gcocr {

// Half-open index range [begin, end).
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
    bool operator==(const Span&) const = default;
};

struct Segment {
    Span rows;
    Span cols;
};

// k x k partition of a raster. Sizes differ by at most one; the leading
// ranges take the remainder.
struct SegmentGrid {
    std::size_t k = 0;
    std::vector<Span> row_spans;
    std::vector<Span> col_spans;

    std::size_t count() const { return k * k; }
    // Row-major segment order.
    Segment segment(std::size_t index) const { return {row_spans[index / k], col_spans[index % k]}; }
};

std::vector<Span> partition(std::size_t n, std::size_t k);
SegmentGrid segment_grid(std::size_t width, std::size_t height, std::size_t k);

// Signed gradient change of one segment: the sum over consecutive row pairs
// (both inked within the segment) of col(B[i+1]) - col(B[i]), B being the
// leftmost ink pixel of the row inside the segment's columns. A row without
// ink breaks the chain.
double gc_of_segment(const BinaryImage& img, const Segment& seg);

struct FeatureVector {
    std::size_t k = 0;
    std::vector<double> values;
    bool normalized = false;
    // Half-range A of the +(A/2A) map; 0 while unnormalized.
    double factor = 0.0;
};

FeatureVector extract_features(const BinaryImage& img, std::size_t k);

// x -> clamp((x + A) / (2A), 0, 1).
FeatureVector normalize(const FeatureVector& v, double half_range);

}  // namespace gcocr
