#include "gcocr/features.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "gcocr/errors.hpp"

namespace gcocr {

std::vector<Span> partition(std::size_t n, std::size_t k) {
    if (k == 0 || k > n) throw RangeError("cannot split " + std::to_string(n) + " into " + std::to_string(k) + " ranges");
    std::vector<Span> spans;
    spans.reserve(k);
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t at = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t len = base + (i < extra ? 1 : 0);
        spans.push_back({at, at + len});
        at += len;
    }
    return spans;
}

SegmentGrid segment_grid(std::size_t width, std::size_t height, std::size_t k) {
    if (k == 0) throw RangeError("segment side count must be at least 1");
    if (k > std::min(width, height)) throw RangeError("segment side count exceeds image size");
    return {k, partition(height, k), partition(width, k)};
}

double gc_of_segment(const BinaryImage& img, const Segment& seg) {
    if (seg.rows.end > img.height || seg.cols.end > img.width) throw RangeError("segment outside image bounds");
    long sum = 0;
    std::optional<std::size_t> prev;
    for (std::size_t r = seg.rows.begin; r < seg.rows.end; ++r) {
        std::optional<std::size_t> first;
        for (std::size_t c = seg.cols.begin; c < seg.cols.end; ++c) {
            if (img.at(r, c)) {
                first = c;
                break;
            }
        }
        if (first && prev) sum += static_cast<long>(*first) - static_cast<long>(*prev);
        prev = first;
    }
    return static_cast<double>(sum);
}

FeatureVector extract_features(const BinaryImage& img, std::size_t k) {
    const auto grid = segment_grid(img.width, img.height, k);
    FeatureVector v;
    v.k = k;
    v.values.resize(grid.count());
    for (std::size_t s = 0; s < grid.count(); ++s) v.values[s] = gc_of_segment(img, grid.segment(s));
    return v;
}

FeatureVector normalize(const FeatureVector& v, double half_range) {
    if (v.normalized) throw ParameterError("feature vector is already normalized");
    if (!(half_range > 0.0) || !std::isfinite(half_range)) throw ParameterError("normalization half-range must be positive");
    FeatureVector out = v;
    for (auto& x : out.values) x = std::clamp((x + half_range) / (2.0 * half_range), 0.0, 1.0);
    out.normalized = true;
    out.factor = half_range;
    return out;
}

}  // namespace gcocr
