#include <gtest/gtest.h>

#include "gcocr/errors.hpp"
#include "gcocr/features.hpp"
#include "oracles.hpp"

using namespace gcocr;

namespace {

std::vector<std::size_t> sizes(const std::vector<Span>& spans) {
    std::vector<std::size_t> out;
    for (const auto& s : spans) out.push_back(s.size());
    return out;
}

Segment whole(const BinaryImage& img) { return {{0, img.height}, {0, img.width}}; }

}  // namespace

TEST(Partition, ExactDivision) {
    const auto grid = segment_grid(100, 100, 4);
    EXPECT_EQ(grid.count(), 16u);
    for (std::size_t i = 0; i < grid.count(); ++i) {
        EXPECT_EQ(grid.segment(i).rows.size(), 25u);
        EXPECT_EQ(grid.segment(i).cols.size(), 25u);
    }
}

TEST(Partition, RemainderGoesToLeadingRanges) {
    EXPECT_EQ(sizes(partition(100, 3)), (std::vector<std::size_t>{34, 33, 33}));
    EXPECT_EQ(sizes(partition(100, 6)), (std::vector<std::size_t>{17, 17, 17, 17, 16, 16}));
    const auto grid = segment_grid(100, 100, 3);
    EXPECT_EQ(sizes(grid.row_spans), (std::vector<std::size_t>{34, 33, 33}));
    EXPECT_EQ(sizes(grid.col_spans), (std::vector<std::size_t>{34, 33, 33}));
}

TEST(Partition, MatchesOracleAndTiles) {
    for (std::size_t n = 1; n <= 60; ++n)
        for (std::size_t k = 1; k <= n; ++k) {
            const auto parts = partition(n, k);
            ASSERT_EQ(parts.size(), k);
            std::size_t at = 0;
            for (std::size_t i = 0; i < k; ++i) {
                const std::size_t expect = n / k + (i < n % k ? 1 : 0);
                ASSERT_EQ(parts[i].begin, at);
                ASSERT_EQ(parts[i].size(), expect);
                at = parts[i].end;
            }
            ASSERT_EQ(at, n);
        }
}

TEST(Partition, UnitSegments) {
    const auto grid = segment_grid(5, 5, 5);
    EXPECT_EQ(grid.count(), 25u);
    EXPECT_EQ(grid.segment(24).rows, (Span{4, 5}));
    EXPECT_EQ(grid.segment(24).cols, (Span{4, 5}));
}

TEST(Partition, RejectsBadSide) {
    EXPECT_THROW(partition(10, 0), RangeError);
    EXPECT_THROW(partition(3, 4), RangeError);
}

TEST(Gc, VerticalStrokeIsZero) {
    BinaryImage img(10, 10);
    for (std::size_t r = 0; r < 10; ++r) img.at(r, 4) = 1;
    EXPECT_EQ(gc_of_segment(img, whole(img)), 0.0);
}

TEST(Gc, DiagonalTelescopes) {
    BinaryImage img(5, 5);
    for (std::size_t r = 0; r < 5; ++r) img.at(r, r) = 1;
    EXPECT_EQ(gc_of_segment(img, whole(img)), 4.0);
    BinaryImage anti(5, 5);
    for (std::size_t r = 0; r < 5; ++r) anti.at(r, 4 - r) = 1;
    EXPECT_EQ(gc_of_segment(anti, whole(anti)), -4.0);
}

TEST(Gc, EmptySegmentIsZero) {
    BinaryImage img(8, 8);
    EXPECT_EQ(gc_of_segment(img, whole(img)), 0.0);
}

TEST(Gc, InklessRowBreaksChain) {
    BinaryImage img(6, 3);
    img.at(0, 0) = 1;
    img.at(2, 5) = 1;
    EXPECT_EQ(gc_of_segment(img, whole(img)), 0.0);
}

TEST(Gc, LeftmostIsSegmentLocal) {
    BinaryImage img(10, 2);
    img.at(0, 1) = 1;
    img.at(0, 6) = 1;
    img.at(1, 7) = 1;
    EXPECT_EQ(gc_of_segment(img, whole(img)), 6.0);
    EXPECT_EQ(gc_of_segment(img, {{0, 2}, {5, 10}}), 1.0);
}

TEST(Gc, MatchesBruteForceOnRandomSegments) {
    std::mt19937 rng(11);
    std::uniform_int_distribution<std::size_t> dim(1, 30);
    std::uniform_real_distribution<double> dens(0.0, 0.6);
    for (int t = 0; t < 200; ++t) {
        const std::size_t w = dim(rng), h = dim(rng);
        std::bernoulli_distribution ink(dens(rng));
        BinaryImage img(w, h);
        for (auto& p : img.pixels) p = ink(rng);
        std::uniform_int_distribution<std::size_t> rr(0, h), cc(0, w);
        std::size_t r0 = rr(rng), r1 = rr(rng), c0 = cc(rng), c1 = cc(rng);
        if (r0 > r1) std::swap(r0, r1);
        if (c0 > c1) std::swap(c0, c1);
        ASSERT_EQ(gc_of_segment(img, {{r0, r1}, {c0, c1}}), oracle::brute_gc(img, r0, r1, c0, c1));
    }
}

TEST(Gc, FullyInkedRowsTelescope) {
    std::mt19937 rng(5);
    for (int t = 0; t < 50; ++t) {
        BinaryImage img(20, 15);
        std::uniform_int_distribution<std::size_t> col(0, 19);
        std::vector<std::size_t> first(15);
        for (std::size_t r = 0; r < 15; ++r) {
            first[r] = col(rng);
            for (std::size_t c = first[r]; c < 20; ++c) img.at(r, c) = 1;
        }
        EXPECT_EQ(gc_of_segment(img, whole(img)),
                  static_cast<double>(first.back()) - static_cast<double>(first.front()));
    }
}

TEST(Gc, ShiftInvariantAndBounded) {
    BinaryImage img(30, 20), shifted(30, 20);
    std::mt19937 rng(3);
    std::uniform_int_distribution<std::size_t> col(0, 19);
    for (std::size_t r = 0; r < 20; ++r) {
        const auto c = col(rng);
        img.at(r, c) = 1;
        shifted.at(r, c + 7) = 1;
    }
    const double g = gc_of_segment(img, whole(img));
    EXPECT_EQ(g, gc_of_segment(shifted, whole(shifted)));
    EXPECT_LE(std::abs(g), 19.0 * 29.0);
}

TEST(Features, LengthMatchesGrid) {
    BinaryImage img(100, 100);
    for (std::size_t k : {3, 4, 5}) {
        const auto v = extract_features(img, k);
        EXPECT_EQ(v.values.size(), k * k);
        EXPECT_FALSE(v.normalized);
        for (double x : v.values) EXPECT_EQ(x, 0.0);
    }
}

TEST(Features, MatchesPerSegmentOracle) {
    std::mt19937 rng(17);
    std::bernoulli_distribution ink(0.1);
    BinaryImage img(100, 100);
    for (auto& p : img.pixels) p = ink(rng);
    for (std::size_t k : {3, 4, 5}) {
        const auto v = extract_features(img, k);
        const auto grid = segment_grid(100, 100, k);
        for (std::size_t i = 0; i < grid.count(); ++i) {
            const auto s = grid.segment(i);
            EXPECT_EQ(v.values[i], oracle::brute_gc(img, s.rows.begin, s.rows.end, s.cols.begin, s.cols.end));
        }
    }
}

TEST(Normalize, CentreEndpointsAndClamp) {
    FeatureVector v{1, {0, 30, -30, 45, -100, 15}, false, 0};
    const auto n = normalize(v, 30);
    EXPECT_TRUE(n.normalized);
    EXPECT_EQ(n.factor, 30.0);
    EXPECT_EQ(n.values, (std::vector<double>{0.5, 1.0, 0.0, 1.0, 0.0, 0.75}));
}

TEST(Normalize, Rejects) {
    FeatureVector v{1, {0}, false, 0};
    EXPECT_THROW(normalize(v, 0), ParameterError);
    EXPECT_THROW(normalize(v, -1), ParameterError);
    EXPECT_THROW(normalize(normalize(v, 30), 30), ParameterError);
}
