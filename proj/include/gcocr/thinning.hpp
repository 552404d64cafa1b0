#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "gcocr/image.hpp"

namespace gcocr {

// 3x3 neighbourhood around a centre pixel P1; p[k-1] holds Pk and
// operator[] takes the 1-based k directly.
//
//   P3 P2 P9
//   P4 P1 P8
//   P5 P6 P7
//
// P2 = north, P4 = west, P6 = south, P8 = east.
struct Neighborhood {
    std::array<std::uint8_t, 9> p{};

    std::uint8_t operator[](int k) const { return p[static_cast<std::size_t>(k - 1)]; }
    std::uint8_t& operator[](int k) { return p[static_cast<std::size_t>(k - 1)]; }

    // Pixels outside the image read as 0.
    static Neighborhood at(const BinaryImage& img, std::ptrdiff_t row, std::ptrdiff_t col);
};

// 0 -> 1 transitions along P2, P3, ..., P9, P2.
int zo_count(const Neighborhood& n);

// Ink neighbours among P2..P9.
int nz_count(const Neighborhood& n);

// Deletion test for an ink pixel at (row, col), evaluated against the current
// state of img. ZO(P2) and ZO(P4) are taken on the neighbourhoods centred at
// the north and west neighbours.
bool deletable(const BinaryImage& img, std::ptrdiff_t row, std::ptrdiff_t col);

// Rule check from the neighbourhood alone. zo_north / zo_west are ZO of the
// neighbourhoods centred at P2 / P4.
bool deletable(const Neighborhood& n, int zo_north, int zo_west);

enum class ThinningSchedule {
    // Raster scan, each deletion is visible to every later test in the pass.
    sequential,
    // Candidates are those deletable at the start of the pass; each is deleted
    // in raster order only if it is still deletable at that moment. Peels one
    // border layer per pass.
    layered,
    // Mark every deletable pixel against the pass-start image, then remove all
    // marks at once.
    parallel,
};

struct ThinningStats {
    std::size_t passes = 0;
    std::size_t deleted = 0;
};

BinaryImage thin(const BinaryImage& img, ThinningSchedule schedule = ThinningSchedule::sequential,
                 ThinningStats* stats = nullptr);

}  // namespace gcocr
