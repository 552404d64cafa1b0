#include "gcocr/thinning.hpp"

#include <vector>

namespace gcocr {

Neighborhood Neighborhood::at(const BinaryImage& img, std::ptrdiff_t r, std::ptrdiff_t c) {
    Neighborhood n;
    n[1] = img.get(r, c);
    n[2] = img.get(r - 1, c);
    n[3] = img.get(r - 1, c - 1);
    n[4] = img.get(r, c - 1);
    n[5] = img.get(r + 1, c - 1);
    n[6] = img.get(r + 1, c);
    n[7] = img.get(r + 1, c + 1);
    n[8] = img.get(r, c + 1);
    n[9] = img.get(r - 1, c + 1);
    return n;
}

int zo_count(const Neighborhood& n) {
    int count = 0;
    for (int k = 2; k <= 9; ++k) {
        const int next = k == 9 ? 2 : k + 1;
        if (n[k] == 0 && n[next] == 1) ++count;
    }
    return count;
}

int nz_count(const Neighborhood& n) {
    int count = 0;
    for (int k = 2; k <= 9; ++k) count += n[k];
    return count;
}

bool deletable(const Neighborhood& n, int zo_north, int zo_west) {
    const int nz = nz_count(n);
    if (nz < 2 || nz > 6) return false;
    if (zo_count(n) != 1) return false;
    if (n[2] * n[4] * n[8] != 0 && zo_north == 1) return false;
    if (n[2] * n[4] * n[6] != 0 && zo_west == 1) return false;
    return true;
}

bool deletable(const BinaryImage& img, std::ptrdiff_t r, std::ptrdiff_t c) {
    const auto n = Neighborhood::at(img, r, c);
    if (n[1] != 1) return false;
    // The ZO guards are only consulted when the matching product is non-zero.
    const int zo_north = (n[2] && n[4] && n[8]) ? zo_count(Neighborhood::at(img, r - 1, c)) : 0;
    const int zo_west = (n[2] && n[4] && n[6]) ? zo_count(Neighborhood::at(img, r, c - 1)) : 0;
    return deletable(n, zo_north, zo_west);
}

namespace {

std::size_t pass_sequential(BinaryImage& img) {
    std::size_t removed = 0;
    for (std::size_t r = 0; r < img.height; ++r) {
        for (std::size_t c = 0; c < img.width; ++c) {
            const auto rr = static_cast<std::ptrdiff_t>(r);
            const auto cc = static_cast<std::ptrdiff_t>(c);
            if (img.at(r, c) && deletable(img, rr, cc)) {
                img.at(r, c) = 0;
                ++removed;
            }
        }
    }
    return removed;
}

std::vector<std::size_t> candidates(const BinaryImage& img) {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < img.height; ++r)
        for (std::size_t c = 0; c < img.width; ++c)
            if (img.at(r, c) && deletable(img, static_cast<std::ptrdiff_t>(r), static_cast<std::ptrdiff_t>(c)))
                out.push_back(r * img.width + c);
    return out;
}

std::size_t pass_layered(BinaryImage& img) {
    std::size_t removed = 0;
    for (const auto idx : candidates(img)) {
        const auto r = static_cast<std::ptrdiff_t>(idx / img.width);
        const auto c = static_cast<std::ptrdiff_t>(idx % img.width);
        if (deletable(img, r, c)) {
            img.pixels[idx] = 0;
            ++removed;
        }
    }
    return removed;
}

std::size_t pass_parallel(BinaryImage& img) {
    const auto marked = candidates(img);
    for (const auto idx : marked) img.pixels[idx] = 0;
    return marked.size();
}

}  // namespace

BinaryImage thin(const BinaryImage& img, ThinningSchedule schedule, ThinningStats* stats) {
    BinaryImage out = img;
    ThinningStats local;
    for (;;) {
        std::size_t removed = 0;
        switch (schedule) {
            case ThinningSchedule::sequential: removed = pass_sequential(out); break;
            case ThinningSchedule::layered: removed = pass_layered(out); break;
            case ThinningSchedule::parallel: removed = pass_parallel(out); break;
        }
        ++local.passes;
        local.deleted += removed;
        if (removed == 0) break;
    }
    if (stats) *stats = local;
    return out;
}

}  // namespace gcocr
