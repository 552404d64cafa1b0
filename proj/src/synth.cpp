#include "gcocr/synth.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <limits>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "gcocr/errors.hpp"

namespace gcocr {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<Point2> arc(Point2 c, double rx, double ry, double from_deg, double to_deg, std::size_t pieces) {
    std::vector<Point2> pts;
    pts.reserve(pieces + 1);
    for (std::size_t i = 0; i <= pieces; ++i) {
        const double t = (from_deg + (to_deg - from_deg) * static_cast<double>(i) / static_cast<double>(pieces)) *
                         std::numbers::pi / 180.0;
        pts.push_back({c.x + rx * std::cos(t), c.y - ry * std::sin(t)});
    }
    return pts;
}

Jitter default_jitter() {
    Jitter j;
    j.translation = 0.05;
    j.scale = 0.10;
    j.rotation = 0.10;
    j.point_noise = 0.02;
    j.stroke_min = 3.0;
    j.stroke_max = 6.0;
    return j;
}

std::vector<GlyphSpec> builtin_glyphs() {
    std::vector<GlyphSpec> g;
    const auto add = [&](std::string name, std::vector<Stroke> strokes) {
        GlyphSpec s;
        s.class_id = g.size();
        s.name = std::move(name);
        s.strokes = std::move(strokes);
        s.jitter = default_jitter();
        s.seed = s.class_id;
        g.push_back(std::move(s));
    };
    add("A", {{{0.2, 0.9}, {0.5, 0.1}, {0.8, 0.9}}, {{0.33, 0.6}, {0.67, 0.6}}});
    add("C", {arc({0.55, 0.5}, 0.3, 0.4, 50, 310)});
    add("F", {{{0.3, 0.1}, {0.3, 0.9}}, {{0.3, 0.1}, {0.75, 0.1}}, {{0.3, 0.48}, {0.65, 0.48}}});
    add("K", {{{0.28, 0.1}, {0.28, 0.9}}, {{0.75, 0.1}, {0.28, 0.58}}, {{0.44, 0.43}, {0.78, 0.9}}});
    add("L", {{{0.3, 0.1}, {0.3, 0.9}, {0.75, 0.9}}});
    add("O", {arc({0.5, 0.5}, 0.3, 0.4, 0, 360, 64)});
    {
        // Upper bowl runs anticlockwise from the right to the centre; the lower
        // bowl continues clockwise from the centre to the lower left.
        Stroke s = arc({0.5, 0.3}, 0.25, 0.2, 20, 270);
        const Stroke lower = arc({0.5, 0.7}, 0.25, 0.2, 90, -160);
        s.insert(s.end(), lower.begin() + 1, lower.end());
        add("S", {s});
    }
    add("V", {{{0.2, 0.1}, {0.5, 0.9}, {0.8, 0.1}}});
    add("X", {{{0.2, 0.1}, {0.8, 0.9}}, {{0.8, 0.1}, {0.2, 0.9}}});
    add("Z", {{{0.25, 0.1}, {0.75, 0.1}, {0.25, 0.9}, {0.75, 0.9}}});
    return g;
}

namespace {

double segment_distance(double px, double py, Point2 a, Point2 b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((px - a.x) * dx + (py - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double ex = a.x + t * dx - px, ey = a.y + t * dy - py;
    return std::sqrt(ex * ex + ey * ey);
}

// Uniform doubles and normals from a 64-bit engine, independent of the
// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace

GrayImage render(const std::vector<Stroke>& strokes, double stroke_width, const SynthOptions& opts) {
    const std::size_t n = opts.canvas;
    GrayImage img(n, n, opts.maxval);
    const double half = stroke_width / 2.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const double px = static_cast<double>(c) + 0.5, py = static_cast<double>(r) + 0.5;
            double d = std::numeric_limits<double>::infinity();
            for (const auto& s : strokes) {
                if (s.size() == 1) d = std::min(d, segment_distance(px, py, s[0], s[0]));
                for (std::size_t i = 0; i + 1 < s.size(); ++i) d = std::min(d, segment_distance(px, py, s[i], s[i + 1]));
            }
            const double cover = std::clamp(half + 0.5 - d, 0.0, 1.0);
            img.at(r, c) = static_cast<std::uint32_t>(std::lround(cover * opts.maxval));
        }
    }
    return img;
}

GrayImage render_template(const GlyphSpec& spec, double stroke_width, const SynthOptions& opts) {
    const double n = static_cast<double>(opts.canvas);
    std::vector<Stroke> placed;
    for (const auto& stroke : spec.strokes) {
        Stroke out;
        for (const auto& p : stroke) out.push_back({p.x * n, p.y * n});
        placed.push_back(std::move(out));
    }
    return render(placed, stroke_width, opts);
}

GrayImage render_instance(const GlyphSpec& spec, std::uint64_t seed, const SynthOptions& opts) {
    if (spec.strokes.empty()) throw ParameterError("glyph '" + spec.name + "' has no strokes");
    const double n = static_cast<double>(opts.canvas);
    double damping = 1.0;
    for (int attempt = 0; attempt < 10; ++attempt, damping *= 0.5) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
        const Jitter& j = spec.jitter;
        const double tx = rng.uniform(-1, 1) * j.translation * damping * n;
        const double ty = rng.uniform(-1, 1) * j.translation * damping * n;
        const double s = 1.0 + rng.uniform(-1, 1) * j.scale * damping;
        const double theta = rng.uniform(-1, 1) * j.rotation * damping;
        const double width = rng.uniform(j.stroke_min, std::max(j.stroke_min, j.stroke_max));
        const double cs = std::cos(theta), sn = std::sin(theta);

        // Per-point displacement sampled from a smooth random field so that
        // neighbouring points on a stroke move together.
        struct Wave {
            double kx, ky, phase, ax, ay;
        };
        std::array<Wave, 4> waves{};
        for (auto& w : waves) {
            const double freq = rng.uniform(0.5, 1.5) * std::numbers::pi;
            const double dir = rng.uniform(0, 2 * std::numbers::pi);
            w = {freq * std::cos(dir), freq * std::sin(dir), rng.uniform(0, 2 * std::numbers::pi), rng.normal(),
                 rng.normal()};
        }
        // Each wave contributes variance a^2 / 2; four of them give sigma^2 * 2 / 2.
        const double amp = j.point_noise * damping / std::sqrt(2.0);

        bool fits = true;
        std::vector<Stroke> placed;
        for (const auto& stroke : spec.strokes) {
            Stroke out;
            for (const auto& p : stroke) {
                double dx = 0, dy = 0;
                for (const auto& w : waves) {
                    const double s_ = std::sin(w.kx * p.x + w.ky * p.y + w.phase);
                    dx += w.ax * s_;
                    dy += w.ay * s_;
                }
                const double u = p.x - 0.5 + amp * dx;
                const double v = p.y - 0.5 + amp * dy;
                const double x = (cs * u - sn * v) * s * n + n / 2 + tx;
                const double y = (sn * u + cs * v) * s * n + n / 2 + ty;
                if (x - width / 2 < 0 || y - width / 2 < 0 || x + width / 2 > n || y + width / 2 > n) fits = false;
                out.push_back({x, y});
            }
            placed.push_back(std::move(out));
        }
        if (fits) return render(placed, width, opts);
    }
    throw Error("glyph '" + spec.name + "' does not fit the canvas after 10 attempts");
}

Dataset synth_generate(const std::vector<GlyphSpec>& specs, const SynthCounts& per_class, std::uint64_t seed,
                       const SynthOptions& opts) {
    if (specs.size() < 2) throw ParameterError("synthetic data needs at least two classes");
    if (per_class.train < 1) throw ParameterError("need at least one training sample per class");
    std::set<std::size_t> ids;
    for (const auto& s : specs) {
        if (s.class_id >= specs.size() || !ids.insert(s.class_id).second)
            throw ParameterError("glyph class ids must be a permutation of 0..n-1");
    }

    Dataset data;
    data.class_names.resize(specs.size());
    for (const auto& s : specs) data.class_names[s.class_id] = s.name;

    for (const Split split : {Split::train, Split::test}) {
        const std::size_t count = split == Split::train ? per_class.train : per_class.test;
        for (const auto& spec : specs) {
            for (std::size_t i = 0; i < count; ++i) {
                std::uint64_t s = mix_seed(seed, spec.seed);
                s = mix_seed(s, static_cast<std::uint64_t>(split));
                s = mix_seed(s, i);
                char id[64];
                std::snprintf(id, sizeof id, "%s/%s/%04zu", to_string(split).c_str(), spec.name.c_str(), i);
                data.samples.push_back({id, render_instance(spec, s, opts), spec.class_id, split});
            }
        }
    }
    return data;
}

}  // namespace gcocr
