#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gcocr/dataset.hpp"
#include "gcocr/image.hpp"

namespace gcocr {

struct Point2 {
    double x;  // rightward, unit square
    double y;  // downward, unit square
};

using Stroke = std::vector<Point2>;

struct Jitter {
    double translation = 0.0;  // max offset, fraction of canvas side
    double scale = 0.0;        // relative size change in [-scale, scale]
    double rotation = 0.0;     // radians, uniform in [-rotation, rotation]
    double point_noise = 0.0;  // std-dev of per-vertex displacement, unit square
    double stroke_min = 3.0;   // stroke width range in pixels
    double stroke_max = 3.0;

    static Jitter none(double stroke = 3.0) { return {0, 0, 0, 0, stroke, stroke}; }
};

struct GlyphSpec {
    std::size_t class_id = 0;
    std::string name;
    std::vector<Stroke> strokes;
    Jitter jitter;
    std::uint64_t seed = 0;
};

struct SynthCounts {
    std::size_t train = 25;
    std::size_t test = 5;
};

struct SynthOptions {
    std::size_t canvas = 64;
    std::uint32_t maxval = 255;
};

// Ten letters A C F K L O S V X Z with the default jitter.
std::vector<GlyphSpec> builtin_glyphs();
Jitter default_jitter();

std::vector<Point2> arc(Point2 centre, double rx, double ry, double from_deg, double to_deg, std::size_t pieces = 48);

// Bright strokes (maxval) on a dark (0) canvas, anti-aliased over one pixel.
// Stroke points are in canvas pixels.
GrayImage render(const std::vector<Stroke>& strokes, double stroke_width, const SynthOptions& opts = {});

// The undistorted template, unit square stretched over the canvas.
GrayImage render_template(const GlyphSpec& spec, double stroke_width, const SynthOptions& opts = {});

// One jittered instance; retries with halved jitter when the glyph does not
// fit the canvas and fails after 10 attempts.
GrayImage render_instance(const GlyphSpec& spec, std::uint64_t seed, const SynthOptions& opts = {});

Dataset synth_generate(const std::vector<GlyphSpec>& specs, const SynthCounts& per_class, std::uint64_t seed,
                       const SynthOptions& opts = {});

// splitmix64 finaliser; used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace gcocr
