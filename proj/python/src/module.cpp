#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "gcocr/cg.hpp"
#include "gcocr/errors.hpp"
#include "gcocr/evaluate.hpp"
#include "gcocr/experiment.hpp"
#include "gcocr/image.hpp"
#include "gcocr/mlp.hpp"
#include "gcocr/pipeline.hpp"
#include "gcocr/synth.hpp"
#include "gcocr/thinning.hpp"

namespace py = pybind11;
using namespace gcocr;

namespace {

using GrayArray = py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>;
using BinArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using FeatArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

void require_2d(const py::buffer_info& info) {
    if (info.ndim != 2) throw ShapeError("expected a 2-D array");
}

GrayImage to_gray(const GrayArray& a, std::uint32_t maxval) {
    const auto info = a.request();
    require_2d(info);
    const auto* p = static_cast<const std::uint32_t*>(info.ptr);
    GrayImage img(static_cast<std::size_t>(info.shape[1]), static_cast<std::size_t>(info.shape[0]), maxval,
                  std::vector<std::uint32_t>(p, p + info.size));
    for (auto v : img.pixels)
        if (v > maxval) throw RangeError("pixel value exceeds maxval");
    return img;
}

BinaryImage to_binary(const BinArray& a) {
    const auto info = a.request();
    require_2d(info);
    const auto* p = static_cast<const std::uint8_t*>(info.ptr);
    BinaryImage img(static_cast<std::size_t>(info.shape[1]), static_cast<std::size_t>(info.shape[0]));
    for (py::ssize_t i = 0; i < info.size; ++i) img.pixels[static_cast<std::size_t>(i)] = p[i] ? 1 : 0;
    return img;
}

template <class T>
py::array_t<T> to_array(const std::vector<T>& px, std::size_t w, std::size_t h) {
    py::array_t<T> out({static_cast<py::ssize_t>(h), static_cast<py::ssize_t>(w)});
    std::copy(px.begin(), px.end(), out.mutable_data());
    return out;
}

py::array_t<std::uint8_t> from_binary(const BinaryImage& img) { return to_array(img.pixels, img.width, img.height); }

ThresholdConfig threshold_config(std::optional<std::uint64_t> threshold, const std::string& intensity, bool invert) {
    ThresholdConfig c;
    c.threshold = threshold;
    if (intensity == "direct") {
        c.mode = IntensityMode::direct;
    } else if (intensity == "packed-rgb") {
        c.mode = IntensityMode::packed_rgb;
    } else {
        throw ParameterError("intensity must be direct or packed-rgb");
    }
    c.invert = invert;
    return c;
}

std::vector<LabeledSample> to_samples(const FeatArray& x, const std::vector<std::size_t>& labels) {
    const auto info = x.request();
    require_2d(info);
    if (static_cast<std::size_t>(info.shape[0]) != labels.size()) throw ShapeError("one label per feature row");
    const auto* p = static_cast<const double*>(info.ptr);
    const auto cols = static_cast<std::size_t>(info.shape[1]);
    std::vector<LabeledSample> out(labels.size());
    for (std::size_t r = 0; r < labels.size(); ++r) {
        out[r].features.assign(p + r * cols, p + (r + 1) * cols);
        out[r].label = labels[r];
    }
    return out;
}

py::dict trace_dict(const TrainTrace& t) {
    std::vector<double> loss, grad, step, beta;
    std::vector<bool> restart;
    for (const auto& r : t.records) {
        loss.push_back(r.loss);
        grad.push_back(r.grad_norm);
        step.push_back(r.step);
        beta.push_back(r.beta);
        restart.push_back(r.restart);
    }
    py::dict d;
    d["loss"] = loss;
    d["grad_norm"] = grad;
    d["step"] = step;
    d["beta"] = beta;
    d["restart"] = restart;
    d["stop"] = to_string(t.reason);
    return d;
}

}  // namespace

PYBIND11_MODULE(_gcocr, m) {
    m.doc() = "Gradient-change character features and a conjugate-gradient trained MLP.";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<EmptyGlyphError>(m, "EmptyGlyphError", base.ptr());
    py::register_exception<RangeError>(m, "RangeError", base.ptr());
    py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
    py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());

    m.attr("CANONICAL_SIZE") = kCanonicalSize;

    // --- images ---------------------------------------------------------------
    m.def(
        "load_pgm",
        [](const std::filesystem::path& path) {
            const auto img = load_pgm(path);
            return py::make_tuple(to_array(img.pixels, img.width, img.height), img.maxval);
        },
        py::arg("path"), "Read a PGM file; returns (pixels, maxval).");
    m.def(
        "save_pgm",
        [](const GrayArray& pixels, const std::filesystem::path& path, std::uint32_t maxval, bool ascii) {
            save_pgm(to_gray(pixels, maxval), path, ascii ? PgmFormat::ascii : PgmFormat::binary);
        },
        py::arg("pixels"), py::arg("path"), py::arg("maxval") = 255, py::arg("ascii") = false);
    m.def(
        "binarize",
        [](const GrayArray& pixels, std::uint32_t maxval, std::optional<std::uint64_t> threshold,
           const std::string& intensity, bool invert) {
            return from_binary(binarize(to_gray(pixels, maxval), threshold_config(threshold, intensity, invert)));
        },
        py::arg("pixels"), py::arg("maxval") = 255, py::arg("threshold") = py::none(), py::arg("intensity") = "direct",
        py::arg("invert") = false);
    m.def(
        "bounding_box",
        [](const BinArray& img) {
            const auto b = bounding_box(to_binary(img));
            return py::make_tuple(b.top, b.bottom, b.left, b.right);
        },
        py::arg("image"), "Inclusive (top, bottom, left, right) of the ink.");
    m.def(
        "crop",
        [](const BinArray& img, std::size_t top, std::size_t bottom, std::size_t left, std::size_t right) {
            return from_binary(crop(to_binary(img), BoundingBox{top, bottom, left, right}));
        },
        py::arg("image"), py::arg("top"), py::arg("bottom"), py::arg("left"), py::arg("right"));
    m.def(
        "scale_to",
        [](const BinArray& img, std::size_t width, std::size_t height) {
            return from_binary(scale_to(to_binary(img), width, height));
        },
        py::arg("image"), py::arg("width") = kCanonicalSize, py::arg("height") = kCanonicalSize);
    m.def(
        "thin",
        [](const BinArray& img, const std::string& schedule) {
            return from_binary(thin(to_binary(img), parse_schedule(schedule)));
        },
        py::arg("image"), py::arg("schedule") = "sequential");

    // --- features -------------------------------------------------------------
    m.def(
        "extract_features", [](const BinArray& img, std::size_t k) { return extract_features(to_binary(img), k).values; },
        py::arg("skeleton"), py::arg("k"), "Raw gc value per segment, row-major.");
    m.def(
        "normalize",
        [](const std::vector<double>& values, double half_range) {
            FeatureVector v;
            v.values = values;
            return normalize(v, half_range).values;
        },
        py::arg("values"), py::arg("half_range"));
    m.def(
        "run_pipeline",
        [](const GrayArray& pixels, std::uint32_t maxval, std::size_t side, double factor, const std::string& schedule,
           std::optional<std::uint64_t> threshold) {
            PipelineConfig cfg;
            cfg.side = side;
            cfg.factor = factor;
            cfg.schedule = parse_schedule(schedule);
            cfg.threshold.threshold = threshold;
            return run_pipeline(to_gray(pixels, maxval), cfg).values;
        },
        py::arg("pixels"), py::arg("maxval") = 255, py::arg("side") = 4, py::arg("factor") = 30.0,
        py::arg("schedule") = "sequential", py::arg("threshold") = py::none());

    // --- network --------------------------------------------------------------
    py::class_<MlpModel>(m, "Model")
        .def(py::init([](std::size_t n_in, std::size_t n_hidden, std::size_t n_out) {
                 return MlpModel(Layout{n_in, n_hidden, n_out});
             }),
             py::arg("n_in"), py::arg("n_hidden"), py::arg("n_out"))
        .def_static(
            "random",
            [](std::size_t n_in, std::size_t n_hidden, std::size_t n_out, std::uint64_t seed) {
                return MlpModel::random({n_in, n_hidden, n_out}, seed);
            },
            py::arg("n_in"), py::arg("n_hidden"), py::arg("n_out"), py::arg("seed") = 1)
        .def_property_readonly("layout",
                               [](const MlpModel& mm) {
                                   const auto& l = mm.layout();
                                   return py::make_tuple(l.n_in, l.n_hidden, l.n_out);
                               })
        .def_property("parameters", &MlpModel::flatten, &MlpModel::assign)
        .def("forward", [](const MlpModel& mm, const std::vector<double>& x) { return forward(mm, x); })
        .def("predict", [](const MlpModel& mm, const std::vector<double>& x) { return predict(mm, x); })
        .def("loss", [](const MlpModel& mm, const FeatArray& x,
                        const std::vector<std::size_t>& y) { return loss(mm, to_samples(x, y)); })
        .def("gradient", [](const MlpModel& mm, const FeatArray& x,
                            const std::vector<std::size_t>& y) { return gradient(mm, to_samples(x, y)); })
        .def(
            "save",
            [](const MlpModel& mm, const std::string& path) { save_model(path, ModelFile{mm, {}, {}, {}}); },
            py::arg("path"))
        .def_static(
            "load", [](const std::string& path) { return load_model(path).model; }, py::arg("path"))
        .def("__eq__", [](const MlpModel& a, const MlpModel& b) { return a == b; });

    m.def(
        "train",
        [](const FeatArray& x, const std::vector<std::size_t>& y, std::size_t n_classes, std::size_t hidden,
           std::size_t max_iterations, const std::string& beta, std::uint64_t seed) {
            const auto data = to_samples(x, y);
            if (data.empty()) throw ParameterError("training data is empty");
            const std::size_t n_in = data.front().features.size();
            TrainConfig cfg;
            cfg.max_iterations = max_iterations;
            cfg.beta = parse_beta_variant(beta);
            cfg.seed = seed;
            cfg.validate();
            TrainResult r;
            {
                py::gil_scoped_release release;
                r = train(data, Layout{n_in, hidden ? hidden : n_in, n_classes}, cfg);
            }
            return py::make_tuple(r.model, trace_dict(r.trace));
        },
        py::arg("features"), py::arg("labels"), py::arg("n_classes"), py::arg("hidden") = 0,
        py::arg("max_iterations") = 1000, py::arg("beta") = "pr+", py::arg("seed") = 1,
        "Train from a (n, d) feature array; returns (model, trace).");
    m.def(
        "evaluate",
        [](const MlpModel& model, const FeatArray& x, const std::vector<std::size_t>& y) {
            const auto e = evaluate(model, to_samples(x, y));
            const std::size_t n = e.confusion.classes();
            py::array_t<std::size_t> cm({static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(n)});
            for (std::size_t t = 0; t < n; ++t)
                for (std::size_t p = 0; p < n; ++p) cm.mutable_at(t, p) = e.confusion.at(t, p);
            return py::make_tuple(e.accuracy, cm);
        },
        py::arg("model"), py::arg("features"), py::arg("labels"), "Returns (accuracy percent, confusion matrix).");

    // --- data and experiment ----------------------------------------------------
    m.def(
        "synth_generate",
        [](std::size_t train_per_class, std::size_t test_per_class, std::uint64_t seed) {
            const auto d = synth_generate(builtin_glyphs(), {train_per_class, test_per_class}, seed);
            py::list samples;
            for (const auto& s : d.samples)
                samples.append(py::make_tuple(s.id, to_array(s.image.pixels, s.image.width, s.image.height), s.label,
                                              to_string(s.split)));
            return py::make_tuple(d.class_names, samples);
        },
        py::arg("train_per_class") = 25, py::arg("test_per_class") = 5, py::arg("seed") = 1,
        "Synthetic corpus; returns (class_names, [(id, pixels, label, split)]).");
    m.def(
        "run_experiment",
        [](std::uint64_t seed, std::size_t train_per_class, std::size_t test_per_class, std::size_t max_iterations,
           std::size_t jobs, bool include_timing) {
            ExperimentConfig cfg;
            cfg.seed = seed;
            cfg.jobs = jobs;
            cfg.train.max_iterations = max_iterations;
            std::ostringstream csv;
            {
                py::gil_scoped_release release;
                const auto data = synth_generate(builtin_glyphs(), {train_per_class, test_per_class}, seed);
                run_experiment(cfg, data).write_csv(csv, include_timing);
            }
            return csv.str();
        },
        py::arg("seed") = 1, py::arg("train_per_class") = 25, py::arg("test_per_class") = 5,
        py::arg("max_iterations") = 1000, py::arg("jobs") = 1, py::arg("include_timing") = true,
        "Full sweep on the synthetic corpus; returns the report CSV.");
}
