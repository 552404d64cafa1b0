#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "gcocr/cg.hpp"
#include "gcocr/config.hpp"
#include "gcocr/dataset.hpp"
#include "gcocr/errors.hpp"
#include "gcocr/evaluate.hpp"
#include "gcocr/experiment.hpp"
#include "gcocr/image.hpp"
#include "gcocr/pipeline.hpp"
#include "gcocr/synth.hpp"
#include "gcocr/thinning.hpp"

namespace gcocr::cli {

namespace {

constexpr const char* kVersion = "gcocr 0.1.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ThresholdFlags {
    std::optional<std::uint64_t> threshold;
    std::string intensity = "direct";
    bool invert = false;

    void add(CLI::App* app) {
        app->add_option("--threshold", threshold, "Ink threshold (default (maxval+1)/2)");
        app->add_option("--intensity", intensity, "Intensity reading: direct or packed-rgb")
            ->check(CLI::IsMember({"direct", "packed-rgb"}));
        app->add_flag("--invert", invert, "Treat dark pixels as ink");
    }

    ThresholdConfig config() const {
        ThresholdConfig c;
        c.threshold = threshold;
        c.mode = intensity == "packed-rgb" ? IntensityMode::packed_rgb : IntensityMode::direct;
        c.invert = invert;
        return c;
    }
};

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path);
    return f;
}

// Builds labelled samples from a feature table, mapping label names through
// classes (or deriving the sorted class list when classes is empty).
std::vector<LabeledSample> to_samples(const FeatureTable& table, std::vector<std::string>& classes) {
    if (classes.empty()) {
        const std::set<std::string> names(table.labels.begin(), table.labels.end());
        classes.assign(names.begin(), names.end());
    }
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < classes.size(); ++i) index[classes[i]] = i;
    std::vector<LabeledSample> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto it = index.find(table.labels[r]);
        if (it == index.end()) throw ShapeError("label '" + table.labels[r] + "' is not a model class");
        out.push_back({table.rows[r], it->second});
    }
    return out;
}

std::size_t side_for_width(std::size_t width) {
    const auto k = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(width))));
    if (k * k != width) throw ShapeError("feature width " + std::to_string(width) + " is not a square");
    return k;
}

nlohmann::json confusion_json(const ConfusionMatrix& m) {
    auto rows = nlohmann::json::array();
    for (std::size_t t = 0; t < m.classes(); ++t) {
        auto row = nlohmann::json::array();
        for (std::size_t p = 0; p < m.classes(); ++p) row.push_back(m.at(t, p));
        rows.push_back(row);
    }
    return rows;
}

class Cli {
public:
    Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    int run(std::vector<std::string> args) {
        CLI::App app{"Handwritten character recognition with gradient-change zoning features"};
        app.name("gcocr");
        app.set_version_flag("--version", kVersion);
        app.require_subcommand(1);
        app.fallthrough(false);

        setup_binarize(app);
        setup_crop(app);
        setup_scale(app);
        setup_thin(app);
        setup_extract(app);
        setup_train(app);
        setup_predict(app);
        setup_evaluate(app);
        setup_experiment(app);
        setup_synth(app);

        if (args.empty()) {
            err_ << app.help();
            return 2;
        }
        std::reverse(args.begin(), args.end());
        try {
            app.parse(args);
        } catch (const CLI::CallForHelp&) {
            out_ << (active_ ? active_->help() : app.help());
            return 0;
        } catch (const CLI::CallForAllHelp&) {
            out_ << app.help("", CLI::AppFormatMode::All);
            return 0;
        } catch (const CLI::CallForVersion&) {
            out_ << kVersion << '\n';
            return 0;
        } catch (const CLI::ParseError& e) {
            err_ << "error: " << e.what() << "\n\n" << (active_ ? active_->help() : app.help());
            return 2;
        }

        try {
            action_();
            return 0;
        } catch (const UsageError& e) {
            err_ << "error: " << e.what() << '\n';
            return 2;
        } catch (const std::exception& e) {
            err_ << "error: " << e.what() << '\n';
            return 1;
        }
    }

private:
    CLI::App* sub(CLI::App& app, const std::string& name, const std::string& description) {
        auto* s = app.add_subcommand(name, description);
        s->set_version_flag("--version", kVersion);
        s->add_option("--seed", seed_, "Master seed (used by stochastic stages only)");
        s->preparse_callback([this, s](std::size_t) { active_ = s; });
        return s;
    }

    GrayImage read_input() const { return load_pgm(in_); }

    void setup_binarize(CLI::App& app) {
        auto* s = sub(app, "binarize", "Threshold a grayscale PGM into a binary PGM");
        s->add_option("--in", in_, "Input PGM")->required();
        s->add_option("--out", out_path_, "Output PGM")->required();
        thresh_.add(s);
        s->callback([this] {
            action_ = [this] { save_pgm(binarize(read_input(), thresh_.config()), out_path_); };
        });
    }

    void setup_crop(CLI::App& app) {
        auto* s = sub(app, "crop", "Binarize and crop to the ink bounding box");
        s->add_option("--in", in_, "Input PGM")->required();
        s->add_option("--out", out_path_, "Output PGM")->required();
        thresh_.add(s);
        s->callback([this] {
            action_ = [this] {
                const auto b = binarize(read_input(), thresh_.config());
                save_pgm(crop(b, bounding_box(b)), out_path_);
            };
        });
    }

    void setup_scale(CLI::App& app) {
        auto* s = sub(app, "scale", "Binarize and scale to a target raster by nearest-neighbour mapping");
        s->add_option("--in", in_, "Input PGM")->required();
        s->add_option("--out", out_path_, "Output PGM")->required();
        s->add_option("--width", width_, "Target width")->capture_default_str();
        s->add_option("--height", height_, "Target height")->capture_default_str();
        thresh_.add(s);
        s->callback([this] {
            action_ = [this] { save_pgm(scale_to(binarize(read_input(), thresh_.config()), width_, height_), out_path_); };
        });
    }

    void setup_thin(CLI::App& app) {
        auto* s = sub(app, "thin", "Binarize and thin to a one-pixel skeleton");
        s->add_option("--in", in_, "Input PGM")->required();
        s->add_option("--out", out_path_, "Output PGM")->required();
        add_schedule(s);
        thresh_.add(s);
        s->callback([this] {
            action_ = [this] { save_pgm(thin(binarize(read_input(), thresh_.config()), parse_schedule(schedule_)), out_path_); };
        });
    }

    void add_schedule(CLI::App* s) {
        s->add_option("--schedule", schedule_, "Thinning schedule: sequential, layered or parallel")
            ->check(CLI::IsMember({"sequential", "layered", "parallel"}))
            ->capture_default_str();
    }

    void setup_extract(CLI::App& app) {
        auto* s = sub(app, "extract", "Run the full pipeline and write gc features as CSV");
        auto* in = s->add_option("--in", inputs_, "Input PGM (repeatable)");
        auto* data = s->add_option("--data", data_, "Corpus root with train/ and test/");
        in->excludes(data);
        s->add_option("--label", label_, "Label written for --in images")->capture_default_str();
        s->add_option("--split", split_, "Corpus split: train, test or all")
            ->check(CLI::IsMember({"train", "test", "all"}))
            ->capture_default_str();
        s->add_option("--side", side_, "Segments per side (3, 4, 5 give 9, 16, 25 features)")->capture_default_str();
        s->add_option("--factor", factor_, "Normalization half-range A; omit for raw gc values");
        s->add_option("--out", out_path_, "Output CSV (default: standard output)");
        add_schedule(s);
        thresh_.add(s);
        s->callback([this] { action_ = [this] { extract(); }; });
    }

    void extract() {
        if (inputs_.empty() && data_.empty()) throw UsageError("extract needs --in or --data");
        PipelineConfig pc;
        pc.threshold = thresh_.config();
        pc.schedule = parse_schedule(schedule_);
        pc.side = side_;

        FeatureTable table;
        const auto add = [&](const GrayImage& img, const std::string& label, const std::string& id) {
            try {
                auto v = extract_features(preprocess(img, pc), side_);
                if (factor_) v = normalize(v, *factor_);
                table.labels.push_back(label);
                table.rows.push_back(v.values);
            } catch (const EmptyGlyphError& e) {
                err_ << "warning: skipping " << id << ": " << e.what() << '\n';
            }
        };
        if (!data_.empty()) {
            const auto ds = load_corpus(data_);
            for (const auto& w : ds.warnings) err_ << "warning: " << w << '\n';
            for (const auto& smp : ds.samples)
                if (split_ == "all" || split_ == to_string(smp.split)) add(smp.image, ds.class_names[smp.label], smp.id);
        } else {
            for (const auto& p : inputs_) add(load_pgm(p), label_, p);
        }
        if (out_path_.empty()) {
            write_feature_csv(out_, table, side_ * side_);
        } else {
            auto f = open_out(out_path_);
            write_feature_csv(f, table, side_ * side_);
        }
    }

    void add_train_flags(CLI::App* s) {
        s->add_option("--config", config_, "key=value config file");
        s->add_option("--max-iterations", max_iterations_, "CG iteration limit");
        s->add_option("--beta", beta_, "CG beta variant: pr+ or fr")->check(CLI::IsMember({"pr+", "fr"}));
        s->add_option("--grad-tolerance", grad_tolerance_, "Stop when the gradient infinity norm falls below");
        s->add_option("--hidden", hidden_, "Hidden layer width (default: input width)");
    }

    // Config file first, then flags.
    KeyValueConfig merged_config() const {
        KeyValueConfig kv = config_.empty() ? KeyValueConfig{} : KeyValueConfig::load(config_);
        if (seed_) kv.set("seed", std::to_string(*seed_));
        if (max_iterations_) kv.set("max_iterations", std::to_string(*max_iterations_));
        if (beta_) kv.set("beta", *beta_);
        if (grad_tolerance_) kv.set("grad_tolerance", format_exact(*grad_tolerance_));
        if (hidden_) kv.set("hidden", std::to_string(*hidden_));
        return kv;
    }

    void setup_train(CLI::App& app) {
        auto* s = sub(app, "train", "Train an MLP by conjugate gradient on a feature CSV");
        s->add_option("--features", features_, "Feature CSV from extract")->required();
        s->add_option("--model", model_path_, "Output model file")->required();
        s->add_option("--trace", trace_path_, "Write the per-iteration trace as CSV");
        s->add_option("--factor", factor_, "Normalization half-range the features were built with (recorded in the model)");
        s->add_flag("--json", json_, "Print a JSON summary");
        add_train_flags(s);
        s->callback([this] { action_ = [this] { train_cmd(); }; });
    }

    void train_cmd() {
        auto in = open_in(features_);
        const auto table = read_feature_csv(in);
        if (table.rows.empty()) throw ParameterError("feature CSV has no rows");
        std::vector<std::string> classes;
        const auto samples = to_samples(table, classes);

        const auto kv = merged_config();
        kv.reject_unknown({"seed", "max_iterations", "grad_tolerance", "loss_tolerance", "restart_interval", "beta",
                           "line_search.*", "hidden"});
        TrainConfig tc;
        apply_config(kv, tc);
        std::size_t hidden = table.width();
        if (auto h = kv.get("hidden"); h && *h != "input") hidden = *kv.get_uint("hidden");

        const Layout layout{table.width(), hidden, classes.size()};
        const auto result = train(samples, layout, tc);
        ModelFile mf{result.model, classes, side_for_width(table.width()), factor_};
        save_model(model_path_, mf);
        if (!trace_path_.empty()) {
            auto f = open_out(trace_path_);
            write_trace_csv(f, result.trace);
        }
        const auto eval = evaluate(result.model, samples);
        if (json_) {
            nlohmann::json j;
            j["layout"] = {layout.n_in, layout.n_hidden, layout.n_out};
            j["classes"] = classes;
            j["iterations"] = result.trace.steps();
            j["stop_reason"] = to_string(result.trace.reason);
            j["final_loss"] = result.trace.final_record().loss;
            j["final_grad_norm"] = result.trace.final_record().grad_norm;
            j["train_accuracy"] = eval.accuracy;
            j["seed"] = tc.seed;
            out_ << j.dump(2) << '\n';
        } else {
            out_ << "trained " << layout.n_in << "x" << layout.n_hidden << "x" << layout.n_out << " in "
                 << result.trace.steps() << " iterations (" << to_string(result.trace.reason) << "), loss "
                 << result.trace.final_record().loss << ", training accuracy " << eval.accuracy << "%\n";
        }
    }

    void setup_predict(CLI::App& app) {
        auto* s = sub(app, "predict", "Classify images or feature rows with a trained model");
        s->add_option("--model", model_path_, "Model file")->required();
        auto* in = s->add_option("--in", inputs_, "Input PGM (repeatable)");
        auto* feats = s->add_option("--features", features_, "Feature CSV");
        in->excludes(feats);
        s->add_option("--factor", factor_, "Normalization half-range (default: the model's)");
        add_schedule(s);
        thresh_.add(s);
        s->callback([this] { action_ = [this] { predict_cmd(); }; });
    }

    void predict_cmd() {
        const auto mf = load_model(model_path_);
        const auto name = [&](std::size_t i) { return i < mf.classes.size() ? mf.classes[i] : std::to_string(i); };
        if (!features_.empty()) {
            auto in = open_in(features_);
            const auto table = read_feature_csv(in);
            for (const auto& row : table.rows) out_ << name(predict(mf.model, row)) << '\n';
            return;
        }
        if (inputs_.empty()) throw UsageError("predict needs --in or --features");
        const auto factor = factor_ ? factor_ : mf.feature_factor;
        if (!factor) throw UsageError("model has no recorded normalization factor; pass --factor");
        PipelineConfig pc;
        pc.threshold = thresh_.config();
        pc.schedule = parse_schedule(schedule_);
        pc.side = mf.feature_side.value_or(side_for_width(mf.model.layout().n_in));
        pc.factor = *factor;
        for (const auto& p : inputs_) out_ << p << ',' << name(predict(mf.model, run_pipeline(load_pgm(p), pc).values)) << '\n';
    }

    void setup_evaluate(CLI::App& app) {
        auto* s = sub(app, "evaluate", "Accuracy and confusion matrix of a model on a feature CSV");
        s->add_option("--model", model_path_, "Model file")->required();
        s->add_option("--features", features_, "Feature CSV")->required();
        s->add_flag("--json", json_, "Print a JSON summary");
        s->callback([this] { action_ = [this] { evaluate_cmd(); }; });
    }

    void evaluate_cmd() {
        const auto mf = load_model(model_path_);
        auto in = open_in(features_);
        const auto table = read_feature_csv(in);
        std::vector<std::string> classes = mf.classes;
        if (classes.empty())
            for (std::size_t i = 0; i < mf.model.layout().n_out; ++i) classes.push_back(std::to_string(i));
        const auto samples = to_samples(table, classes);
        const auto e = evaluate(mf.model, samples);
        if (json_) {
            nlohmann::json j;
            j["accuracy"] = e.accuracy;
            j["samples"] = samples.size();
            j["correct"] = e.confusion.correct();
            j["classes"] = classes;
            j["confusion"] = confusion_json(e.confusion);
            out_ << j.dump(2) << '\n';
        } else {
            out_ << "accuracy " << e.accuracy << "% (" << e.confusion.correct() << "/" << samples.size() << ")\n";
            e.confusion.print(out_, classes);
        }
    }

    void setup_experiment(CLI::App& app) {
        auto* s = sub(app, "experiment", "Sweep feature sizes and normalization factors, train and evaluate each cell");
        s->add_option("--data", data_, "Corpus root (default: generate the synthetic corpus)");
        s->add_option("--report", report_, "Report CSV")->required();
        s->add_option("--table", table_path_, "Write the aligned text table here (default: standard output)");
        s->add_option("--jobs", jobs_, "Cells to run in parallel");
        s->add_option("--schedule", schedule_opt_, "Thinning schedule")
            ->check(CLI::IsMember({"sequential", "layered", "parallel"}));
        add_train_flags(s);
        s->callback([this] { action_ = [this] { experiment_cmd(); }; });
    }

    void experiment_cmd() {
        auto kv = merged_config();
        if (jobs_) kv.set("jobs", std::to_string(*jobs_));
        if (schedule_opt_) kv.set("thinning", *schedule_opt_);
        ExperimentConfig cfg;
        apply_config(kv, cfg);
        cfg.validate();

        Dataset ds;
        if (data_.empty()) {
            ds = synth_generate(builtin_glyphs(), cfg.synth, cfg.seed);
        } else {
            ds = load_corpus(data_);
            for (const auto& w : ds.warnings) err_ << "warning: " << w << '\n';
        }
        const auto report = run_experiment(cfg, ds);
        for (const auto& x : report.excluded) err_ << "warning: excluded " << x.id << ": " << x.reason << '\n';
        for (const auto& c : report.cells)
            if (!c.ok()) err_ << "warning: cell " << c.feature_size() << " " << factor_label(c.factor) << " failed: " << c.error << '\n';
        {
            auto f = open_out(report_);
            report.write_csv(f);
        }
        if (table_path_.empty()) {
            report.write_table(out_);
        } else {
            auto f = open_out(table_path_);
            report.write_table(f);
        }
    }

    void setup_synth(CLI::App& app) {
        auto* s = sub(app, "synth", "Write a synthetic corpus as root/{train,test}/<class>/*.pgm");
        s->add_option("--out", out_path_, "Corpus root")->required();
        s->add_option("--train-per-class", train_per_class_, "Training images per class")->capture_default_str();
        s->add_option("--test-per-class", test_per_class_, "Test images per class")->capture_default_str();
        s->add_option("--canvas", canvas_, "Canvas side in pixels")->capture_default_str();
        s->callback([this] {
            action_ = [this] {
                SynthOptions opts;
                opts.canvas = canvas_;
                const auto ds = synth_generate(builtin_glyphs(), {train_per_class_, test_per_class_}, seed_.value_or(1), opts);
                write_corpus(ds, out_path_);
                out_ << "wrote " << ds.count(Split::train) << " train and " << ds.count(Split::test) << " test images to "
                     << out_path_ << '\n';
            };
        });
    }

    std::ostream& out_;
    std::ostream& err_;
    CLI::App* active_ = nullptr;
    std::function<void()> action_;

    std::optional<std::uint64_t> seed_;
    std::string in_;
    std::vector<std::string> inputs_;
    std::string out_path_;
    std::string data_;
    std::string label_ = "unknown";
    std::string split_ = "all";
    std::size_t side_ = 4;
    std::optional<double> factor_;
    std::size_t width_ = kCanonicalSize;
    std::size_t height_ = kCanonicalSize;
    std::string schedule_ = "sequential";
    std::optional<std::string> schedule_opt_;
    ThresholdFlags thresh_;
    std::string features_;
    std::string model_path_;
    std::string trace_path_;
    std::string config_;
    std::string report_;
    std::string table_path_;
    bool json_ = false;
    std::optional<std::size_t> max_iterations_;
    std::optional<std::string> beta_;
    std::optional<double> grad_tolerance_;
    std::optional<std::size_t> hidden_;
    std::optional<std::size_t> jobs_;
    std::size_t train_per_class_ = 25;
    std::size_t test_per_class_ = 5;
    std::size_t canvas_ = 64;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Cli cli(out, err);
    return cli.run(args);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace gcocr::cli
