#include "gcocr/experiment.hpp"

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "gcocr/errors.hpp"

namespace gcocr {

void ExperimentConfig::validate() const {
    if (sides.empty()) throw ParameterError("experiment needs at least one segment side");
    for (const auto k : sides) {
        if (k < 1 || k > kCanonicalSize) throw ParameterError("segment side " + std::to_string(k) + " out of range");
        const auto it = factors.find(k);
        if (it == factors.end() || it->second.empty())
            throw ParameterError("no normalization factor for side " + std::to_string(k));
        for (const double a : it->second)
            if (!(a > 0)) throw ParameterError("normalization factors must be positive");
    }
    if (jobs < 1) throw ParameterError("jobs must be at least 1");
    train.validate();
}

void apply_config(const KeyValueConfig& kv, TrainConfig& cfg) {
    if (auto v = kv.get_uint("max_iterations")) cfg.max_iterations = *v;
    if (auto v = kv.get_double("grad_tolerance")) cfg.grad_tolerance = *v;
    if (auto v = kv.get_double("loss_tolerance")) cfg.loss_tolerance = *v;
    if (auto v = kv.get_uint("restart_interval")) cfg.restart_interval = *v;
    if (auto v = kv.get("beta")) cfg.beta = parse_beta_variant(*v);
    if (auto v = kv.get_uint("seed")) cfg.seed = *v;
    if (auto v = kv.get_uint("line_search.max_expansions")) cfg.line_search.max_expansions = *v;
    if (auto v = kv.get_uint("line_search.max_backtracks")) cfg.line_search.max_backtracks = *v;
    if (auto v = kv.get_double("line_search.expand")) cfg.line_search.expand = *v;
    if (auto v = kv.get_double("line_search.shrink")) cfg.line_search.shrink = *v;
    if (auto v = kv.get_double("line_search.sufficient_decrease")) cfg.line_search.sufficient_decrease = *v;
}

void apply_config(const KeyValueConfig& kv, ExperimentConfig& cfg) {
    kv.reject_unknown({"sides", "factors.*", "hidden", "seed", "threshold", "intensity", "invert", "thinning",
                       "jobs", "max_iterations", "grad_tolerance", "loss_tolerance", "restart_interval", "beta",
                       "line_search.*", "synth.train_per_class", "synth.test_per_class"});
    apply_config(kv, cfg.train);
    if (auto v = kv.get_list("sides")) {
        cfg.sides.clear();
        for (const double d : *v) {
            if (d < 1 || d != std::floor(d)) throw ParameterError("sides must be positive integers");
            cfg.sides.push_back(static_cast<std::size_t>(d));
        }
    }
    for (const auto& [key, value] : kv.values()) {
        if (key.rfind("factors.", 0) != 0) continue;
        std::size_t k = 0;
        try {
            std::size_t used = 0;
            k = std::stoul(key.substr(8), &used);
            if (used != key.size() - 8) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw ParameterError("bad factors key '" + key + "', expected factors.<side>");
        }
        cfg.factors[k] = *kv.get_list(key);
    }
    if (auto v = kv.get("hidden")) cfg.hidden = (*v == "input") ? 0 : static_cast<std::size_t>(*kv.get_uint("hidden"));
    if (auto v = kv.get_uint("seed")) cfg.seed = *v;
    if (auto v = kv.get("threshold")) {
        if (*v == "default")
            cfg.threshold.threshold.reset();
        else
            cfg.threshold.threshold = *kv.get_uint("threshold");
    }
    if (auto v = kv.get("intensity")) {
        if (*v == "direct")
            cfg.threshold.mode = IntensityMode::direct;
        else if (*v == "packed-rgb")
            cfg.threshold.mode = IntensityMode::packed_rgb;
        else
            throw ParameterError("intensity must be direct or packed-rgb");
    }
    if (auto v = kv.get_bool("invert")) cfg.threshold.invert = *v;
    if (auto v = kv.get("thinning")) cfg.schedule = parse_schedule(*v);
    if (auto v = kv.get_uint("jobs")) cfg.jobs = *v;
    if (auto v = kv.get_uint("synth.train_per_class")) cfg.synth.train = *v;
    if (auto v = kv.get_uint("synth.test_per_class")) cfg.synth.test = *v;
}

std::string factor_label(double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "+(%g/%g)", a, 2 * a);
    return buf;
}

std::uint64_t cell_seed(std::uint64_t master, std::size_t side, double factor) {
    return mix_seed(mix_seed(master, side), std::bit_cast<std::uint64_t>(factor));
}

PreparedData prepare(const Dataset& data, const PipelineConfig& pipeline) {
    PreparedData out;
    out.class_names = data.class_names;
    for (const auto& s : data.samples) {
        try {
            out.samples.push_back({&s, preprocess(s.image, pipeline)});
        } catch (const EmptyGlyphError& e) {
            out.excluded.push_back({s.id, s.split, e.what()});
        }
    }
    return out;
}

std::vector<LabeledSample> featurize(const PreparedData& data, Split split, std::size_t side, double factor) {
    std::vector<LabeledSample> out;
    for (const auto& p : data.samples) {
        if (p.source->split != split) continue;
        out.push_back({normalize(extract_features(p.skeleton, side), factor).values, p.source->label});
    }
    return out;
}

namespace {

CellResult run_cell(const ExperimentConfig& cfg, const PreparedData& data, std::size_t side, double factor) {
    const auto start = std::chrono::steady_clock::now();
    CellResult cell;
    cell.side = side;
    cell.factor = factor;
    cell.layout = {side * side, cfg.hidden_width(side * side), data.class_names.size()};
    cell.seed = cell_seed(cfg.seed, side, factor);
    cell.test_confusion = ConfusionMatrix(data.class_names.size());
    try {
        const auto train_set = featurize(data, Split::train, side, factor);
        const auto test_set = featurize(data, Split::test, side, factor);
        TrainConfig tc = cfg.train;
        tc.seed = cell.seed;
        const auto result = train(train_set, cell.layout, tc);
        cell.iterations = result.trace.steps();
        cell.stop = result.trace.reason;
        cell.train_accuracy = evaluate(result.model, train_set).accuracy;
        const auto test_eval = evaluate(result.model, test_set);
        cell.test_accuracy = test_eval.accuracy;
        cell.test_confusion = test_eval.confusion;
    } catch (const Error& e) {
        cell.error = e.what();
        cell.train_accuracy = cell.test_accuracy = std::nan("");
    }
    cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return cell;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, const Dataset& data) {
    cfg.validate();
    if (data.count(Split::train) == 0 || data.count(Split::test) == 0)
        throw ParameterError("experiment needs non-empty train and test splits");

    PipelineConfig pipeline;
    pipeline.threshold = cfg.threshold;
    pipeline.schedule = cfg.schedule;
    const PreparedData prepared = prepare(data, pipeline);

    std::vector<std::pair<std::size_t, double>> grid;
    for (const auto k : cfg.sides)
        for (const double a : cfg.factors.at(k)) grid.emplace_back(k, a);

    ExperimentReport report;
    report.class_names = data.class_names;
    report.excluded = prepared.excluded;
    report.cells.resize(grid.size());

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++)
            report.cells[i] = run_cell(cfg, prepared, grid[i].first, grid[i].second);
    };
    const std::size_t threads = std::min(cfg.jobs, grid.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return report;
}

void ExperimentReport::write_csv(std::ostream& out, bool include_timing) const {
    out << "feature_size,factor,train_acc,test_acc" << (include_timing ? ",seconds" : "") << '\n';
    char buf[160];
    for (const auto& c : cells) {
        std::snprintf(buf, sizeof buf, "%zu,%g,%.4f,%.4f", c.feature_size(), c.factor, c.train_accuracy,
                      c.test_accuracy);
        out << buf;
        if (include_timing) {
            std::snprintf(buf, sizeof buf, ",%.3f", c.seconds);
            out << buf;
        }
        out << '\n';
    }
}

void ExperimentReport::write_table(std::ostream& out) const {
    char buf[160];
    std::size_t last = 0;
    for (const auto& c : cells) {
        if (c.feature_size() != last) {
            if (last) out << '\n';
            last = c.feature_size();
            out << "features: " << last << "  (" << c.layout.n_in << "x" << c.layout.n_hidden << "x"
                << c.layout.n_out << ")\n";
            std::snprintf(buf, sizeof buf, "  %-22s %12s %10s %9s\n", "factor", "train %", "test %", "seconds");
            out << buf;
        }
        if (c.ok())
            std::snprintf(buf, sizeof buf, "  %-22s %12.2f %10.2f %9.2f\n", factor_label(c.factor).c_str(),
                          c.train_accuracy, c.test_accuracy, c.seconds);
        else
            std::snprintf(buf, sizeof buf, "  %-22s failed: %s\n", factor_label(c.factor).c_str(), c.error.c_str());
        out << buf;
    }
    if (!excluded.empty()) {
        out << "\nexcluded samples:\n";
        for (const auto& e : excluded) out << "  " << e.id << " (" << to_string(e.split) << "): " << e.reason << '\n';
    }
}

}  // namespace gcocr
