// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// gated criterion fails. The trend check (6) is reported but never gates.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "gcocr/experiment.hpp"
#include "gcocr/mlp.hpp"
#include "oracles.hpp"

using namespace gcocr;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kFixtures = GCOCR_FIXTURE_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome gradient_check() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2718);
    std::uniform_int_distribution<std::size_t> width(1, 25), outs(2, 10), count(1, 12);
    double worst = 0;
    for (int pair = 0; pair < 20; ++pair) {
        Layout L{width(rng), width(rng), outs(rng)};
        if (pair == 0) L = {25, 25, 10};
        const auto m = MlpModel::random(L, 1000 + pair);
        const auto data = oracle::random_samples(rng, L, count(rng));
        worst = std::max(worst, oracle::relative_inf_error(gradient(m, data), oracle::fd_gradient(m, data)));
    }
    const double t = seconds_since(t0);
    return {worst < 1e-5 && t < 10, "max rel err " + fmt("%.2e", worst) + ", " + fmt("%.2f", t) + " s"};
}

Outcome cg_behaviour() {
    const auto q = oracle::conditioned_quadratic(10, 100, 31);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(10);
    Eigen::VectorXd g0;
    q.evaluate(x0, &g0);

    std::string detail;
    bool ok = true;
    for (auto beta : {BetaVariant::polak_ribiere_plus, BetaVariant::fletcher_reeves}) {
        TrainConfig cfg;
        cfg.beta = beta;
        cfg.grad_tolerance = 1e-6;
        cfg.max_iterations = 500;
        auto opts = oracle::exact_line_search(q);
        bool first_ok = false;
        opts.observer = [&](const IterationView& v) {
            if (v.iteration == 0) first_ok = v.beta == 0.0 && v.direction == -g0;
        };
        const auto cg = cg_minimize(q, x0, cfg, opts);

        TrainConfig sd_cfg = cfg;
        sd_cfg.restart_interval = 1;
        const auto sd = cg_minimize(q, x0, sd_cfg, oracle::exact_line_search(q));

        const bool converged = cg.trace.reason == StopReason::gradient_tolerance && cg.trace.steps() <= 10;
        const bool faster = sd.trace.reason != StopReason::gradient_tolerance || cg.trace.steps() < sd.trace.steps();
        ok = ok && converged && faster && first_ok && cg.trace.records.front().beta == 0.0;
        detail += to_string(beta) + " " + std::to_string(cg.trace.steps()) + " it vs steepest " +
                  std::to_string(sd.trace.steps()) + (first_ok ? "" : " (bad first direction)") + "; ";
    }
    return {ok, detail.substr(0, detail.size() - 2)};
}

Outcome thinning_properties() {
    const auto corpus = oracle::thinning_corpus();
    const auto t0 = Clock::now();
    std::size_t bad = 0;
    for (const auto& g : corpus) {
        const auto out = thin(g.image);
        if (!oracle::is_fixed_point(out) || !oracle::ink_subset(out, g.image) ||
            oracle::components8(out) != oracle::components8(g.image))
            ++bad;
    }
    const double t = seconds_since(t0);
    return {corpus.size() >= 50 && bad == 0 && t < 5,
            std::to_string(corpus.size()) + " glyphs, " + std::to_string(bad) + " violations, " + fmt("%.2f", t) + " s"};
}

Outcome gc_correctness() {
    std::mt19937 rng(404);
    std::uniform_int_distribution<std::size_t> dim(1, 40);
    std::uniform_real_distribution<double> dens(0.0, 0.7);
    std::size_t mismatches = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t w = dim(rng), h = dim(rng);
        std::bernoulli_distribution ink(dens(rng));
        BinaryImage img(w, h);
        for (auto& p : img.pixels) p = ink(rng);
        std::uniform_int_distribution<std::size_t> rr(0, h), cc(0, w);
        std::size_t r0 = rr(rng), r1 = rr(rng), c0 = cc(rng), c1 = cc(rng);
        if (r0 > r1) std::swap(r0, r1);
        if (c0 > c1) std::swap(c0, c1);
        if (gc_of_segment(img, {{r0, r1}, {c0, c1}}) != oracle::brute_gc(img, r0, r1, c0, c1)) ++mismatches;
    }

    std::size_t telescope_fail = 0;
    for (int t = 0; t < 50; ++t) {
        const std::size_t w = dim(rng), h = dim(rng);
        std::uniform_int_distribution<std::size_t> col(0, w - 1);
        BinaryImage img(w, h);
        std::size_t first = 0, last = 0;
        for (std::size_t r = 0; r < h; ++r) {
            const auto c = col(rng);
            for (std::size_t x = c; x < w; ++x) img.at(r, x) = 1;
            if (r == 0) first = c;
            last = c;
        }
        const double expect = static_cast<double>(last) - static_cast<double>(first);
        if (gc_of_segment(img, {{0, h}, {0, w}}) != expect) ++telescope_fail;
    }

    std::size_t bar_fail = 0;
    for (std::size_t width = 1; width <= 6; ++width) {
        BinaryImage img(100, 100);
        for (std::size_t r = 5; r < 95; ++r)
            for (std::size_t c = 40; c < 40 + width; ++c) img.at(r, c) = 1;
        for (std::size_t k : {3, 4, 5})
            for (double v : extract_features(img, k).values)
                if (v != 0.0) ++bar_fail;
    }
    return {mismatches == 0 && telescope_fail == 0 && bar_fail == 0,
            "200 random: " + std::to_string(mismatches) + " mismatches; telescoping: " +
                std::to_string(telescope_fail) + "; vertical bars: " + std::to_string(bar_fail)};
}

const CellResult* find_cell(const ExperimentReport& r, std::size_t side, double factor) {
    for (const auto& c : r.cells)
        if (c.side == side && c.factor == factor) return &c;
    return nullptr;
}

Outcome end_to_end(ExperimentReport& first_report) {
    const auto t0 = Clock::now();
    ExperimentConfig cfg;
    const auto data = synth_generate(builtin_glyphs(), {25, 5}, cfg.seed);
    first_report = run_experiment(cfg, data);
    const auto again = run_experiment(cfg, synth_generate(builtin_glyphs(), {25, 5}, cfg.seed));
    const double t = seconds_since(t0);

    std::stringstream a, b;
    first_report.write_csv(a, false);
    again.write_csv(b, false);
    const bool reproducible = a.str() == b.str();

    bool size16_ok = false;
    std::string detail;
    for (const auto& c : first_report.cells) {
        if (c.feature_size() != 16) continue;
        if (c.ok() && c.test_accuracy >= 90 && c.train_accuracy >= 98) size16_ok = true;
        detail += "16 " + factor_label(c.factor) + " train " + fmt("%.1f", c.train_accuracy) + " test " +
                  fmt("%.1f", c.test_accuracy) + "; ";
    }
    const bool ok = data.count(Split::train) == 250 && data.count(Split::test) == 50 &&
                    first_report.cells.size() == 6 && size16_ok && reproducible && t < 120;
    detail += std::string(reproducible ? "rerun identical" : "rerun differs") + "; " + fmt("%.1f", t) + " s";
    return {ok, detail};
}

Outcome trend(const ExperimentReport& seed1) {
    double sum16 = 0, sum25 = 0;
    const int seeds = 5;
    for (int s = 1; s <= seeds; ++s) {
        ExperimentReport rep;
        ExperimentConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(s);
        cfg.sides = {4, 5};
        cfg.factors = {{4, {30}}, {5, {25}}};
        if (s == 1) {
            rep = seed1;
        } else {
            rep = run_experiment(cfg, synth_generate(builtin_glyphs(), {25, 5}, cfg.seed));
        }
        sum16 += find_cell(rep, 4, 30)->test_accuracy;
        sum25 += find_cell(rep, 5, 25)->test_accuracy;
    }
    const double m16 = sum16 / seeds, m25 = sum25 / seeds;
    return {m16 >= m25, "mean test at 16 " + fmt("%.2f", m16) + " vs 25 " + fmt("%.2f", m25) + " over 5 seeds"};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome round_trips() {
    std::size_t failures = 0;
    std::mt19937 rng(77);
    for (std::uint32_t maxval : {1u, 15u, 255u, 256u, 65535u}) {
        std::uniform_int_distribution<std::uint32_t> v(0, maxval);
        GrayImage img(13, 7, maxval);
        for (auto& p : img.pixels) p = v(rng);
        for (auto fmt_ : {PgmFormat::ascii, PgmFormat::binary}) {
            const auto bytes = encode_pgm(img, fmt_);
            const auto back = parse_pgm(bytes);
            if (!(back == img) || encode_pgm(back, fmt_) != bytes) ++failures;
        }
    }
    for (const char* name : {"A", "F", "O", "S", "Z"}) {
        const auto path = kFixtures / "glyphs" / (std::string(name) + ".pgm");
        if (encode_pgm(load_pgm(path)) != slurp(path)) ++failures;
    }

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ModelFile f{MlpModel::random({9 + seed, 7, 10}, seed), {}, 3, 35.0};
        std::stringstream s1;
        write_model(s1, f);
        const auto back = read_model(s1);
        std::stringstream s2;
        write_model(s2, back);
        if (!(back.model == f.model) || s1.str() != s2.str()) ++failures;
    }

    std::size_t golden_fail = 0;
    const std::pair<std::size_t, double> cells[] = {{3, 35}, {4, 30}, {5, 25}};
    for (const char* name : {"A", "F", "O", "S", "Z"}) {
        const auto img = load_pgm(kFixtures / "glyphs" / (std::string(name) + ".pgm"));
        for (auto [k, a] : cells) {
            PipelineConfig cfg;
            cfg.side = k;
            cfg.factor = a;
            FeatureTable t{{name}, {run_pipeline(img, cfg).values}};
            std::stringstream ss;
            write_feature_csv(ss, t, k * k);
            if (ss.str() != slurp(kFixtures / "golden" / (std::string(name) + "_k" + std::to_string(k) + ".csv")))
                ++golden_fail;
        }
    }
    return {failures == 0 && golden_fail == 0,
            "round-trip failures " + std::to_string(failures) + ", golden CSV mismatches " +
                std::to_string(golden_fail) + "/15"};
}

}  // namespace

int main() {
    int failed = 0;
    const auto report = [&](int id, const char* name, const Outcome& o, bool gated = true) {
        const char* tag = o.pass ? "PASS" : (gated ? "FAIL" : "NOTE");
        std::cout << tag << "  " << id << "  " << name << ": " << o.detail << std::endl;
        if (gated && !o.pass) ++failed;
    };

    report(1, "gradient vs finite differences", gradient_check());
    report(2, "conjugate gradient on conditioned quadratic", cg_behaviour());
    report(3, "thinning fixed point, subset, connectivity", thinning_properties());
    report(4, "gc against brute-force oracle", gc_correctness());
    ExperimentReport seed1;
    report(5, "synthetic 250/50 experiment", end_to_end(seed1));
    if (!seed1.cells.empty()) {
        report(6, "trend size 16 vs 25 (reported, not gated)", trend(seed1), false);
    } else {
        report(6, "trend size 16 vs 25 (reported, not gated)", {false, "skipped: no seed-1 report"}, false);
    }
    report(7, "format round-trips and golden features", round_trips());

    std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed" : "acceptance: all criteria passed")
              << std::endl;
    return failed ? 1 : 0;
}
