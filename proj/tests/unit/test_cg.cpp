#include <gtest/gtest.h>

#include <sstream>

#include "gcocr/cg.hpp"
#include "gcocr/errors.hpp"
#include "gcocr/evaluate.hpp"
#include "oracles.hpp"

using namespace gcocr;

TEST(LineSearch, QuadraticMinimum) {
    const auto phi = [](double a) { return (a - 2) * (a - 2); };
    const auto r = line_search(phi, 4.0, -4.0);
    ASSERT_TRUE(r);
    EXPECT_GE(r->step, 1.0);
    EXPECT_LE(r->step, 3.0);
    EXPECT_LT(phi(r->step), 4.0);
    EXPECT_EQ(r->value, phi(r->step));
    EXPECT_TRUE(r->sufficient);
}

TEST(LineSearch, ConstantFails) {
    EXPECT_FALSE(line_search([](double) { return 1.0; }, 1.0, -1.0));
}

TEST(LineSearch, LinearDescentTakesLargestProbe) {
    LineSearchParams p;
    const auto r = line_search([](double a) { return 5.0 - 3.0 * a; }, 5.0, -3.0, p, 1.0);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->step, std::pow(p.expand, static_cast<double>(p.max_expansions)));
}

TEST(LineSearch, RejectsAscentDirection) {
    EXPECT_THROW(line_search([](double a) { return a; }, 0.0, 1.0), ParameterError);
}

TEST(Cg, FirstDirectionIsNegativeGradient) {
    const auto q = oracle::conditioned_quadratic(6, 10, 1);
    Eigen::VectorXd g0;
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(6);
    q.evaluate(x0, &g0);
    MinimizeOptions opts;
    bool checked = false;
    opts.observer = [&](const IterationView& v) {
        if (v.iteration == 0) {
            EXPECT_EQ(v.direction, -g0);
            EXPECT_EQ(v.beta, 0.0);
            checked = true;
        }
    };
    const auto r = cg_minimize(q, x0, TrainConfig{}, opts);
    EXPECT_TRUE(checked);
    EXPECT_EQ(r.trace.records.front().beta, 0.0);
    EXPECT_FALSE(r.trace.records.front().restart);
}

TEST(Cg, QuadraticWithExactSearchConvergesInNSteps) {
    for (auto beta : {BetaVariant::polak_ribiere_plus, BetaVariant::fletcher_reeves}) {
        const auto q = oracle::conditioned_quadratic(5, 50, 3);
        TrainConfig cfg;
        cfg.grad_tolerance = 1e-8;
        cfg.beta = beta;
        const auto r = cg_minimize(q, Eigen::VectorXd::Zero(5), cfg, oracle::exact_line_search(q));
        EXPECT_EQ(r.trace.reason, StopReason::gradient_tolerance);
        EXPECT_LE(r.trace.steps(), 5u) << to_string(beta);
        EXPECT_LT(r.trace.final_record().grad_norm, 1e-8);
    }
}

TEST(Cg, DirectionsAreAConjugate) {
    const auto q = oracle::conditioned_quadratic(6, 20, 4);
    std::vector<Eigen::VectorXd> dirs;
    MinimizeOptions opts = oracle::exact_line_search(q);
    opts.observer = [&](const IterationView& v) { dirs.push_back(v.direction); };
    TrainConfig cfg;
    cfg.grad_tolerance = 1e-10;
    cfg.beta = BetaVariant::fletcher_reeves;
    cg_minimize(q, Eigen::VectorXd::Zero(6), cfg, opts);
    ASSERT_GE(dirs.size(), 3u);
    for (std::size_t i = 0; i < dirs.size(); ++i)
        for (std::size_t j = i + 1; j < dirs.size(); ++j) {
            const double num = std::abs(dirs[i].dot(q.matrix() * dirs[j]));
            const double den = std::sqrt(dirs[i].dot(q.matrix() * dirs[i]) * dirs[j].dot(q.matrix() * dirs[j]));
            EXPECT_LT(num / den, 1e-6);
        }
}

TEST(Cg, ZeroGradientStartStopsImmediately) {
    oracle::Quadratic q(Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3));
    const auto r = cg_minimize(q, Eigen::VectorXd::Zero(3), TrainConfig{});
    EXPECT_EQ(r.trace.steps(), 0u);
    EXPECT_EQ(r.trace.records.size(), 1u);
    EXPECT_EQ(r.trace.reason, StopReason::gradient_tolerance);
}

TEST(Cg, DefaultLineSearchDescendsEveryStep) {
    const auto q = oracle::conditioned_quadratic(10, 100, 5);
    MinimizeOptions opts;
    opts.observer = [](const IterationView& v) { EXPECT_LT(v.gradient.dot(v.direction), 0.0); };
    const auto r = cg_minimize(q, Eigen::VectorXd::Zero(10), TrainConfig{}, opts);
    EXPECT_EQ(r.trace.reason, StopReason::gradient_tolerance);
    for (std::size_t i = 1; i < r.trace.records.size(); ++i)
        EXPECT_LE(r.trace.records[i].loss, r.trace.records[i - 1].loss);
}

TEST(Cg, PeriodicRestart) {
    const auto q = oracle::conditioned_quadratic(8, 100, 6);
    TrainConfig cfg;
    cfg.restart_interval = 1;
    const auto r = cg_minimize(q, Eigen::VectorXd::Zero(8), cfg, oracle::exact_line_search(q));
    for (std::size_t i = 0; i < r.trace.steps(); ++i) EXPECT_EQ(r.trace.records[i].beta, 0.0);
    EXPECT_GT(r.trace.steps(), 8u);
}

TEST(Train, LayoutHas190Parameters) {
    std::mt19937_64 rng(1);
    const Layout L{9, 9, 10};
    const auto data = oracle::random_samples(rng, L, 20);
    TrainConfig cfg;
    cfg.max_iterations = 3;
    const auto r = train(data, L, cfg);
    EXPECT_EQ(r.model.parameter_count(), 190u);
    EXPECT_EQ(r.model.layout(), L);
}

TEST(Train, SameSeedSameTrace) {
    std::mt19937_64 rng(2);
    const Layout L{6, 6, 4};
    const auto data = oracle::random_samples(rng, L, 30);
    TrainConfig cfg;
    cfg.max_iterations = 40;
    const auto a = train(data, L, cfg);
    const auto b = train(data, L, cfg);
    std::stringstream sa, sb;
    write_trace_csv(sa, a.trace);
    write_trace_csv(sb, b.trace);
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_EQ(a.model, b.model);
}

TEST(Train, SeparableToySetReachesFullAccuracy) {
    // Two classes split by x0 + x1 > 1 with a margin; a line separates them,
    // which the margin check below confirms.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<LabeledSample> data;
    while (data.size() < 40) {
        const double a = u(rng), b = u(rng);
        if (std::abs(a + b - 1) < 0.15) continue;
        data.push_back({{a, b}, a + b > 1 ? 1u : 0u});
    }
    for (const auto& s : data) ASSERT_EQ(s.features[0] + s.features[1] > 1, s.label == 1);
    for (auto beta : {BetaVariant::polak_ribiere_plus, BetaVariant::fletcher_reeves}) {
        TrainConfig cfg;
        cfg.max_iterations = 200;
        cfg.beta = beta;
        const auto r = train(data, {2, 2, 2}, cfg);
        EXPECT_EQ(evaluate(r.model, data).accuracy, 100.0) << to_string(beta);
        EXPECT_LE(r.trace.steps(), 200u);
    }
}

TEST(Train, LossNeverIncreases) {
    std::mt19937_64 rng(4);
    const Layout L{9, 9, 10};
    const auto data = oracle::random_samples(rng, L, 50);
    TrainConfig cfg;
    cfg.max_iterations = 60;
    const auto r = train(data, L, cfg);
    for (std::size_t i = 1; i < r.trace.records.size(); ++i)
        EXPECT_LE(r.trace.records[i].loss, r.trace.records[i - 1].loss);
}

TEST(Train, TraceCsvShape) {
    std::mt19937_64 rng(5);
    const Layout L{3, 3, 2};
    const auto data = oracle::random_samples(rng, L, 8);
    TrainConfig cfg;
    cfg.max_iterations = 5;
    const auto r = train(data, L, cfg);
    std::stringstream ss;
    write_trace_csv(ss, r.trace);
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line, "iteration,loss,grad_norm,step,beta,restart");
    std::size_t rows = 0;
    while (std::getline(ss, line)) ++rows;
    EXPECT_EQ(rows, r.trace.records.size());
    EXPECT_EQ(r.trace.final_record().step, 0.0);
}

TEST(TrainConfig, Validation) {
    TrainConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.line_search.shrink = 1.0;
    EXPECT_THROW(cfg.validate(), ParameterError);
    EXPECT_EQ(parse_beta_variant("fr"), BetaVariant::fletcher_reeves);
    EXPECT_EQ(parse_beta_variant("pr+"), BetaVariant::polak_ribiere_plus);
    EXPECT_THROW(parse_beta_variant("hs"), ParameterError);
}
