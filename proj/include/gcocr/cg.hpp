#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gcocr/mlp.hpp"

namespace gcocr {

enum class BetaVariant { polak_ribiere_plus, fletcher_reeves };

std::string to_string(BetaVariant v);
BetaVariant parse_beta_variant(const std::string& s);

struct LineSearchParams {
    std::size_t max_expansions = 20;
    std::size_t max_backtracks = 50;
    double expand = 2.0;
    double shrink = 0.5;            // in (0, 1)
    double sufficient_decrease = 1e-4;
    std::size_t refinements = 3;    // parabolic steps once a minimum is bracketed
};

struct TrainConfig {
    std::size_t max_iterations = 1000;
    double grad_tolerance = 1e-6;  // on the infinity norm
    double loss_tolerance = 0.0;   // stop when one step improves the loss by less
    std::size_t restart_interval = 0;  // 0 = parameter dimension
    BetaVariant beta = BetaVariant::polak_ribiere_plus;
    LineSearchParams line_search;
    std::uint64_t seed = 1;

    void validate() const;
};

struct LineSearchResult {
    double step = 0.0;
    double value = 0.0;
    bool sufficient = false;  // false when only a plain decrease was found
    std::size_t evaluations = 0;
};

// Bracket-and-backtrack search along a descent direction. phi(a) is the
// objective at x + a p, phi0 = phi(0) and slope = g.p < 0. Starting from
// initial_step the step is expanded while the Armijo condition keeps holding
// and phi keeps falling, or shrunk until it holds; a closed bracket is then
// tightened by a few parabolic steps. Returns nullopt when no probe decreases
// phi at all.
std::optional<LineSearchResult> line_search(const std::function<double(double)>& phi, double phi0, double slope,
                                             const LineSearchParams& params = {}, double initial_step = 1.0);

// Smooth objective over a flat parameter vector.
class Objective {
public:
    virtual ~Objective() = default;
    virtual std::size_t dimension() const = 0;
    // Returns f(x); writes the gradient when grad is non-null.
    virtual double evaluate(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const = 0;
};

struct TraceRecord {
    std::size_t iteration = 0;
    double loss = 0.0;       // at the start of the iteration
    double grad_norm = 0.0;  // infinity norm at the start of the iteration
    double step = 0.0;       // a_k; 0 on the terminal record
    double beta = 0.0;
    bool restart = false;    // direction reset to -g after iteration 0
    double slope = 0.0;      // g.p of the direction actually searched
};

enum class StopReason { gradient_tolerance, loss_tolerance, max_iterations, line_search_failure };
std::string to_string(StopReason r);

// One record per iteration plus a terminal record (step 0) for the final point.
struct TrainTrace {
    std::vector<TraceRecord> records;
    StopReason reason = StopReason::max_iterations;

    std::size_t steps() const { return records.empty() ? 0 : records.size() - 1; }
    const TraceRecord& final_record() const { return records.back(); }
};

void write_trace_csv(std::ostream& out, const TrainTrace& trace);

struct IterationView {
    std::size_t iteration;
    const Eigen::VectorXd& x;
    const Eigen::VectorXd& gradient;
    const Eigen::VectorXd& direction;
    double beta;
    bool restart;
};

struct MinimizeOptions {
    // Replaces the default line search; returns the step, or nullopt on failure.
    std::function<std::optional<double>(const Eigen::VectorXd& x, const Eigen::VectorXd& p, double f0, double slope)>
        step_search;
    std::function<void(const IterationView&)> observer;
};

struct MinimizeResult {
    Eigen::VectorXd x;
    TrainTrace trace;
};

MinimizeResult cg_minimize(const Objective& objective, Eigen::VectorXd x0, const TrainConfig& cfg,
                           const MinimizeOptions& options = {});

class MlpObjective : public Objective {
public:
    MlpObjective(const Layout& layout, SampleBatch batch);
    std::size_t dimension() const override { return layout_.parameter_count(); }
    double evaluate(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const override;

private:
    Layout layout_;
    SampleBatch batch_;
    mutable MlpModel scratch_;
};

struct TrainResult {
    MlpModel model;
    TrainTrace trace;
};

TrainResult cg_minimize(const MlpModel& model, std::span<const LabeledSample> data, const TrainConfig& cfg,
                        const MinimizeOptions& options = {});

// Initialises from cfg.seed and runs cg_minimize.
TrainResult train(std::span<const LabeledSample> data, const Layout& layout, const TrainConfig& cfg);

}  // namespace gcocr
