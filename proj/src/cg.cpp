#include "gcocr/cg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "gcocr/errors.hpp"

namespace gcocr {

std::string to_string(BetaVariant v) {
    return v == BetaVariant::polak_ribiere_plus ? "pr+" : "fr";
}

BetaVariant parse_beta_variant(const std::string& s) {
    if (s == "pr+" || s == "polak-ribiere-plus" || s == "pr") return BetaVariant::polak_ribiere_plus;
    if (s == "fr" || s == "fletcher-reeves") return BetaVariant::fletcher_reeves;
    throw ParameterError("unknown beta variant '" + s + "'");
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::gradient_tolerance: return "gradient-tolerance";
        case StopReason::loss_tolerance: return "loss-tolerance";
        case StopReason::max_iterations: return "max-iterations";
        case StopReason::line_search_failure: return "line-search-failure";
    }
    return "unknown";
}

void TrainConfig::validate() const {
    if (max_iterations < 1) throw ParameterError("max_iterations must be at least 1");
    if (!(grad_tolerance >= 0) || !(loss_tolerance >= 0)) throw ParameterError("tolerances must be non-negative");
    const auto& ls = line_search;
    if (!(ls.shrink > 0 && ls.shrink < 1)) throw ParameterError("line search shrink factor must be in (0, 1)");
    if (!(ls.expand > 1)) throw ParameterError("line search expansion factor must exceed 1");
    if (!(ls.sufficient_decrease > 0 && ls.sufficient_decrease < 1))
        throw ParameterError("sufficient-decrease constant must be in (0, 1)");
}

namespace {

// Vertex of the parabola through three points with f(b) <= f(a), f(c).
double parabola_vertex(double a, double fa, double b, double fb, double c, double fc) {
    const double p = (b - a) * (fb - fc);
    const double q = (b - c) * (fb - fa);
    const double denom = 2.0 * (p - q);
    if (denom == 0.0 || !std::isfinite(denom)) return b;
    return b - ((b - a) * p - (b - c) * q) / denom;
}

}  // namespace

std::optional<LineSearchResult> line_search(const std::function<double(double)>& phi, double phi0, double slope,
                                            const LineSearchParams& params, double initial_step) {
    if (!(slope < 0)) throw ParameterError("line search needs a descent direction");
    if (!(initial_step > 0) || !std::isfinite(initial_step)) initial_step = 1.0;

    LineSearchResult r;
    const auto armijo = [&](double a, double v) {
        return std::isfinite(v) && v < phi0 && v <= phi0 + params.sufficient_decrease * a * slope;
    };
    const auto eval = [&](double a) {
        ++r.evaluations;
        return phi(a);
    };

    // Bracket (lo, mid, hi) around the best Armijo point, when one closes.
    double lo = 0.0, flo = phi0, mid = 0.0, fmid = 0.0, hi = 0.0, fhi = 0.0;
    bool bracketed = false;

    double a = initial_step;
    double v = eval(a);

    if (armijo(a, v)) {
        mid = a;
        fmid = v;
        for (std::size_t i = 0; i < params.max_expansions; ++i) {
            const double next = a * params.expand;
            const double nv = eval(next);
            if (!armijo(next, nv) || !(nv < fmid)) {
                hi = next;
                fhi = std::isfinite(nv) ? nv : std::numeric_limits<double>::max();
                bracketed = true;
                break;
            }
            lo = mid;
            flo = fmid;
            a = mid = next;
            fmid = nv;
        }
    } else {
        // Best plain decrease seen while backtracking.
        std::optional<std::pair<double, double>> best;
        const auto note = [&](double step, double value) {
            if (std::isfinite(value) && value < phi0 && (!best || value < best->second)) best = {step, value};
        };
        note(a, v);
        bool found = false;
        for (std::size_t i = 0; i < params.max_backtracks; ++i) {
            hi = a;
            fhi = std::isfinite(v) ? v : std::numeric_limits<double>::max();
            a *= params.shrink;
            v = eval(a);
            if (armijo(a, v)) {
                mid = a;
                fmid = v;
                found = true;
                bracketed = fmid <= fhi;
                break;
            }
            note(a, v);
        }
        if (!found) {
            if (!best) return std::nullopt;
            r.step = best->first;
            r.value = best->second;
            return r;
        }
    }

    // Parabolic refinement inside the bracket.
    for (std::size_t i = 0; bracketed && i < params.refinements; ++i) {
        const double t = parabola_vertex(lo, flo, mid, fmid, hi, fhi);
        if (!(t > lo && t < hi) || std::abs(t - mid) <= 1e-12 * mid) break;
        const double ft = eval(t);
        if (armijo(t, ft) && ft < fmid) {
            if (t < mid) {
                hi = mid;
                fhi = fmid;
            } else {
                lo = mid;
                flo = fmid;
            }
            mid = t;
            fmid = ft;
        } else if (t < mid) {
            lo = t;
            flo = std::isfinite(ft) ? ft : std::numeric_limits<double>::max();
        } else {
            hi = t;
            fhi = std::isfinite(ft) ? ft : std::numeric_limits<double>::max();
        }
    }

    r.step = mid;
    r.value = fmid;
    r.sufficient = true;
    return r;
}

namespace {

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

bool finite(double f, const Eigen::VectorXd& g) { return std::isfinite(f) && g.allFinite(); }

}  // namespace

MinimizeResult cg_minimize(const Objective& objective, Eigen::VectorXd x, const TrainConfig& cfg,
                           const MinimizeOptions& options) {
    cfg.validate();
    const std::size_t dim = objective.dimension();
    if (static_cast<std::size_t>(x.size()) != dim) throw ShapeError("starting point has the wrong dimension");
    const std::size_t restart_every = cfg.restart_interval ? cfg.restart_interval : std::max<std::size_t>(dim, 1);

    MinimizeResult out;
    auto& trace = out.trace;

    Eigen::VectorXd g(static_cast<Eigen::Index>(dim));
    double f = objective.evaluate(x, &g);
    if (!finite(f, g)) throw NumericError("non-finite loss or gradient", 0);

    Eigen::VectorXd p = -g;
    Eigen::VectorXd g_prev;
    double prev_step = 0.0;
    double prev_slope = 0.0;
    double last_improvement = 0.0;
    std::size_t since_restart = 0;

    for (std::size_t k = 0;; ++k) {
        TraceRecord rec;
        rec.iteration = k;
        rec.loss = f;
        rec.grad_norm = inf_norm(g);

        const bool stop_grad = rec.grad_norm < cfg.grad_tolerance;
        const bool stop_loss = k > 0 && last_improvement < cfg.loss_tolerance;
        const bool stop_iter = k >= cfg.max_iterations;
        if (stop_grad || stop_loss || stop_iter) {
            trace.reason = stop_grad   ? StopReason::gradient_tolerance
                           : stop_loss ? StopReason::loss_tolerance
                                       : StopReason::max_iterations;
            trace.records.push_back(rec);
            break;
        }

        // Direction: p0 = -g0, then p_k = -g_k + beta_k p_{k-1}.
        double beta = 0.0;
        bool restart = false;
        if (k > 0) {
            if (since_restart >= restart_every) {
                restart = true;
            } else {
                const double denom = g_prev.squaredNorm();
                if (cfg.beta == BetaVariant::fletcher_reeves)
                    beta = g.squaredNorm() / denom;
                else
                    beta = std::max(0.0, g.dot(g - g_prev) / denom);
                if (!std::isfinite(beta)) restart = true;
            }
            if (restart) {
                beta = 0.0;
                p = -g;
            } else {
                p = -g + beta * p;
                if (!(g.dot(p) < 0)) {
                    restart = true;
                    beta = 0.0;
                    p = -g;
                }
            }
        }
        if (restart || k == 0) since_restart = 0;

        auto run_search = [&](double slope) -> std::optional<double> {
            if (options.step_search) return options.step_search(x, p, f, slope);
            double initial = 1.0;
            if (k == 0 || restart || prev_slope == 0.0)
                initial = 1.0 / std::max(1.0, p.norm());
            else
                initial = prev_step * prev_slope / slope;
            const Eigen::VectorXd base = x;
            const auto phi = [&](double a) { return objective.evaluate(base + a * p, nullptr); };
            const auto res = line_search(phi, f, slope, cfg.line_search, initial);
            if (!res) return std::nullopt;
            return res->step;
        };

        double slope = g.dot(p);
        std::optional<double> step = slope < 0 ? run_search(slope) : std::nullopt;
        if (!step && !(restart || k == 0)) {
            // Conjugate direction failed: fall back to steepest descent once.
            restart = true;
            beta = 0.0;
            p = -g;
            since_restart = 0;
            slope = g.dot(p);
            step = slope < 0 ? run_search(slope) : std::nullopt;
        }

        rec.beta = beta;
        rec.restart = restart;
        rec.slope = slope;
        if (options.observer) options.observer(IterationView{k, x, g, p, beta, restart});

        if (!step) {
            trace.reason = StopReason::line_search_failure;
            trace.records.push_back(rec);
            break;
        }

        rec.step = *step;
        trace.records.push_back(rec);

        x += *step * p;
        g_prev = g;
        const double f_prev = f;
        f = objective.evaluate(x, &g);
        if (!finite(f, g)) throw NumericError("non-finite loss or gradient", k + 1);
        last_improvement = f_prev - f;
        prev_step = *step;
        prev_slope = slope;
        ++since_restart;
    }

    out.x = std::move(x);
    return out;
}

void write_trace_csv(std::ostream& out, const TrainTrace& trace) {
    out << "iteration,loss,grad_norm,step,beta,restart\n";
    for (const auto& r : trace.records)
        out << r.iteration << ',' << format_exact(r.loss) << ',' << format_exact(r.grad_norm) << ','
            << format_exact(r.step) << ',' << format_exact(r.beta) << ',' << (r.restart ? 1 : 0) << '\n';
}

MlpObjective::MlpObjective(const Layout& layout, SampleBatch batch)
    : layout_(layout), batch_(std::move(batch)), scratch_(layout) {
    if (batch_.size() == 0) throw ParameterError("training data is empty");
}

double MlpObjective::evaluate(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const {
    scratch_.assign(x);
    if (grad) return loss_and_gradient(scratch_, batch_, *grad);
    return loss(scratch_, batch_);
}

TrainResult cg_minimize(const MlpModel& model, std::span<const LabeledSample> data, const TrainConfig& cfg,
                        const MinimizeOptions& options) {
    if (data.empty()) throw ParameterError("training data is empty");
    const MlpObjective objective(model.layout(), SampleBatch::from(data, model.layout()));
    auto res = cg_minimize(objective, model.flatten(), cfg, options);
    return {MlpModel::from_flat(model.layout(), res.x), std::move(res.trace)};
}

TrainResult train(std::span<const LabeledSample> data, const Layout& layout, const TrainConfig& cfg) {
    cfg.validate();
    return cg_minimize(MlpModel::random(layout, cfg.seed), data, cfg);
}

}  // namespace gcocr
