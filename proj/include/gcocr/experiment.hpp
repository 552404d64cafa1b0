#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gcocr/cg.hpp"
#include "gcocr/config.hpp"
#include "gcocr/dataset.hpp"
#include "gcocr/evaluate.hpp"
#include "gcocr/pipeline.hpp"
#include "gcocr/synth.hpp"

namespace gcocr {

struct ExperimentConfig {
    std::vector<std::size_t> sides{3, 4, 5};
    // Normalization half-ranges A per side, written +(A/2A) in reports.
    std::map<std::size_t, std::vector<double>> factors{{3, {35, 40}}, {4, {30, 40}}, {5, {25, 30}}};
    std::size_t hidden = 0;  // 0: hidden width equals the input width
    TrainConfig train;
    ThresholdConfig threshold;
    ThinningSchedule schedule = ThinningSchedule::sequential;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    SynthCounts synth;

    std::size_t hidden_width(std::size_t n_in) const { return hidden ? hidden : n_in; }
    void validate() const;
};

// Recognised keys: see README. Unknown keys are rejected.
void apply_config(const KeyValueConfig& kv, TrainConfig& cfg);
void apply_config(const KeyValueConfig& kv, ExperimentConfig& cfg);

std::string factor_label(double half_range);  // "+(30/60)"

std::uint64_t cell_seed(std::uint64_t master, std::size_t side, double factor);

struct ExcludedSample {
    std::string id;
    Split split;
    std::string reason;
};

// Skeletons of every usable sample; the expensive part of the pipeline,
// shared by all cells.
struct PreparedSample {
    const Sample* source;
    BinaryImage skeleton;
};

struct PreparedData {
    std::vector<std::string> class_names;
    std::vector<PreparedSample> samples;
    std::vector<ExcludedSample> excluded;
};

PreparedData prepare(const Dataset& data, const PipelineConfig& pipeline);

std::vector<LabeledSample> featurize(const PreparedData& data, Split split, std::size_t side, double factor);

struct CellResult {
    std::size_t side = 0;
    double factor = 0;
    Layout layout;
    std::uint64_t seed = 0;
    double train_accuracy = 0;
    double test_accuracy = 0;
    double seconds = 0;
    std::size_t iterations = 0;
    StopReason stop = StopReason::max_iterations;
    ConfusionMatrix test_confusion;
    std::string error;  // non-empty when training failed

    std::size_t feature_size() const { return side * side; }
    bool ok() const { return error.empty(); }
};

struct ExperimentReport {
    std::vector<std::string> class_names;
    std::vector<CellResult> cells;
    std::vector<ExcludedSample> excluded;

    // feature_size,factor,train_acc,test_acc,seconds
    void write_csv(std::ostream& out, bool include_timing = true) const;
    // Grouped by feature size, one line per factor.
    void write_table(std::ostream& out) const;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg, const Dataset& data);

}  // namespace gcocr
