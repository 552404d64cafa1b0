#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gcocr {

struct Layout {
    std::size_t n_in = 0;
    std::size_t n_hidden = 0;
    std::size_t n_out = 0;

    std::size_t parameter_count() const { return n_hidden * n_in + n_hidden + n_out * n_hidden + n_out; }
    bool operator==(const Layout&) const = default;
};

// One-hidden-layer perceptron with logistic units on both layers.
//
// Flat parameter order: w1 row-major, b1, w2 row-major, b2.
class MlpModel {
public:
    MlpModel() = default;
    explicit MlpModel(const Layout& layout);  // all parameters zero

    // Every parameter drawn uniformly from [-0.5, 0.5].
    static MlpModel random(const Layout& layout, std::uint64_t seed);
    static MlpModel from_flat(const Layout& layout, const Eigen::VectorXd& params);

    const Layout& layout() const { return layout_; }
    std::size_t parameter_count() const { return layout_.parameter_count(); }

    Eigen::VectorXd flatten() const;
    void assign(const Eigen::VectorXd& params);

    Eigen::MatrixXd w1;  // n_hidden x n_in
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2;  // n_out x n_hidden
    Eigen::VectorXd b2;

    bool operator==(const MlpModel& other) const;

private:
    Layout layout_;
};

struct LabeledSample {
    std::vector<double> features;
    std::size_t label = 0;
};

inline constexpr double kTargetOn = 0.9;
inline constexpr double kTargetOff = 0.1;

// Samples packed as matrices for batched evaluation.
struct SampleBatch {
    Eigen::MatrixXd inputs;   // n x n_in
    Eigen::MatrixXd targets;  // n x n_out, 0.9 / 0.1 one-hot
    std::vector<std::size_t> labels;

    static SampleBatch from(std::span<const LabeledSample> data, const Layout& layout);
    std::size_t size() const { return labels.size(); }
};

double sigmoid(double z);

Eigen::VectorXd forward(const MlpModel& m, std::span<const double> x);
std::size_t predict(const MlpModel& m, std::span<const double> x);

// 1/2 sum over samples and outputs of (y - t)^2.
double loss(const MlpModel& m, std::span<const LabeledSample> data);
double loss(const MlpModel& m, const SampleBatch& batch);

// Exact gradient of loss with respect to the flat parameters.
Eigen::VectorXd gradient(const MlpModel& m, std::span<const LabeledSample> data);
Eigen::VectorXd gradient(const MlpModel& m, const SampleBatch& batch);

double loss_and_gradient(const MlpModel& m, const SampleBatch& batch, Eigen::VectorXd& grad);

// --- serialization ---------------------------------------------------------

struct ModelFile {
    MlpModel model;
    std::vector<std::string> classes;
    std::optional<std::size_t> feature_side;
    std::optional<double> feature_factor;
};

void write_model(std::ostream& out, const ModelFile& file);
ModelFile read_model(std::istream& in);
void save_model(const std::string& path, const ModelFile& file);
ModelFile load_model(const std::string& path);

// Shortest text that reads back to the same double.
std::string format_exact(double v);

}  // namespace gcocr
