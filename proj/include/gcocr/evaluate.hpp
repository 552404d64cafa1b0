#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gcocr/mlp.hpp"

namespace gcocr {

// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t classes = 0) : classes_(classes), counts_(classes * classes, 0) {}

    void add(std::size_t truth, std::size_t predicted);
    std::size_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * classes_ + predicted]; }
    std::size_t classes() const { return classes_; }
    std::size_t row_sum(std::size_t truth) const;
    std::size_t total() const;
    std::size_t correct() const;

    void print(std::ostream& out, const std::vector<std::string>& names) const;

    bool operator==(const ConfusionMatrix&) const = default;

private:
    std::size_t classes_;
    std::vector<std::size_t> counts_;
};

struct Evaluation {
    double accuracy = 0.0;  // percent
    ConfusionMatrix confusion;
};

Evaluation evaluate(const MlpModel& model, std::span<const LabeledSample> data);

}  // namespace gcocr
