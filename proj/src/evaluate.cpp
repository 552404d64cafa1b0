#include "gcocr/evaluate.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "gcocr/errors.hpp"

namespace gcocr {

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted) {
    if (truth >= classes_ || predicted >= classes_) throw RangeError("class index outside confusion matrix");
    ++counts_[truth * classes_ + predicted];
}

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const {
    std::size_t s = 0;
    for (std::size_t p = 0; p < classes_; ++p) s += at(truth, p);
    return s;
}

std::size_t ConfusionMatrix::total() const {
    std::size_t s = 0;
    for (auto c : counts_) s += c;
    return s;
}

std::size_t ConfusionMatrix::correct() const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < classes_; ++i) s += at(i, i);
    return s;
}

void ConfusionMatrix::print(std::ostream& out, const std::vector<std::string>& names) const {
    std::size_t w = 5;
    for (const auto& n : names) w = std::max(w, n.size() + 1);
    const auto name = [&](std::size_t i) { return i < names.size() ? names[i] : std::to_string(i); };
    out << std::setw(static_cast<int>(w)) << "";
    for (std::size_t p = 0; p < classes_; ++p) out << std::setw(static_cast<int>(w)) << name(p);
    out << '\n';
    for (std::size_t t = 0; t < classes_; ++t) {
        out << std::setw(static_cast<int>(w)) << name(t);
        for (std::size_t p = 0; p < classes_; ++p) out << std::setw(static_cast<int>(w)) << at(t, p);
        out << '\n';
    }
}

Evaluation evaluate(const MlpModel& model, std::span<const LabeledSample> data) {
    if (data.empty()) throw ParameterError("cannot evaluate on an empty split");
    Evaluation e{0.0, ConfusionMatrix(model.layout().n_out)};
    for (const auto& s : data) e.confusion.add(s.label, predict(model, s.features));
    e.accuracy = 100.0 * static_cast<double>(e.confusion.correct()) / static_cast<double>(data.size());
    return e;
}

}  // namespace gcocr
