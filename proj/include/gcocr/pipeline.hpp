#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "gcocr/features.hpp"
#include "gcocr/image.hpp"
#include "gcocr/thinning.hpp"

namespace gcocr {

struct PipelineConfig {
    ThresholdConfig threshold;
    ThinningSchedule schedule = ThinningSchedule::sequential;
    std::size_t side = 4;
    double factor = 30.0;
};

// binarize -> bounding_box -> crop -> scale_to(100, 100) -> thin.
BinaryImage preprocess(const GrayImage& img, const PipelineConfig& cfg);

// preprocess, then extract_features(side) and normalize(factor).
FeatureVector run_pipeline(const GrayImage& img, const PipelineConfig& cfg);

ThinningSchedule parse_schedule(const std::string& s);
std::string to_string(ThinningSchedule s);

// Feature CSV: header "label,gc_1,...,gc_N", one row per image, values with
// six decimals.
struct FeatureTable {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;

    std::size_t width() const { return rows.empty() ? 0 : rows.front().size(); }
};

void write_feature_csv(std::ostream& out, const FeatureTable& table, std::size_t width);
FeatureTable read_feature_csv(std::istream& in);

}  // namespace gcocr
