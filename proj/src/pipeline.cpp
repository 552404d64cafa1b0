#include "gcocr/pipeline.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "gcocr/errors.hpp"

namespace gcocr {

BinaryImage preprocess(const GrayImage& img, const PipelineConfig& cfg) {
    const BinaryImage bin = binarize(img, cfg.threshold);
    const BinaryImage glyph = crop(bin, bounding_box(bin));
    return thin(scale_to(glyph, kCanonicalSize, kCanonicalSize), cfg.schedule);
}

FeatureVector run_pipeline(const GrayImage& img, const PipelineConfig& cfg) {
    return normalize(extract_features(preprocess(img, cfg), cfg.side), cfg.factor);
}

ThinningSchedule parse_schedule(const std::string& s) {
    if (s == "layered") return ThinningSchedule::layered;
    if (s == "sequential") return ThinningSchedule::sequential;
    if (s == "parallel") return ThinningSchedule::parallel;
    throw ParameterError("unknown thinning schedule '" + s + "'");
}

std::string to_string(ThinningSchedule s) {
    switch (s) {
        case ThinningSchedule::layered: return "layered";
        case ThinningSchedule::sequential: return "sequential";
        case ThinningSchedule::parallel: return "parallel";
    }
    return "unknown";
}

void write_feature_csv(std::ostream& out, const FeatureTable& table, std::size_t width) {
    out << "label";
    for (std::size_t i = 1; i <= width; ++i) out << ",gc_" << i;
    out << '\n';
    char buf[64];
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != width) throw ShapeError("feature rows have inconsistent widths");
        out << table.labels[r];
        for (const double v : table.rows[r]) {
            std::snprintf(buf, sizeof buf, "%.6f", v);
            out << ',' << buf;
        }
        out << '\n';
    }
}

FeatureTable read_feature_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("label", 0) != 0) throw ParseError("feature CSV needs a label header", 0);
    std::size_t width = 0;
    for (const char c : line)
        if (c == ',') ++width;

    FeatureTable t;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        t.labels.push_back(cell);
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw ParseError("bad value '" + cell + "' on line " + std::to_string(lineno), 0);
            }
        }
        if (row.size() != width) throw ShapeError("line " + std::to_string(lineno) + " has the wrong column count");
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace gcocr
