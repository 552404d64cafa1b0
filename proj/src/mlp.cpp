#include "gcocr/mlp.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "gcocr/errors.hpp"

namespace gcocr {

namespace {

void check_layout(const Layout& l) {
    if (l.n_in == 0 || l.n_hidden == 0 || l.n_out == 0) throw ShapeError("layer widths must be at least 1");
}

void check_input(const MlpModel& m, std::size_t n) {
    if (n != m.layout().n_in)
        throw ShapeError("input has " + std::to_string(n) + " features, model expects " + std::to_string(m.layout().n_in));
}

Eigen::MatrixXd logistic(const Eigen::MatrixXd& z) {
    return z.unaryExpr([](double v) { return sigmoid(v); });
}

}  // namespace

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

MlpModel::MlpModel(const Layout& layout)
    : w1(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(layout.n_hidden), static_cast<Eigen::Index>(layout.n_in))),
      b1(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.n_hidden))),
      w2(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(layout.n_out), static_cast<Eigen::Index>(layout.n_hidden))),
      b2(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.n_out))),
      layout_(layout) {
    check_layout(layout);
}

MlpModel MlpModel::random(const Layout& layout, std::uint64_t seed) {
    check_layout(layout);
    std::mt19937_64 rng(seed);
    Eigen::VectorXd p(static_cast<Eigen::Index>(layout.parameter_count()));
    // 53 random mantissa bits, independent of the standard library's distributions.
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
    return from_flat(layout, p);
}

MlpModel MlpModel::from_flat(const Layout& layout, const Eigen::VectorXd& params) {
    MlpModel m(layout);
    m.assign(params);
    return m;
}

Eigen::VectorXd MlpModel::flatten() const {
    Eigen::VectorXd p(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index at = 0;
    for (Eigen::Index r = 0; r < w1.rows(); ++r)
        for (Eigen::Index c = 0; c < w1.cols(); ++c) p[at++] = w1(r, c);
    for (Eigen::Index i = 0; i < b1.size(); ++i) p[at++] = b1[i];
    for (Eigen::Index r = 0; r < w2.rows(); ++r)
        for (Eigen::Index c = 0; c < w2.cols(); ++c) p[at++] = w2(r, c);
    for (Eigen::Index i = 0; i < b2.size(); ++i) p[at++] = b2[i];
    return p;
}

void MlpModel::assign(const Eigen::VectorXd& p) {
    if (static_cast<std::size_t>(p.size()) != parameter_count())
        throw ShapeError("parameter vector has " + std::to_string(p.size()) + " entries, model needs " +
                         std::to_string(parameter_count()));
    Eigen::Index at = 0;
    for (Eigen::Index r = 0; r < w1.rows(); ++r)
        for (Eigen::Index c = 0; c < w1.cols(); ++c) w1(r, c) = p[at++];
    for (Eigen::Index i = 0; i < b1.size(); ++i) b1[i] = p[at++];
    for (Eigen::Index r = 0; r < w2.rows(); ++r)
        for (Eigen::Index c = 0; c < w2.cols(); ++c) w2(r, c) = p[at++];
    for (Eigen::Index i = 0; i < b2.size(); ++i) b2[i] = p[at++];
}

bool MlpModel::operator==(const MlpModel& o) const {
    return layout_ == o.layout_ && w1 == o.w1 && b1 == o.b1 && w2 == o.w2 && b2 == o.b2;
}

SampleBatch SampleBatch::from(std::span<const LabeledSample> data, const Layout& layout) {
    SampleBatch b;
    const auto n = static_cast<Eigen::Index>(data.size());
    b.inputs.resize(n, static_cast<Eigen::Index>(layout.n_in));
    b.targets = Eigen::MatrixXd::Constant(n, static_cast<Eigen::Index>(layout.n_out), kTargetOff);
    b.labels.reserve(data.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = data[static_cast<std::size_t>(i)];
        if (s.features.size() != layout.n_in)
            throw ShapeError("sample " + std::to_string(i) + " has " + std::to_string(s.features.size()) +
                             " features, expected " + std::to_string(layout.n_in));
        if (s.label >= layout.n_out)
            throw ShapeError("sample " + std::to_string(i) + " label " + std::to_string(s.label) + " out of range");
        for (Eigen::Index j = 0; j < b.inputs.cols(); ++j) b.inputs(i, j) = s.features[static_cast<std::size_t>(j)];
        b.targets(i, static_cast<Eigen::Index>(s.label)) = kTargetOn;
        b.labels.push_back(s.label);
    }
    return b;
}

Eigen::VectorXd forward(const MlpModel& m, std::span<const double> x) {
    check_input(m, x.size());
    const Eigen::Map<const Eigen::VectorXd> in(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd h = logistic(m.w1 * in + m.b1);
    return logistic(m.w2 * h + m.b2);
}

std::size_t predict(const MlpModel& m, std::span<const double> x) {
    const Eigen::VectorXd y = forward(m, x);
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < y.size(); ++j)
        if (y[j] > y[best]) best = j;
    return static_cast<std::size_t>(best);
}

double loss_and_gradient(const MlpModel& m, const SampleBatch& batch, Eigen::VectorXd& grad) {
    if (batch.size() == 0) throw ParameterError("loss requires at least one sample");
    check_input(m, static_cast<std::size_t>(batch.inputs.cols()));
    if (static_cast<std::size_t>(batch.targets.cols()) != m.layout().n_out) throw ShapeError("target width mismatch");

    const Eigen::MatrixXd hidden = logistic((batch.inputs * m.w1.transpose()).rowwise() + m.b1.transpose());
    const Eigen::MatrixXd out = logistic((hidden * m.w2.transpose()).rowwise() + m.b2.transpose());
    const Eigen::MatrixXd err = out - batch.targets;
    const double value = 0.5 * err.squaredNorm();

    const Eigen::MatrixXd delta_out = err.array() * out.array() * (1.0 - out.array());
    const Eigen::MatrixXd delta_hidden =
        (delta_out * m.w2).array() * hidden.array() * (1.0 - hidden.array());

    MlpModel g(m.layout());
    g.w2 = delta_out.transpose() * hidden;
    g.b2 = delta_out.colwise().sum().transpose();
    g.w1 = delta_hidden.transpose() * batch.inputs;
    g.b1 = delta_hidden.colwise().sum().transpose();
    grad = g.flatten();
    return value;
}

double loss(const MlpModel& m, const SampleBatch& batch) {
    if (batch.size() == 0) throw ParameterError("loss requires at least one sample");
    check_input(m, static_cast<std::size_t>(batch.inputs.cols()));
    const Eigen::MatrixXd hidden = logistic((batch.inputs * m.w1.transpose()).rowwise() + m.b1.transpose());
    const Eigen::MatrixXd out = logistic((hidden * m.w2.transpose()).rowwise() + m.b2.transpose());
    return 0.5 * (out - batch.targets).squaredNorm();
}

double loss(const MlpModel& m, std::span<const LabeledSample> data) {
    if (data.empty()) throw ParameterError("loss requires at least one sample");
    return loss(m, SampleBatch::from(data, m.layout()));
}

Eigen::VectorXd gradient(const MlpModel& m, const SampleBatch& batch) {
    Eigen::VectorXd g;
    loss_and_gradient(m, batch, g);
    return g;
}

Eigen::VectorXd gradient(const MlpModel& m, std::span<const LabeledSample> data) {
    if (data.empty()) throw ParameterError("gradient requires at least one sample");
    return gradient(m, SampleBatch::from(data, m.layout()));
}

// ---------------------------------------------------------------------------
// serialization

namespace {

constexpr const char* kMagic = "gcocr-mlp";
constexpr int kVersion = 1;

double parse_double(const std::string& tok) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) throw ParseError("bad number '" + tok + "' in model file", 0);
    return v;
}

}  // namespace

std::string format_exact(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_model(std::ostream& out, const ModelFile& f) {
    const auto& l = f.model.layout();
    out << kMagic << ' ' << kVersion << '\n';
    out << "layers " << l.n_in << ' ' << l.n_hidden << ' ' << l.n_out << '\n';
    if (!f.classes.empty()) {
        out << "classes";
        for (const auto& c : f.classes) out << ' ' << c;
        out << '\n';
    }
    if (f.feature_side) out << "feature-side " << *f.feature_side << '\n';
    if (f.feature_factor) out << "feature-factor " << format_exact(*f.feature_factor) << '\n';
    const Eigen::VectorXd p = f.model.flatten();
    out << "params " << p.size() << '\n';
    for (Eigen::Index i = 0; i < p.size(); ++i) out << format_exact(p[i]) << '\n';
}

ModelFile read_model(std::istream& in) {
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != kMagic) throw ParseError("not a model file", 0);
    if (version != kVersion) throw ParseError("unsupported model version " + std::to_string(version), 0);

    ModelFile f;
    Layout layout;
    bool have_layout = false;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "layers") {
            if (!(ls >> layout.n_in >> layout.n_hidden >> layout.n_out)) throw ParseError("bad layers line", 0);
            have_layout = true;
        } else if (key == "classes") {
            std::string c;
            while (ls >> c) f.classes.push_back(c);
        } else if (key == "feature-side") {
            std::size_t k = 0;
            if (!(ls >> k)) throw ParseError("bad feature-side line", 0);
            f.feature_side = k;
        } else if (key == "feature-factor") {
            std::string tok;
            ls >> tok;
            f.feature_factor = parse_double(tok);
        } else if (key == "params") {
            if (!have_layout) throw ParseError("params before layers", 0);
            std::size_t n = 0;
            ls >> n;
            if (n != layout.parameter_count()) throw ParseError("parameter count does not match layers", 0);
            Eigen::VectorXd p(static_cast<Eigen::Index>(n));
            std::string tok;
            for (std::size_t i = 0; i < n; ++i) {
                if (!(in >> tok)) throw ParseError("truncated parameter list", 0);
                p[static_cast<Eigen::Index>(i)] = parse_double(tok);
            }
            f.model = MlpModel::from_flat(layout, p);
            if (!f.classes.empty() && f.classes.size() != layout.n_out)
                throw ParseError("class list length does not match output width", 0);
            return f;
        } else {
            throw ParseError("unknown model file key '" + key + "'", 0);
        }
    }
    throw ParseError("model file has no params section", 0);
}

void save_model(const std::string& path, const ModelFile& file) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    write_model(out, file);
}

ModelFile load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return read_model(in);
}

}  // namespace gcocr
