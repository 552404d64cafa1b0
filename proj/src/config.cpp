#include "gcocr/config.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include "gcocr/errors.hpp"

namespace gcocr {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
    KeyValueConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("config line " + std::to_string(lineno) + " lacks '='", 0);
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError("config line " + std::to_string(lineno) + " has an empty key", 0);
        cfg.values_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    return parse(in);
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
    const auto v = get(key);
    if (!v) return std::nullopt;
    try {
        std::size_t used = 0;
        const double d = std::stod(*v, &used);
        if (used != v->size()) throw std::invalid_argument(*v);
        return d;
    } catch (const std::exception&) {
        throw ParameterError("'" + key + "' expects a number, got '" + *v + "'");
    }
}

std::optional<std::uint64_t> KeyValueConfig::get_uint(const std::string& key) const {
    const auto v = get(key);
    if (!v) return std::nullopt;
    try {
        std::size_t used = 0;
        if (!v->empty() && (*v)[0] == '-') throw std::invalid_argument(*v);
        const auto n = std::stoull(*v, &used);
        if (used != v->size()) throw std::invalid_argument(*v);
        return n;
    } catch (const std::exception&) {
        throw ParameterError("'" + key + "' expects a non-negative integer, got '" + *v + "'");
    }
}

std::optional<bool> KeyValueConfig::get_bool(const std::string& key) const {
    const auto v = get(key);
    if (!v) return std::nullopt;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw ParameterError("'" + key + "' expects a boolean, got '" + *v + "'");
}

std::optional<std::vector<double>> KeyValueConfig::get_list(const std::string& key) const {
    const auto v = get(key);
    if (!v) return std::nullopt;
    std::vector<double> out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParameterError("'" + key + "' expects a comma-separated number list, got '" + *v + "'");
        }
    }
    return out;
}

void KeyValueConfig::reject_unknown(const std::set<std::string>& known) const {
    for (const auto& [key, value] : values_) {
        if (known.count(key)) continue;
        const bool prefixed = std::any_of(known.begin(), known.end(), [&](const std::string& k) {
            return k.size() > 2 && k.compare(k.size() - 2, 2, ".*") == 0 && key.rfind(k.substr(0, k.size() - 1), 0) == 0;
        });
        if (!prefixed) throw ParameterError("unknown config key '" + key + "'");
    }
}

}  // namespace gcocr
