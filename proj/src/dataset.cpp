#include "gcocr/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <set>

#include "gcocr/errors.hpp"

namespace gcocr {

namespace fs = std::filesystem;

std::string to_string(Split s) { return s == Split::train ? "train" : "test"; }

std::size_t Dataset::count(Split s) const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [s](const Sample& x) { return x.split == s; }));
}

std::vector<const Sample*> Dataset::split(Split s) const {
    std::vector<const Sample*> out;
    for (const auto& x : samples)
        if (x.split == s) out.push_back(&x);
    return out;
}

namespace {

bool is_pgm(const fs::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".pgm";
}

// class name -> sorted files
std::map<std::string, std::vector<fs::path>> scan_split(const fs::path& dir, std::vector<std::string>& warnings) {
    std::map<std::string, std::vector<fs::path>> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_directory()) continue;
        std::vector<fs::path> files;
        for (const auto& f : fs::directory_iterator(entry.path()))
            if (f.is_regular_file() && is_pgm(f.path())) files.push_back(f.path());
        std::sort(files.begin(), files.end());
        const auto name = entry.path().filename().string();
        if (files.empty()) {
            warnings.push_back("skipping empty class directory " + entry.path().string());
            continue;
        }
        out[name] = std::move(files);
    }
    return out;
}

}  // namespace

Dataset load_corpus(const fs::path& root) {
    if (!fs::is_directory(root)) throw Error("corpus root " + root.string() + " is not a directory");
    Dataset data;
    std::map<Split, std::map<std::string, std::vector<fs::path>>> splits;
    for (const Split s : {Split::train, Split::test}) {
        const auto dir = root / to_string(s);
        if (!fs::is_directory(dir)) {
            data.warnings.push_back("missing " + to_string(s) + "/ directory under " + root.string());
            continue;
        }
        splits[s] = scan_split(dir, data.warnings);
    }

    std::set<std::string> names;
    for (const auto& [s, classes] : splits)
        for (const auto& [name, files] : classes) names.insert(name);
    if (names.empty()) throw Error("no class directories with .pgm files under " + root.string());
    data.class_names.assign(names.begin(), names.end());

    std::map<std::string, std::size_t> label_of;
    for (std::size_t i = 0; i < data.class_names.size(); ++i) label_of[data.class_names[i]] = i;

    for (const auto& [s, classes] : splits) {
        std::vector<std::pair<fs::path, std::size_t>> files;
        for (const auto& [name, paths] : classes)
            for (const auto& p : paths) files.emplace_back(p, label_of[name]);
        std::sort(files.begin(), files.end());
        for (const auto& [path, label] : files)
            data.samples.push_back({fs::relative(path, root).generic_string(), load_pgm(path), label, s});
    }
    return data;
}

void write_corpus(const Dataset& data, const fs::path& root) {
    std::map<std::pair<Split, std::size_t>, std::size_t> next;
    for (const auto& s : data.samples) {
        const auto dir = root / to_string(s.split) / data.class_names.at(s.label);
        fs::create_directories(dir);
        char name[32];
        std::snprintf(name, sizeof name, "%04zu.pgm", next[{s.split, s.label}]++);
        save_pgm(s.image, dir / name);
    }
}

}  // namespace gcocr
