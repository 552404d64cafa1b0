#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "gcocr/image.hpp"

namespace gcocr {

enum class Split { train, test };

std::string to_string(Split s);

struct Sample {
    std::string id;  // relative path for on-disk corpora
    GrayImage image;
    std::size_t label = 0;
    Split split = Split::train;
};

struct Dataset {
    std::vector<std::string> class_names;
    std::vector<Sample> samples;
    std::vector<std::string> warnings;

    std::size_t count(Split s) const;
    std::vector<const Sample*> split(Split s) const;
};

// Reads root/{train,test}/<class>/*.pgm. Labels follow the sorted class
// directory names; samples are ordered by split, then path.
Dataset load_corpus(const std::filesystem::path& root);

// Inverse of load_corpus: root/<split>/<class>/<nnnn>.pgm (P5).
void write_corpus(const Dataset& data, const std::filesystem::path& root);

}  // namespace gcocr
