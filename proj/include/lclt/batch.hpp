#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lclt/errors.hpp"

namespace lclt {

// Pipeline stages in chain order; YT is the Dedekind composition output.
enum class Stage { XT, X0T, MT, QT, RT, R1T, Ztilde, YT };

const char* stage_name(Stage s);
Stage stage_from_name(const std::string& name);

/// n x N matrix of real samples of one pipeline stage (row-major), with the
/// seed, a parameter snapshot, and rows flagged by the near-zero log guard.
struct SampleBatch {
    Stage stage = Stage::Ztilde;
    size_t n = 0;
    int dim = 0;
    std::vector<double> data;  // row-major n x dim
    uint64_t seed = 0;
    std::map<std::string, std::string> meta;
    std::vector<uint32_t> flagged_rows;  // sorted, unique
    uint64_t t_digest = 0;               // FNV-1a over the shared t fractions

    double at(size_t row, int col) const { return data[row * static_cast<size_t>(dim) + col]; }
    double& at(size_t row, int col) { return data[row * static_cast<size_t>(dim) + col]; }
    std::vector<double> column(int col) const;
    void validate() const;  // finite entries, consistent shape
};

}  // namespace lclt
