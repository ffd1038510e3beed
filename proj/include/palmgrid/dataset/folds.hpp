#pragma once

#include "palmgrid/dataset/hexgrid.hpp"
#include "palmgrid/dataset/sample.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace palmgrid::dataset {

inline constexpr int kFoldCount = 3;

struct FoldStats {
    int index = 0;
    std::size_t points = 0;
    std::size_t positives = 0; // label >= 0.5
    std::optional<double> positive_fraction; // undefined for an empty fold
};

struct FoldAssignment {
    std::vector<int> fold_of_point;
    std::array<FoldStats, kFoldCount> folds{};
    int training_fold = 0;   // most points, ties to the lowest index
    int validation_fold = 1; // larger of the remaining two, same tie rule
    int test_fold = 2;
};

/// Fold of a hex cell: stable 64-bit hash of (q, r, seed) mod 3.
int fold_of_cell(const HexCell& cell, std::uint64_t seed);

/// Throws ErrorKind::argument on an empty point list.
FoldAssignment assign_folds(std::span<const SamplePoint> points, const HexGridSpec& spec, std::uint64_t seed);

/// {"schema_version":1,"folds":[{"index","points","positives","positive_fraction"}],
///  "training_fold","validation_fold","test_fold"}
std::string fold_report_json(const FoldAssignment& assignment);

} // namespace palmgrid::dataset
