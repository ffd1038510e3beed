#pragma once

#include "palmgrid/dataset/sample.hpp"
#include "palmgrid/raster/grid.hpp"

#include <cstdint>
#include <vector>

namespace palmgrid::dataset {

inline constexpr const char* kPseudoAbsenceSource = "pseudo_absence";

/// Label-0 points drawn uniformly without replacement from the 1-pixels of
/// each stability mask, placed at pixel centers. Non-tree points come first,
/// then forest points, each block in raster order. Throws ErrorKind::capacity
/// naming the stratum when a request exceeds its eligible pixels.
std::vector<SamplePoint> pseudo_absence_sample(const raster::MaskGrid& non_tree,
                                               const raster::MaskGrid& stable_forest, std::size_t n_non_tree,
                                               std::size_t n_forest, std::uint64_t seed, int year = 0);

} // namespace palmgrid::dataset
