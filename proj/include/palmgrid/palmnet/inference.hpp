#pragma once

#include "palmgrid/compositor/annual_stack.hpp"
#include "palmgrid/dataset/sample.hpp"
#include "palmgrid/palmnet/mlp.hpp"

#include <map>
#include <span>
#include <vector>

namespace palmgrid::palmnet {

/// Per-pixel forward pass over a 24-channel stack. Pixels with nodata in any
/// channel are nodata. Throws ErrorKind::shape for a wrong channel count.
raster::BandGrid predict_grid(const MlpParams& params, const compositor::AnnualStack& stack);

struct ExtractedFeatures {
    LabeledBatch batch;
    std::vector<std::size_t> sample_index; // row -> index into the input samples
    std::size_t skipped_outside = 0;       // no stack for the year, or outside its extent
    std::size_t skipped_nodata = 0;
};

/// Feature rows for every sample that lands on a valid stack pixel. Samples
/// use the stack of their own year; `fallback` (may be null) serves years
/// without one.
ExtractedFeatures extract_features(std::span<const dataset::SamplePoint> samples,
                                   const std::map<int, compositor::AnnualStack>& stacks,
                                   const compositor::AnnualStack* fallback = nullptr);

} // namespace palmgrid::palmnet
