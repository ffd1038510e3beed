#include "palmgrid/palmnet/inference.hpp"

#include "palmgrid/error.hpp"
#include "palmgrid/parallel.hpp"
#include "palmgrid/raster/projection.hpp"

#include <array>
#include <cmath>

namespace palmgrid::palmnet {

namespace {

bool gather(const compositor::AnnualStack& stack, std::size_t i, std::array<double, kInputSize>& x) {
    for (std::size_t c = 0; c < kInputSize; ++c) {
        const auto& ch = stack.channels[c];
        const float v = ch.values[i];
        if (ch.is_nodata(v) || !std::isfinite(v)) return false;
        x[c] = v;
    }
    return true;
}

void check_stack(const compositor::AnnualStack& stack) {
    if (stack.channels.size() != kInputSize) {
        fail(ErrorKind::shape, "stack has " + std::to_string(stack.channels.size()) + " channels, model needs 24");
    }
    for (const auto& ch : stack.channels) {
        ch.validate();
        raster::require_aligned(stack.channels.front().header, ch.header, "stack channel " + ch.header.band_name);
    }
}

} // namespace

raster::BandGrid predict_grid(const MlpParams& params, const compositor::AnnualStack& stack) {
    check_stack(stack);
    params.validate();
    raster::GridHeader header = stack.header();
    header.band_name = "palm_probability";
    raster::BandGrid out = raster::BandGrid::filled(header, header.nodata);
    parallel_for(header.height, [&](std::size_t r0, std::size_t r1) {
        std::array<double, kInputSize> x{};
        for (std::size_t i = r0 * header.width; i < r1 * header.width; ++i) {
            if (gather(stack, i, x)) out.values[i] = static_cast<float>(forward(params, x));
        }
    });
    return out;
}

ExtractedFeatures extract_features(std::span<const dataset::SamplePoint> samples,
                                   const std::map<int, compositor::AnnualStack>& stacks,
                                   const compositor::AnnualStack* fallback) {
    for (const auto& [year, stack] : stacks) check_stack(stack);
    if (fallback) check_stack(*fallback);

    ExtractedFeatures out;
    std::array<double, kInputSize> x{};
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto& s = samples[k];
        auto it = stacks.find(s.year);
        const compositor::AnnualStack* stack = it != stacks.end() ? &it->second : fallback;
        if (!stack) {
            ++out.skipped_outside;
            continue;
        }
        const auto px = raster::locate_pixel(stack->header(), {s.lon, s.lat});
        if (!px) {
            ++out.skipped_outside;
            continue;
        }
        if (!gather(*stack, px->row * stack->header().width + px->col, x)) {
            ++out.skipped_nodata;
            continue;
        }
        out.batch.push_back(x, s.label, s.weight);
        out.sample_index.push_back(k);
    }
    return out;
}

} // namespace palmgrid::palmnet
