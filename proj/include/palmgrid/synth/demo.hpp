#pragma once

#include <cstdint>
#include <filesystem>

namespace palmgrid::synth {

struct DemoSpec {
    std::size_t size = 128;      // pixels per side
    double pixel_m = 10.0;
    double lon = 101.5;          // upper-left corner
    double lat = 2.5;
    std::size_t samples_per_year = 1500;
    std::uint64_t seed = 42;
};

/// Writes a small synthetic landscape with palm expanding between 2020 and
/// 2023: optical and C-band scene manifests, yearly L-band grids with a
/// missing 2020, a DEM, forest and stability masks, labelled points, regions
/// and a demo.toml holding the pipeline's settings. Files are named relative
/// to `dir`.
void write_demo_dataset(const std::filesystem::path& dir, const DemoSpec& spec = {});

} // namespace palmgrid::synth
