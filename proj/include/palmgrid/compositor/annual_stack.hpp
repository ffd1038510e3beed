#pragma once

#include "palmgrid/compositor/composite.hpp"
#include "palmgrid/raster/grid.hpp"

#include <array>
#include <filesystem>
#include <string_view>
#include <vector>

namespace palmgrid::compositor {

inline constexpr std::size_t kStackChannels = 24;

/// Fixed predictor order: 8 C-band SAR statistics, 13 optical means, 2 L-band
/// polarizations, slope.
inline constexpr std::array<std::string_view, kStackChannels> kChannelOrder{
    "VVmin", "VVmax", "VVmean", "VVsd", "VHmin", "VHmax", "VHmean", "VHsd",
    "B1",    "B2",    "B3",     "B4",   "B5",    "B6",    "B7",     "B8",
    "B8A",   "B9",    "B10",    "B11",  "B12",   "HH",    "HV",     "slope"};

inline constexpr std::array<std::string_view, 13> kOpticalBands{
    "B1", "B2", "B3", "B4", "B5", "B6", "B7", "B8", "B8A", "B9", "B10", "B11", "B12"};

struct AnnualStack {
    int year = 0;
    std::vector<raster::BandGrid> channels;

    const raster::GridHeader& header() const { return channels.front().header; }
};

/// Checks count and alignment and stamps the canonical channel names.
/// Throws ErrorKind::schema on a wrong count or misaligned channel.
AnnualStack assemble_annual_stack(int year, std::vector<raster::BandGrid> channels);

/// Stack directory: one FGRD per channel plus stack.json listing them in order.
void write_stack(const AnnualStack& stack, const std::filesystem::path& dir);
AnnualStack read_stack(const std::filesystem::path& manifest);

struct PalsarYear {
    raster::BandGrid hh;
    raster::BandGrid hv;
};

/// {"years": {"2019": {"HH": "path", "HV": "path"}, ...}}
std::map<int, PalsarYear> load_palsar_manifest(const std::filesystem::path& manifest);

struct CompositeOptions {
    double cloud_threshold = kDefaultCloudThreshold;
    DbRange c_band = kCBandDbRange;
    DbRange l_band = kLBandDbRange;
    int gapfill_window = 3;
};

/// Runs every compositing step for one calendar year and assembles the stack.
AnnualStack build_annual_stack(int year, const std::vector<Scene>& optical_scenes,
                               const std::vector<Scene>& sar_scenes,
                               const std::map<int, PalsarYear>& palsar, const raster::BandGrid& dem,
                               const CompositeOptions& options = {});

} // namespace palmgrid::compositor
