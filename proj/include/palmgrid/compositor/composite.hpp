#pragma once

#include "palmgrid/compositor/scene.hpp"
#include "palmgrid/raster/grid.hpp"

#include <map>
#include <span>
#include <string>

namespace palmgrid::compositor {

inline constexpr double kDefaultCloudThreshold = 0.6;

/// Affine window mapping decibels onto [0, 1].
struct DbRange {
    double lo = -30.0;
    double hi = 5.0;
};

inline constexpr DbRange kCBandDbRange{-30.0, 5.0};
inline constexpr DbRange kLBandDbRange{-40.0, 0.0};

/// 10*log10(linear) mapped through `range` and clamped to [0, 1]. A linear
/// value of exactly 0 (a flat standard deviation) maps to the scaled lo bound.
double scale_linear_to_db01(double linear, const DbRange& range);

/// Per-pixel mean of `band` over scenes whose quality is >= cloud_threshold
/// there. Scenes without a quality grid always count; nodata observations and
/// nodata quality never count. Pixels with no qualifying observation are nodata.
raster::BandGrid masked_annual_mean(std::span<const Scene> scenes, const std::string& band,
                                    double cloud_threshold = kDefaultCloudThreshold);

struct SarStats {
    raster::BandGrid min;
    raster::BandGrid max;
    raster::BandGrid mean;
    raster::BandGrid sd;
};

/// Min, max, mean and population standard deviation of linear backscatter,
/// each then converted to scaled dB. Nonpositive or nodata observations are
/// dropped; a pixel with no usable observation is nodata in all four outputs.
SarStats sar_annual_stats(std::span<const Scene> scenes, const std::string& polarization,
                          const DbRange& range = kCBandDbRange);

/// Converts a linear-power grid to scaled dB pixel-wise; nonpositive values
/// become nodata.
raster::BandGrid to_scaled_db(const raster::BandGrid& linear, const DbRange& range);

/// Fills nodata in the target year with the mean of the other years inside a
/// centered window of `window` years. The target may be absent from `yearly`,
/// in which case every pixel is filled from its neighbors.
raster::BandGrid gapfill_rolling_mean(const std::map<int, raster::BandGrid>& yearly, int target_year,
                                      int window = 3);

/// Horn 3x3 slope in degrees / 90, clamped to [0, 1]. Edges replicate the
/// border; any nodata in the 3x3 neighbourhood gives nodata.
raster::BandGrid slope_from_dem(const raster::BandGrid& dem);

} // namespace palmgrid::compositor
