#pragma once

#include "palmgrid/raster/grid.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace palmgrid::raster {

struct Vertex {
    double x = 0.0; // lon, or easting for "meters" grids
    double y = 0.0; // lat, or northing
};

/// Single-ring polygon, implicitly closed. Coordinates are in the map units of
/// the grids it is used with; there is no reprojection.
struct RegionOfInterest {
    std::string id;
    std::vector<Vertex> ring;

    /// Throws ErrorKind::argument for fewer than 3 distinct vertices or a
    /// self-intersecting ring.
    void validate() const;
};

/// Parses the ROI JSON array format and validates each ring.
std::vector<RegionOfInterest> parse_rois(std::string_view json_text);
std::vector<RegionOfInterest> read_rois(const std::filesystem::path& path);
std::string format_rois(const std::vector<RegionOfInterest>& rois);

/// 1 where the pixel center lies inside the ring under the even-odd rule,
/// else 0. A ring outside the grid yields an all-zero mask.
MaskGrid rasterize_roi(const RegionOfInterest& roi, const GridHeader& grid);

} // namespace palmgrid::raster
