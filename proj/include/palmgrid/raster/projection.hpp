#pragma once

#include "palmgrid/raster/grid.hpp"

#include <optional>

namespace palmgrid::raster {

/// Authalic sphere radius used by the equal-area mapping.
inline constexpr double kAuthalicRadiusMeters = 6371007.2;

struct PlanePoint {
    double x = 0.0; // meters
    double y = 0.0; // meters
};

struct LonLat {
    double lon = 0.0;
    double lat = 0.0;
};

/// Lambert cylindrical equal-area on the authalic sphere, standard parallel 0:
/// x = R * lon, y = R * sin(lat).
PlanePoint equal_area_forward(const LonLat& p) noexcept;
LonLat equal_area_inverse(const PlanePoint& p) noexcept;

/// Map coordinates of a lon/lat point in the grid's coordinate system.
/// "degrees" grids use lon/lat directly; "meters" grids are taken to be in the
/// equal-area plane above.
PlanePoint to_grid_coords(const GridHeader& grid, const LonLat& p);
LonLat from_grid_coords(const GridHeader& grid, const PlanePoint& p);

struct PixelIndex {
    std::size_t row = 0;
    std::size_t col = 0;
};

/// Pixel containing the point, or nullopt when it falls outside the grid.
std::optional<PixelIndex> locate_pixel(const GridHeader& grid, const LonLat& p);

} // namespace palmgrid::raster
