#include "palmgrid/raster/projection.hpp"

#include "palmgrid/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace palmgrid::raster {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
} // namespace

PlanePoint equal_area_forward(const LonLat& p) noexcept {
    return {kAuthalicRadiusMeters * p.lon * kDegToRad,
            kAuthalicRadiusMeters * std::sin(p.lat * kDegToRad)};
}

LonLat equal_area_inverse(const PlanePoint& p) noexcept {
    const double s = std::clamp(p.y / kAuthalicRadiusMeters, -1.0, 1.0);
    return {p.x / kAuthalicRadiusMeters / kDegToRad, std::asin(s) / kDegToRad};
}

PlanePoint to_grid_coords(const GridHeader& grid, const LonLat& p) {
    if (grid.crs_tag == kCrsDegrees) return {p.lon, p.lat};
    if (grid.crs_tag == kCrsMeters) return equal_area_forward(p);
    fail(ErrorKind::config, "unknown crs_tag '" + grid.crs_tag + "'");
}

LonLat from_grid_coords(const GridHeader& grid, const PlanePoint& p) {
    if (grid.crs_tag == kCrsDegrees) return {p.x, p.y};
    if (grid.crs_tag == kCrsMeters) return equal_area_inverse(p);
    fail(ErrorKind::config, "unknown crs_tag '" + grid.crs_tag + "'");
}

std::optional<PixelIndex> locate_pixel(const GridHeader& grid, const LonLat& p) {
    const PlanePoint xy = to_grid_coords(grid, p);
    const double fc = std::floor((xy.x - grid.origin_x) / grid.pixel_size_x);
    const double fr = std::floor((grid.origin_y - xy.y) / grid.pixel_size_y);
    if (!(fc >= 0.0) || !(fr >= 0.0) || fc >= static_cast<double>(grid.width) ||
        fr >= static_cast<double>(grid.height)) {
        return std::nullopt;
    }
    return PixelIndex{static_cast<std::size_t>(fr), static_cast<std::size_t>(fc)};
}

} // namespace palmgrid::raster
