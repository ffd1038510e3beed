#pragma once

#include "palmgrid/raster/projection.hpp"

#include <array>
#include <cstdint>
#include <functional>

namespace palmgrid::dataset {

/// Pointy-top hexagons of a given area laid over the equal-area plane.
struct HexGridSpec {
    double cell_area_km2 = 26000.0;
    double offset_x_m = 0.0; // plane coordinates of the (0, 0) cell center
    double offset_y_m = 0.0;

    /// Edge length s with area = 3*sqrt(3)/2 * s^2.
    double edge_length_m() const;
    void validate() const;
};

struct HexCell {
    std::int64_t q = 0;
    std::int64_t r = 0;

    bool operator==(const HexCell&) const = default;
    auto operator<=>(const HexCell&) const = default;
};

struct HexCellHash {
    std::size_t operator()(const HexCell& c) const noexcept;
};

HexCell hex_cell_of(const raster::LonLat& point, const HexGridSpec& spec);
HexCell hex_cell_at(const raster::PlanePoint& point, const HexGridSpec& spec);

raster::PlanePoint hex_center(const HexCell& cell, const HexGridSpec& spec);
std::array<raster::PlanePoint, 6> hex_vertices(const HexCell& cell, const HexGridSpec& spec);
std::array<HexCell, 6> hex_neighbors(const HexCell& cell);

} // namespace palmgrid::dataset
