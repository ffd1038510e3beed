#include "palmgrid/dataset/hexgrid.hpp"

#include "palmgrid/error.hpp"
#include "palmgrid/rng.hpp"

#include <cmath>
#include <numbers>

namespace palmgrid::dataset {

namespace {
const double kSqrt3 = std::sqrt(3.0);
} // namespace

double HexGridSpec::edge_length_m() const {
    return std::sqrt(2.0 * cell_area_km2 * 1e6 / (3.0 * kSqrt3));
}

void HexGridSpec::validate() const {
    if (!(cell_area_km2 > 0.0) || !std::isfinite(cell_area_km2)) {
        fail(ErrorKind::config, "hex cell area must be positive");
    }
    if (!std::isfinite(offset_x_m) || !std::isfinite(offset_y_m)) {
        fail(ErrorKind::config, "hex grid offsets must be finite");
    }
}

std::size_t HexCellHash::operator()(const HexCell& c) const noexcept {
    return static_cast<std::size_t>(splitmix64(splitmix64(static_cast<std::uint64_t>(c.q)) ^
                                               static_cast<std::uint64_t>(c.r)));
}

HexCell hex_cell_at(const raster::PlanePoint& point, const HexGridSpec& spec) {
    const double s = spec.edge_length_m();
    const double x = point.x - spec.offset_x_m;
    const double y = point.y - spec.offset_y_m;
    // Fractional axial coordinates, then cube rounding.
    const double fq = (kSqrt3 / 3.0 * x - y / 3.0) / s;
    const double fr = (2.0 / 3.0 * y) / s;
    const double fs = -fq - fr;
    double q = std::round(fq);
    double r = std::round(fr);
    const double rs = std::round(fs);
    const double dq = std::abs(q - fq);
    const double dr = std::abs(r - fr);
    const double ds = std::abs(rs - fs);
    if (dq > dr && dq > ds) {
        q = -r - rs;
    } else if (dr > ds) {
        r = -q - rs;
    }
    return {static_cast<std::int64_t>(q), static_cast<std::int64_t>(r)};
}

HexCell hex_cell_of(const raster::LonLat& point, const HexGridSpec& spec) {
    return hex_cell_at(raster::equal_area_forward(point), spec);
}

raster::PlanePoint hex_center(const HexCell& cell, const HexGridSpec& spec) {
    const double s = spec.edge_length_m();
    const auto q = static_cast<double>(cell.q);
    const auto r = static_cast<double>(cell.r);
    return {spec.offset_x_m + s * (kSqrt3 * q + kSqrt3 / 2.0 * r), spec.offset_y_m + s * 1.5 * r};
}

std::array<raster::PlanePoint, 6> hex_vertices(const HexCell& cell, const HexGridSpec& spec) {
    const auto c = hex_center(cell, spec);
    const double s = spec.edge_length_m();
    std::array<raster::PlanePoint, 6> v{};
    for (int k = 0; k < 6; ++k) {
        const double a = std::numbers::pi / 180.0 * (60.0 * k - 30.0);
        v[static_cast<std::size_t>(k)] = {c.x + s * std::cos(a), c.y + s * std::sin(a)};
    }
    return v;
}

std::array<HexCell, 6> hex_neighbors(const HexCell& c) {
    return {HexCell{c.q + 1, c.r}, HexCell{c.q + 1, c.r - 1}, HexCell{c.q, c.r - 1},
            HexCell{c.q - 1, c.r}, HexCell{c.q - 1, c.r + 1}, HexCell{c.q, c.r + 1}};
}

} // namespace palmgrid::dataset
