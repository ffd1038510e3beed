#include "palmgrid/raster/grid.hpp"

#include "palmgrid/error.hpp"

#include <bit>
#include <numbers>

namespace palmgrid::raster {

namespace {

constexpr double kMetersPerDegree = 111320.0;

bool lattice_equal(const GridHeader& a, const GridHeader& b) noexcept {
    return a.width == b.width && a.height == b.height && a.origin_x == b.origin_x &&
           a.origin_y == b.origin_y && a.pixel_size_x == b.pixel_size_x &&
           a.pixel_size_y == b.pixel_size_y && a.crs_tag == b.crs_tag;
}

} // namespace

void GridHeader::validate() const {
    if (width < 1 || height < 1) {
        fail(ErrorKind::schema, "grid dimensions must be at least 1x1");
    }
    if (!(pixel_size_x > 0.0) || !(pixel_size_y > 0.0) || !std::isfinite(pixel_size_x) ||
        !std::isfinite(pixel_size_y)) {
        fail(ErrorKind::schema, "pixel sizes must be positive and finite");
    }
    if (!std::isfinite(origin_x) || !std::isfinite(origin_y)) {
        fail(ErrorKind::schema, "grid origin must be finite");
    }
}

bool aligned(const GridHeader& a, const GridHeader& b) noexcept {
    return lattice_equal(a, b) &&
           std::bit_cast<std::uint32_t>(a.nodata) == std::bit_cast<std::uint32_t>(b.nodata);
}

bool same_lattice(const GridHeader& a, const GridHeader& b) noexcept { return lattice_equal(a, b); }

void require_aligned(const GridHeader& a, const GridHeader& b, const std::string& what) {
    if (!aligned(a, b)) fail(ErrorKind::schema, what + ": grids are not aligned");
}

void require_same_lattice(const GridHeader& a, const GridHeader& b, const std::string& what) {
    if (!same_lattice(a, b)) fail(ErrorKind::schema, what + ": grids do not share a pixel lattice");
}

BandGrid BandGrid::filled(const GridHeader& h, float value) {
    return BandGrid(h, std::vector<float>(h.pixel_count(), value));
}

void BandGrid::validate() const {
    header.validate();
    if (values.size() != header.pixel_count()) {
        fail(ErrorKind::schema, "band '" + header.band_name + "' holds " +
                                    std::to_string(values.size()) + " values, header declares " +
                                    std::to_string(header.pixel_count()));
    }
}

MaskGrid MaskGrid::filled(const GridHeader& h, std::uint8_t value) {
    MaskGrid m;
    m.header = h;
    m.values.assign(h.pixel_count(), value);
    return m;
}

void MaskGrid::validate() const {
    header.validate();
    if (values.size() != header.pixel_count()) {
        fail(ErrorKind::schema, "mask value count does not match header dimensions");
    }
    for (std::uint8_t v : values) {
        if (v != 0 && v != 1 && v != kMaskNodata) {
            fail(ErrorKind::schema, "mask values must be 0, 1 or 255, found " + std::to_string(v));
        }
    }
}

double pixel_area_ha(const GridHeader& header, std::size_t row) {
    if (header.crs_tag == kCrsMeters) {
        return header.pixel_size_x * header.pixel_size_y / 10000.0;
    }
    if (header.crs_tag == kCrsDegrees) {
        const double lat_rad = header.center_y(row) * std::numbers::pi / 180.0;
        return (header.pixel_size_x * kMetersPerDegree) *
               (header.pixel_size_y * kMetersPerDegree * std::cos(lat_rad)) / 10000.0;
    }
    fail(ErrorKind::config, "unknown crs_tag '" + header.crs_tag + "'");
}

} // namespace palmgrid::raster
