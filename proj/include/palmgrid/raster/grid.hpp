#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace palmgrid::raster {

inline constexpr const char* kCrsMeters = "meters";
inline constexpr const char* kCrsDegrees = "degrees";
inline constexpr std::uint8_t kMaskNodata = 255;

/// Georeferencing for a north-up raster. origin_* is the upper-left corner of
/// the upper-left pixel; rows run north to south, so pixel (row, col) has its
/// center at (origin_x + (col + 0.5) * pixel_size_x, origin_y - (row + 0.5) * pixel_size_y).
struct GridHeader {
    std::size_t width = 1;
    std::size_t height = 1;
    double origin_x = 0.0;
    double origin_y = 0.0;
    double pixel_size_x = 1.0;
    double pixel_size_y = 1.0;
    std::string crs_tag = kCrsMeters;
    float nodata = -9999.0f;
    std::string band_name;

    std::size_t pixel_count() const noexcept { return width * height; }
    double center_x(std::size_t col) const noexcept {
        return origin_x + (static_cast<double>(col) + 0.5) * pixel_size_x;
    }
    double center_y(std::size_t row) const noexcept {
        return origin_y - (static_cast<double>(row) + 0.5) * pixel_size_y;
    }

    /// Throws ErrorKind::schema when dimensions or pixel sizes are invalid.
    void validate() const;
};

/// Grids are aligned when every header field except band_name matches
/// (nodata compared bitwise so a NaN sentinel aligns with itself).
bool aligned(const GridHeader& a, const GridHeader& b) noexcept;

/// Pixel lattice equality only: ignores nodata and band_name. Used where a
/// u8 mask meets a float grid, since their nodata sentinels differ by type.
bool same_lattice(const GridHeader& a, const GridHeader& b) noexcept;

/// Throws ErrorKind::schema naming `what` when the headers are not aligned.
void require_aligned(const GridHeader& a, const GridHeader& b, const std::string& what);
void require_same_lattice(const GridHeader& a, const GridHeader& b, const std::string& what);

struct BandGrid {
    GridHeader header;
    std::vector<float> values;

    BandGrid() = default;
    BandGrid(GridHeader h, std::vector<float> v) : header(std::move(h)), values(std::move(v)) {}

    /// Grid filled with a constant.
    static BandGrid filled(const GridHeader& h, float value);

    bool is_nodata(float v) const noexcept {
        return v == header.nodata || (std::isnan(v) && std::isnan(header.nodata));
    }
    bool is_nodata_at(std::size_t i) const noexcept { return is_nodata(values[i]); }

    float at(std::size_t row, std::size_t col) const { return values[row * header.width + col]; }
    float& at(std::size_t row, std::size_t col) { return values[row * header.width + col]; }

    void validate() const;
};

struct MaskGrid {
    GridHeader header;
    std::vector<std::uint8_t> values;

    static MaskGrid filled(const GridHeader& h, std::uint8_t value);

    std::uint8_t at(std::size_t row, std::size_t col) const { return values[row * header.width + col]; }
    std::uint8_t& at(std::size_t row, std::size_t col) { return values[row * header.width + col]; }

    /// Checks length and that every value is 0, 1 or 255.
    void validate() const;
};

/// Hectares covered by one pixel of `row`. "meters" grids are row-independent;
/// "degrees" grids use a spherical cosine model at 111,320 m per degree.
double pixel_area_ha(const GridHeader& header, std::size_t row);

} // namespace palmgrid::raster
