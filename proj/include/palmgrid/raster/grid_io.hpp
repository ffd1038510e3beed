#pragma once

#include "palmgrid/raster/grid.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace palmgrid::raster {

// FGRD layout: "FGRD1\n", one line of JSON header, "\n", then width*height
// little-endian row-major values (f32 or u8).

std::string encode_grid(const BandGrid& grid);
std::string encode_mask(const MaskGrid& mask);
BandGrid decode_grid(std::string_view bytes);
MaskGrid decode_mask(std::string_view bytes);

BandGrid read_grid(const std::filesystem::path& path);
MaskGrid read_mask(const std::filesystem::path& path);
void write_grid(const BandGrid& grid, const std::filesystem::path& path);
void write_mask(const MaskGrid& mask, const std::filesystem::path& path);

/// Whole-file helpers. write_file_atomic writes a sibling temp file and
/// renames it over `path`, so readers never observe a partial file.
std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

} // namespace palmgrid::raster
