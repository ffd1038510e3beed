#include "palmgrid/raster/grid_io.hpp"

#include "palmgrid/error.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace palmgrid::raster {

namespace {

constexpr std::string_view kMagic = "FGRD1\n";

using nlohmann::json;

json header_json(const GridHeader& h, const char* dtype) {
    json j;
    j["width"] = h.width;
    j["height"] = h.height;
    j["origin_x"] = h.origin_x;
    j["origin_y"] = h.origin_y;
    j["pixel_size_x"] = h.pixel_size_x;
    j["pixel_size_y"] = h.pixel_size_y;
    j["crs_tag"] = h.crs_tag;
    if (std::isnan(h.nodata)) {
        j["nodata"] = nullptr;
    } else {
        j["nodata"] = static_cast<double>(h.nodata);
    }
    j["band_name"] = h.band_name;
    j["dtype"] = dtype;
    return j;
}

std::string encode_prefix(const GridHeader& h, const char* dtype) {
    if (std::isinf(h.nodata)) fail(ErrorKind::schema, "nodata must be finite or NaN");
    std::string out(kMagic);
    out += header_json(h, dtype).dump();
    out += '\n';
    return out;
}

struct Parsed {
    GridHeader header;
    std::string dtype;
    std::string_view payload;
};

template <typename T>
T required(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) fail(ErrorKind::format, std::string("FGRD header is missing '") + key + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        fail(ErrorKind::format, std::string("FGRD header field '") + key + "' has the wrong type");
    }
}

Parsed parse(std::string_view bytes) {
    if (bytes.substr(0, kMagic.size()) != kMagic) fail(ErrorKind::format, "missing FGRD1 magic");
    bytes.remove_prefix(kMagic.size());
    const auto eol = bytes.find('\n');
    if (eol == std::string_view::npos) fail(ErrorKind::format, "unterminated FGRD header line");

    json j;
    try {
        j = json::parse(bytes.substr(0, eol));
    } catch (const json::exception& e) {
        fail(ErrorKind::format, std::string("FGRD header is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorKind::format, "FGRD header must be a JSON object");

    Parsed p;
    const auto width = required<std::int64_t>(j, "width");
    const auto height = required<std::int64_t>(j, "height");
    if (width < 1 || height < 1) fail(ErrorKind::format, "FGRD dimensions must be positive");
    p.header.width = static_cast<std::size_t>(width);
    p.header.height = static_cast<std::size_t>(height);
    p.header.origin_x = required<double>(j, "origin_x");
    p.header.origin_y = required<double>(j, "origin_y");
    p.header.pixel_size_x = required<double>(j, "pixel_size_x");
    p.header.pixel_size_y = required<double>(j, "pixel_size_y");
    p.header.crs_tag = required<std::string>(j, "crs_tag");
    p.header.band_name = required<std::string>(j, "band_name");
    p.dtype = required<std::string>(j, "dtype");
    auto nodata = j.find("nodata");
    if (nodata == j.end()) fail(ErrorKind::format, "FGRD header is missing 'nodata'");
    if (nodata->is_null()) {
        p.header.nodata = std::numeric_limits<float>::quiet_NaN();
    } else if (nodata->is_number()) {
        p.header.nodata = static_cast<float>(nodata->get<double>());
    } else {
        fail(ErrorKind::format, "FGRD header field 'nodata' has the wrong type");
    }
    try {
        p.header.validate();
    } catch (const Error& e) {
        fail(ErrorKind::format, e.what());
    }
    p.payload = bytes.substr(eol + 1);
    return p;
}

void check_payload(const Parsed& p, std::size_t element_size) {
    const std::size_t expected = p.header.pixel_count() * element_size;
    if (p.payload.size() != expected) {
        fail(ErrorKind::truncation, "FGRD payload holds " + std::to_string(p.payload.size()) +
                                        " bytes, header requires " + std::to_string(expected));
    }
}

} // namespace

std::string encode_grid(const BandGrid& grid) {
    grid.validate();
    std::string out = encode_prefix(grid.header, "f32");
    const std::size_t offset = out.size();
    out.resize(offset + grid.values.size() * 4);
    char* dst = out.data() + offset;
    for (float v : grid.values) {
        std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
        for (int b = 0; b < 4; ++b) *dst++ = static_cast<char>((bits >> (8 * b)) & 0xffu);
    }
    return out;
}

std::string encode_mask(const MaskGrid& mask) {
    mask.validate();
    std::string out = encode_prefix(mask.header, "u8");
    out.append(reinterpret_cast<const char*>(mask.values.data()), mask.values.size());
    return out;
}

BandGrid decode_grid(std::string_view bytes) {
    Parsed p = parse(bytes);
    if (p.dtype != "f32") fail(ErrorKind::format, "expected dtype f32, found '" + p.dtype + "'");
    check_payload(p, 4);
    BandGrid grid;
    grid.header = std::move(p.header);
    grid.values.resize(grid.header.pixel_count());
    const auto* src = reinterpret_cast<const unsigned char*>(p.payload.data());
    for (float& v : grid.values) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(src[b]) << (8 * b);
        src += 4;
        v = std::bit_cast<float>(bits);
    }
    return grid;
}

MaskGrid decode_mask(std::string_view bytes) {
    Parsed p = parse(bytes);
    if (p.dtype != "u8") fail(ErrorKind::format, "expected dtype u8, found '" + p.dtype + "'");
    check_payload(p, 1);
    MaskGrid mask;
    mask.header = std::move(p.header);
    mask.values.assign(p.payload.begin(), p.payload.end());
    try {
        mask.validate();
    } catch (const Error& e) {
        fail(ErrorKind::format, e.what());
    }
    return mask;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) fail(ErrorKind::io, "read failed on '" + path.string() + "'");
    return std::move(ss).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    auto tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            fail(ErrorKind::io, "write failed on '" + path.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorKind::io, "cannot move output into place at '" + path.string() + "'");
    }
}

BandGrid read_grid(const std::filesystem::path& path) { return decode_grid(read_file(path)); }

MaskGrid read_mask(const std::filesystem::path& path) { return decode_mask(read_file(path)); }

void write_grid(const BandGrid& grid, const std::filesystem::path& path) {
    write_file_atomic(path, encode_grid(grid));
}

void write_mask(const MaskGrid& mask, const std::filesystem::path& path) {
    write_file_atomic(path, encode_mask(mask));
}

} // namespace palmgrid::raster
