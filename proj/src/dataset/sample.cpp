#include "palmgrid/dataset/sample.hpp"

#include "palmgrid/error.hpp"
#include "palmgrid/raster/grid_io.hpp"
#include "palmgrid/text.hpp"

#include <charconv>
#include <cmath>

namespace palmgrid::dataset {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size() && !text.empty();
}

void append_double(std::string& out, double v) { out += format_double(v); }

} // namespace

void validate(const SamplePoint& p) {
    if (!(p.label >= 0.0 && p.label <= 1.0)) fail(ErrorKind::argument, "label must lie in [0, 1]");
    if (!(p.lat >= -90.0 && p.lat <= 90.0)) fail(ErrorKind::argument, "lat must lie in [-90, 90]");
    if (!(p.lon >= -180.0 && p.lon < 180.0)) fail(ErrorKind::argument, "lon must lie in [-180, 180)");
    if (!(p.weight >= 0.0) || !std::isfinite(p.weight)) fail(ErrorKind::argument, "weight must be finite and >= 0");
    if (p.source.find_first_of(",\"\r\n") != std::string::npos) {
        fail(ErrorKind::argument, "source tag may not contain commas, quotes or newlines");
    }
}

std::vector<SamplePoint> parse_samples(std::string_view csv) {
    std::vector<SamplePoint> points;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!csv.empty()) {
        const auto eol = csv.find('\n');
        std::string_view line = csv.substr(0, eol);
        csv.remove_prefix(eol == std::string_view::npos ? csv.size() : eol + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!header_seen) {
            if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.remove_prefix(3); // BOM
            if (line != kSampleCsvHeader) {
                fail(ErrorKind::parse, "line 1: expected header '" + std::string(kSampleCsvHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;

        const std::string where = "line " + std::to_string(line_no) + ": ";
        const auto f = split(line, ',');
        if (f.size() != 6) fail(ErrorKind::parse, where + "expected 6 fields, found " + std::to_string(f.size()));
        SamplePoint p;
        if (!parse_number(f[0], p.lon) || !parse_number(f[1], p.lat)) fail(ErrorKind::parse, where + "bad coordinates");
        if (!parse_number(f[2], p.label)) fail(ErrorKind::parse, where + "bad label");
        if (!parse_number(f[3], p.year)) fail(ErrorKind::parse, where + "bad year");
        p.source = std::string(f[4]);
        if (f[5].empty()) {
            p.weight = 1.0;
        } else if (!parse_number(f[5], p.weight)) {
            fail(ErrorKind::parse, where + "bad weight");
        }
        try {
            validate(p);
        } catch (const Error& e) {
            fail(ErrorKind::parse, where + e.what());
        }
        points.push_back(std::move(p));
    }
    if (!header_seen) fail(ErrorKind::parse, "line 1: missing header");
    return points;
}

std::string format_samples(const std::vector<SamplePoint>& points) {
    std::string out(kSampleCsvHeader);
    out += '\n';
    for (const auto& p : points) {
        validate(p);
        append_double(out, p.lon);
        out += ',';
        append_double(out, p.lat);
        out += ',';
        append_double(out, p.label);
        out += ',';
        out += std::to_string(p.year);
        out += ',';
        out += p.source;
        out += ',';
        append_double(out, p.weight);
        out += '\n';
    }
    return out;
}

std::vector<SamplePoint> read_samples(const std::filesystem::path& path) {
    try {
        return parse_samples(raster::read_file(path));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::parse) fail(ErrorKind::parse, path.string() + ": " + e.what());
        throw;
    }
}

void write_samples(const std::vector<SamplePoint>& points, const std::filesystem::path& path) {
    raster::write_file_atomic(path, format_samples(points));
}

} // namespace palmgrid::dataset
