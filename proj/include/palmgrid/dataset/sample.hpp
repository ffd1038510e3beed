#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace palmgrid::dataset {

/// Harmonized labeled observation. `label` is the palm fraction of the pixel.
struct SamplePoint {
    double lon = 0.0;
    double lat = 0.0;
    double label = 0.0;
    int year = 0;
    std::string source;
    double weight = 1.0;

    bool operator==(const SamplePoint&) const = default;
};

inline constexpr std::string_view kSampleCsvHeader = "lon,lat,label,year,source,weight";

/// Throws ErrorKind::argument describing the first violated invariant.
void validate(const SamplePoint& p);

/// CSV with the fixed header above. Parse errors carry the 1-based file line.
std::vector<SamplePoint> parse_samples(std::string_view csv);
std::string format_samples(const std::vector<SamplePoint>& points);

std::vector<SamplePoint> read_samples(const std::filesystem::path& path);
void write_samples(const std::vector<SamplePoint>& points, const std::filesystem::path& path);

} // namespace palmgrid::dataset
