#include "palmgrid/compositor/annual_stack.hpp"

#include "palmgrid/error.hpp"
#include "palmgrid/raster/grid_io.hpp"

#include <json.hpp>

#include <charconv>

namespace palmgrid::compositor {

using raster::BandGrid;

AnnualStack assemble_annual_stack(int year, std::vector<BandGrid> channels) {
    if (channels.size() != kStackChannels) {
        fail(ErrorKind::schema, "annual stack needs " + std::to_string(kStackChannels) + " channels, got " +
                                    std::to_string(channels.size()));
    }
    for (std::size_t i = 0; i < channels.size(); ++i) {
        channels[i].validate();
        raster::require_aligned(channels.front().header, channels[i].header,
                                "stack channel " + std::string(kChannelOrder[i]));
        channels[i].header.band_name = std::string(kChannelOrder[i]);
    }
    return AnnualStack{year, std::move(channels)};
}

void write_stack(const AnnualStack& stack, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json j;
    j["schema_version"] = 1;
    j["year"] = stack.year;
    j["channels"] = nlohmann::json::array();
    for (const auto& ch : stack.channels) {
        const std::string file = ch.header.band_name + ".fgrd";
        raster::write_grid(ch, dir / file);
        j["channels"].push_back({{"name", ch.header.band_name}, {"path", file}});
    }
    raster::write_file_atomic(dir / "stack.json", j.dump(2) + "\n");
}

AnnualStack read_stack(const std::filesystem::path& manifest) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(raster::read_file(manifest));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse, "stack manifest '" + manifest.string() + "': " + e.what());
    }
    if (!j.is_object() || !j.contains("year") || !j.contains("channels") || !j["channels"].is_array()) {
        fail(ErrorKind::parse, "stack manifest needs 'year' and 'channels'");
    }
    std::vector<BandGrid> channels;
    std::size_t index = 0;
    for (const auto& ch : j["channels"]) {
        const auto name = ch.value("name", std::string{});
        if (index < kStackChannels && name != kChannelOrder[index]) {
            fail(ErrorKind::schema, "stack channel " + std::to_string(index) + " is '" + name + "', expected '" +
                                        std::string(kChannelOrder[index]) + "'");
        }
        std::filesystem::path p = ch.value("path", std::string{});
        if (p.is_relative()) p = manifest.parent_path() / p;
        channels.push_back(raster::read_grid(p));
        ++index;
    }
    return assemble_annual_stack(j["year"].get<int>(), std::move(channels));
}

std::map<int, PalsarYear> load_palsar_manifest(const std::filesystem::path& manifest) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(raster::read_file(manifest));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse, "PALSAR manifest '" + manifest.string() + "': " + e.what());
    }
    if (!j.is_object() || !j.contains("years") || !j["years"].is_object()) {
        fail(ErrorKind::parse, "PALSAR manifest needs a 'years' object");
    }
    std::map<int, PalsarYear> out;
    for (const auto& [key, entry] : j["years"].items()) {
        int year = 0;
        auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), year);
        if (ec != std::errc{} || ptr != key.data() + key.size()) {
            fail(ErrorKind::parse, "PALSAR year key '" + key + "' is not an integer");
        }
        if (!entry.is_object() || !entry.contains("HH") || !entry.contains("HV")) {
            fail(ErrorKind::parse, "PALSAR year " + key + " needs HH and HV paths");
        }
        auto resolve = [&](const std::string& p) {
            std::filesystem::path path(p);
            return path.is_absolute() ? path : manifest.parent_path() / path;
        };
        PalsarYear py{raster::read_grid(resolve(entry["HH"].get<std::string>())),
                      raster::read_grid(resolve(entry["HV"].get<std::string>()))};
        raster::require_aligned(py.hh.header, py.hv.header, "PALSAR " + key);
        out.emplace(year, std::move(py));
    }
    return out;
}

AnnualStack build_annual_stack(int year, const std::vector<Scene>& optical_scenes,
                               const std::vector<Scene>& sar_scenes, const std::map<int, PalsarYear>& palsar,
                               const BandGrid& dem, const CompositeOptions& options) {
    const auto optical = scenes_in_year(optical_scenes, year);
    const auto sar = scenes_in_year(sar_scenes, year);
    if (optical.empty()) fail(ErrorKind::argument, "no optical scenes in " + std::to_string(year));
    if (sar.empty()) fail(ErrorKind::argument, "no SAR scenes in " + std::to_string(year));

    std::vector<BandGrid> channels;
    channels.reserve(kStackChannels);
    for (const char* pol : {"VV", "VH"}) {
        SarStats s = sar_annual_stats(sar, pol, options.c_band);
        channels.push_back(std::move(s.min));
        channels.push_back(std::move(s.max));
        channels.push_back(std::move(s.mean));
        channels.push_back(std::move(s.sd));
    }
    for (auto band : kOpticalBands) {
        channels.push_back(masked_annual_mean(optical, std::string(band), options.cloud_threshold));
    }
    std::map<int, BandGrid> hh;
    std::map<int, BandGrid> hv;
    for (const auto& [y, p] : palsar) {
        hh.emplace(y, p.hh);
        hv.emplace(y, p.hv);
    }
    channels.push_back(to_scaled_db(gapfill_rolling_mean(hh, year, options.gapfill_window), options.l_band));
    channels.push_back(to_scaled_db(gapfill_rolling_mean(hv, year, options.gapfill_window), options.l_band));
    channels.push_back(slope_from_dem(dem));
    return assemble_annual_stack(year, std::move(channels));
}

} // namespace palmgrid::compositor
