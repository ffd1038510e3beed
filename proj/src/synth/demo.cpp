#include "palmgrid/synth/demo.hpp"

#include "palmgrid/compositor/annual_stack.hpp"
#include "palmgrid/dataset/sample.hpp"
#include "palmgrid/raster/grid_io.hpp"
#include "palmgrid/raster/projection.hpp"
#include "palmgrid/raster/roi.hpp"
#include "palmgrid/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace palmgrid::synth {

namespace {

namespace fs = std::filesystem;

enum Cover : std::uint8_t { other = 0, forest = 1, palm = 2 };

// Mean reflectance per optical band (B1..B12 incl. B8A) for each cover.
constexpr std::array<std::array<double, 13>, 3> kReflectance{{
    {0.08, 0.09, 0.12, 0.15, 0.20, 0.24, 0.26, 0.28, 0.29, 0.30, 0.02, 0.32, 0.25},
    {0.03, 0.04, 0.06, 0.04, 0.10, 0.25, 0.30, 0.33, 0.34, 0.35, 0.01, 0.16, 0.08},
    {0.04, 0.05, 0.08, 0.06, 0.14, 0.32, 0.40, 0.44, 0.45, 0.46, 0.01, 0.22, 0.12},
}};
// Mean backscatter in dB: VV, VH, HH, HV.
constexpr std::array<std::array<double, 4>, 3> kBackscatterDb{{
    {-11.0, -19.0, -14.0, -24.0},
    {-7.0, -12.5, -7.0, -12.0},
    {-8.5, -14.5, -9.0, -15.5},
}};

bool in_disk(double r, double c, double cr, double cc, double radius) {
    return (r - cr) * (r - cr) + (c - cc) * (c - cc) <= radius * radius;
}

struct Landscape {
    raster::GridHeader header;
    std::vector<Cover> y2020, y2023;
};

Landscape make_landscape(const DemoSpec& spec) {
    Landscape l;
    const auto corner = raster::equal_area_forward({spec.lon, spec.lat});
    l.header.width = l.header.height = spec.size;
    l.header.pixel_size_x = l.header.pixel_size_y = spec.pixel_m;
    l.header.origin_x = corner.x;
    l.header.origin_y = corner.y;
    l.header.crs_tag = raster::kCrsMeters;
    l.header.nodata = -9999.0f;
    const double s = static_cast<double>(spec.size) / 128.0;
    l.y2020.resize(spec.size * spec.size);
    l.y2023.resize(spec.size * spec.size);
    for (std::size_t r = 0; r < spec.size; ++r) {
        for (std::size_t c = 0; c < spec.size; ++c) {
            const double y = static_cast<double>(r) / s, x = static_cast<double>(c) / s;
            const bool woods = x + 0.6 * y > 100.0;
            const bool palm20 = in_disk(y, x, 30, 30, 18) || in_disk(y, x, 40, 92, 14) ||
                                (y >= 82 && y < 112 && x >= 18 && x < 58);
            const bool cleared = y >= 104 && y < 112 && x >= 18 && x < 58;
            const bool palm23 = (palm20 && !cleared) || in_disk(y, x, 88, 96, 20) || (y >= 10 && y < 24 && x >= 60 && x < 84);
            const std::size_t i = r * spec.size + c;
            l.y2020[i] = palm20 ? palm : (woods ? forest : other);
            l.y2023[i] = palm23 ? palm : (woods ? forest : other);
        }
    }
    return l;
}

std::string grid_file(const raster::BandGrid& g, const fs::path& dir, const std::string& name) {
    raster::write_grid(g, dir / name);
    return name;
}

raster::BandGrid noisy(const raster::GridHeader& h, const std::vector<Cover>& cover, Rng& rng, const std::string& band,
                       double sd, const auto& mean_of) {
    raster::BandGrid g = raster::BandGrid::filled(h, 0.0f);
    g.header.band_name = band;
    for (std::size_t i = 0; i < cover.size(); ++i) {
        g.values[i] = static_cast<float>(mean_of(cover[i]) + sd * rng.normal());
    }
    return g;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

nlohmann::json optical_scenes(const Landscape& l, const std::vector<Cover>& cover, int year, Rng& rng,
                              const fs::path& dir) {
    nlohmann::json scenes = nlohmann::json::array();
    const std::array<const char*, 3> dates{"-02-11", "-06-19", "-10-03"};
    for (std::size_t k = 0; k < dates.size(); ++k) {
        const std::string stem = "s2_" + std::to_string(year) + "_" + std::to_string(k);
        // Quality: a cloud bank crossing part of the scene.
        raster::BandGrid quality = raster::BandGrid::filled(l.header, 1.0f);
        quality.header.band_name = "quality";
        const double centre = static_cast<double>(l.header.width) * (0.2 + 0.3 * static_cast<double>(k));
        std::vector<bool> cloudy(cover.size(), false);
        for (std::size_t r = 0; r < l.header.height; ++r) {
            for (std::size_t c = 0; c < l.header.width; ++c) {
                const double d = std::abs(static_cast<double>(c) + 0.5 * static_cast<double>(r) - centre);
                const std::size_t i = r * l.header.width + c;
                quality.values[i] = static_cast<float>(std::clamp(d / 30.0, 0.0, 1.0));
                cloudy[i] = quality.values[i] < 0.6f;
            }
        }
        nlohmann::json bands = nlohmann::json::object();
        for (std::size_t b = 0; b < compositor::kOpticalBands.size(); ++b) {
            const std::string name(compositor::kOpticalBands[b]);
            auto g = noisy(l.header, cover, rng, name, 0.015, [&](Cover cv) { return kReflectance[cv][b]; });
            for (std::size_t i = 0; i < g.values.size(); ++i) {
                if (cloudy[i]) g.values[i] = 0.7f;
                g.values[i] = std::clamp(g.values[i], 0.0f, 1.0f);
            }
            bands[name] = grid_file(g, dir, stem + "_" + name + ".fgrd");
        }
        scenes.push_back({{"timestamp", std::to_string(year) + dates[k]},
                          {"bands", bands},
                          {"quality", grid_file(quality, dir, stem + "_quality.fgrd")}});
    }
    return scenes;
}

nlohmann::json sar_scenes(const Landscape& l, const std::vector<Cover>& cover, int year, Rng& rng,
                          const fs::path& dir) {
    nlohmann::json scenes = nlohmann::json::array();
    for (int k = 0; k < 4; ++k) {
        const std::string stem = "s1_" + std::to_string(year) + "_" + std::to_string(k);
        nlohmann::json bands = nlohmann::json::object();
        for (int pol = 0; pol < 2; ++pol) {
            const std::string name = pol == 0 ? "VV" : "VH";
            auto g = noisy(l.header, cover, rng, name, 1.2, [&](Cover cv) { return kBackscatterDb[cv][pol]; });
            for (auto& v : g.values) v = static_cast<float>(db_to_linear(v));
            bands[name] = grid_file(g, dir, stem + "_" + name + ".fgrd");
        }
        char date[16];
        std::snprintf(date, sizeof date, "%d-%02d-15", year, 1 + 3 * k);
        scenes.push_back({{"timestamp", date}, {"bands", bands}, {"quality", nullptr}});
    }
    return scenes;
}

} // namespace

void write_demo_dataset(const fs::path& dir, const DemoSpec& spec) {
    fs::create_directories(dir);
    const Landscape l = make_landscape(spec);
    Rng rng(spec.seed);
    const std::size_t n = spec.size;

    // Elevation: a gentle ridge.
    raster::BandGrid dem = raster::BandGrid::filled(l.header, 0.0f);
    dem.header.band_name = "elevation";
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const double x = static_cast<double>(c) / static_cast<double>(n);
            const double y = static_cast<double>(r) / static_cast<double>(n);
            dem.values[r * n + c] = static_cast<float>(40.0 + 25.0 * std::sin(3.0 * x) * std::cos(2.0 * y) + 30.0 * y);
        }
    }
    raster::write_grid(dem, dir / "dem.fgrd");

    nlohmann::json optical = nlohmann::json::array(), sar = nlohmann::json::array();
    for (int year : {2020, 2023}) {
        const auto& cover = year == 2020 ? l.y2020 : l.y2023;
        for (auto& s : optical_scenes(l, cover, year, rng, dir)) optical.push_back(s);
        for (auto& s : sar_scenes(l, cover, year, rng, dir)) sar.push_back(s);
    }
    raster::write_file_atomic(dir / "optical.json", optical.dump(2) + "\n");
    raster::write_file_atomic(dir / "sar.json", sar.dump(2) + "\n");

    // L-band mosaics; 2020 is missing and gets gap-filled.
    nlohmann::json years = nlohmann::json::object();
    for (int year : {2019, 2021, 2022, 2023}) {
        const auto& cover = year < 2022 ? l.y2020 : l.y2023;
        nlohmann::json entry;
        for (int pol = 0; pol < 2; ++pol) {
            const std::string name = pol == 0 ? "HH" : "HV";
            auto g = noisy(l.header, cover, rng, name, 1.0, [&](Cover cv) { return kBackscatterDb[cv][2 + pol]; });
            for (auto& v : g.values) v = static_cast<float>(db_to_linear(v));
            entry[name] = grid_file(g, dir, "palsar_" + std::to_string(year) + "_" + name + ".fgrd");
        }
        years[std::to_string(year)] = entry;
    }
    raster::write_file_atomic(dir / "palsar.json", nlohmann::json{{"years", years}}.dump(2) + "\n");

    // Forest stratum as of the earlier epoch; the bottom rows are unmapped.
    raster::MaskGrid forest_mask = raster::MaskGrid::filled(l.header, 0);
    forest_mask.header.band_name = "forest";
    raster::MaskGrid non_tree = raster::MaskGrid::filled(l.header, 0);
    non_tree.header.band_name = "non_tree";
    raster::MaskGrid stable_forest = raster::MaskGrid::filled(l.header, 0);
    stable_forest.header.band_name = "stable_forest";
    for (std::size_t i = 0; i < n * n; ++i) {
        forest_mask.values[i] = l.y2020[i] == forest ? 1 : 0;
        if (i / n >= n - 3) forest_mask.values[i] = raster::kMaskNodata;
        non_tree.values[i] = l.y2020[i] == other && l.y2023[i] == other;
        stable_forest.values[i] = l.y2020[i] == forest && l.y2023[i] == forest;
    }
    raster::write_mask(forest_mask, dir / "forest.fgrd");
    raster::write_mask(non_tree, dir / "non_tree.fgrd");
    raster::write_mask(stable_forest, dir / "stable_forest.fgrd");

    // Labelled points at pixel centres.
    std::vector<dataset::SamplePoint> samples;
    for (int year : {2020, 2023}) {
        const auto& cover = year == 2020 ? l.y2020 : l.y2023;
        for (std::size_t k = 0; k < spec.samples_per_year; ++k) {
            const std::size_t r = rng.below(n), c = rng.below(n);
            const auto ll = raster::from_grid_coords(l.header, {l.header.center_x(c), l.header.center_y(r)});
            samples.push_back({ll.lon, ll.lat, cover[r * n + c] == palm ? 1.0 : 0.0, year, "demo", 1.0});
        }
    }
    dataset::write_samples(samples, dir / "samples.csv");

    const double x0 = l.header.origin_x, y1 = l.header.origin_y;
    const double side = spec.pixel_m * static_cast<double>(n);
    const double x1 = x0 + side, y0 = y1 - side, xm = x0 + side / 2;
    std::vector<raster::RegionOfInterest> rois{
        {"west", {{x0, y0}, {xm, y0}, {xm, y1}, {x0, y1}}},
        {"east", {{xm, y0}, {x1, y0}, {x1, y1}, {xm, y1}}},
        {"concession", {{x0 + 0.45 * side, y0 + 0.05 * side}, {x0 + 0.95 * side, y0 + 0.15 * side},
                        {x0 + 0.85 * side, y0 + 0.6 * side}, {x0 + 0.5 * side, y0 + 0.5 * side}}},
    };
    raster::write_file_atomic(dir / "rois.json", raster::format_rois(rois));

    raster::write_file_atomic(dir / "demo.toml", R"(# Settings for the bundled demo; paths are relative to this directory.

[split-folds]
hex-area-km2 = 0.05
seed = 7
non-tree = "non_tree.fgrd"
stable-forest = "stable_forest.fgrd"
pseudo-non-tree = 150
pseudo-forest = 150
pseudo-seed = 3
pseudo-year = 2020

[train]
epochs = 30
seed = 1

[risk]
window = 31
min-pairs = 10
)");
}

} // namespace palmgrid::synth
