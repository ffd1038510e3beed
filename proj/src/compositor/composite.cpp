#include "palmgrid/compositor/composite.hpp"

#include "palmgrid/error.hpp"
#include "palmgrid/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace palmgrid::compositor {

using raster::BandGrid;
using raster::GridHeader;

namespace {

void require_range(const DbRange& range) {
    if (!(range.hi > range.lo) || !std::isfinite(range.lo) || !std::isfinite(range.hi)) {
        fail(ErrorKind::config, "dB range needs finite lo < hi");
    }
}

// Scenes must all carry `band`, aligned with the first scene's copy.
const GridHeader& common_header(std::span<const Scene> scenes, const std::string& band) {
    if (scenes.empty()) fail(ErrorKind::argument, "no scenes to composite");
    const GridHeader& ref = scenes.front().band(band).header;
    for (const auto& s : scenes) {
        const auto& g = s.band(band);
        g.validate();
        raster::require_aligned(ref, g.header, "scene " + s.timestamp.str() + " band " + band);
        if (s.quality) raster::require_aligned(ref, s.quality->header, "scene " + s.timestamp.str() + " quality");
    }
    return ref;
}

// Summing sorted observations makes the composite independent of scene order.
double sorted_sum(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    return std::accumulate(v.begin(), v.end(), 0.0);
}

} // namespace

double scale_linear_to_db01(double linear, const DbRange& range) {
    if (linear == 0.0) return 0.0;
    const double db = 10.0 * std::log10(linear);
    return std::clamp((db - range.lo) / (range.hi - range.lo), 0.0, 1.0);
}

BandGrid masked_annual_mean(std::span<const Scene> scenes, const std::string& band, double cloud_threshold) {
    GridHeader header = common_header(scenes, band);
    header.band_name = band;
    BandGrid out = BandGrid::filled(header, header.nodata);

    parallel_for(header.height, [&](std::size_t r0, std::size_t r1) {
        std::vector<double> obs;
        for (std::size_t row = r0; row < r1; ++row) {
            for (std::size_t col = 0; col < header.width; ++col) {
                const std::size_t i = row * header.width + col;
                obs.clear();
                for (const auto& s : scenes) {
                    if (s.quality) {
                        const float q = s.quality->values[i];
                        if (s.quality->is_nodata(q) || !(q >= cloud_threshold)) continue;
                    }
                    const auto& g = s.band(band);
                    const float v = g.values[i];
                    if (g.is_nodata(v) || !std::isfinite(v)) continue;
                    obs.push_back(v);
                }
                if (!obs.empty()) {
                    const double n = static_cast<double>(obs.size());
                    out.values[i] = static_cast<float>(sorted_sum(obs) / n);
                }
            }
        }
    });
    return out;
}

SarStats sar_annual_stats(std::span<const Scene> scenes, const std::string& polarization, const DbRange& range) {
    require_range(range);
    GridHeader header = common_header(scenes, polarization);
    auto make = [&](const char* suffix) {
        GridHeader h = header;
        h.band_name = polarization + suffix;
        return BandGrid::filled(h, h.nodata);
    };
    SarStats stats{make("min"), make("max"), make("mean"), make("sd")};

    parallel_for(header.height, [&](std::size_t r0, std::size_t r1) {
        std::vector<double> obs;
        for (std::size_t row = r0; row < r1; ++row) {
            for (std::size_t col = 0; col < header.width; ++col) {
                const std::size_t i = row * header.width + col;
                obs.clear();
                for (const auto& s : scenes) {
                    const auto& g = s.band(polarization);
                    const float v = g.values[i];
                    if (g.is_nodata(v) || !std::isfinite(v) || !(v > 0.0f)) continue;
                    obs.push_back(v);
                }
                if (obs.empty()) continue;
                const double n = static_cast<double>(obs.size());
                const double mean = sorted_sum(obs) / n; // obs now sorted
                double ss = 0.0;
                for (double v : obs) ss += (v - mean) * (v - mean);
                const double sd = std::sqrt(ss / n);
                stats.min.values[i] = static_cast<float>(scale_linear_to_db01(obs.front(), range));
                stats.max.values[i] = static_cast<float>(scale_linear_to_db01(obs.back(), range));
                stats.mean.values[i] = static_cast<float>(scale_linear_to_db01(mean, range));
                stats.sd.values[i] = static_cast<float>(scale_linear_to_db01(sd, range));
            }
        }
    });
    return stats;
}

BandGrid to_scaled_db(const BandGrid& linear, const DbRange& range) {
    require_range(range);
    linear.validate();
    BandGrid out = linear;
    for (float& v : out.values) {
        if (linear.is_nodata(v) || !std::isfinite(v) || !(v > 0.0f)) {
            v = linear.header.nodata;
        } else {
            v = static_cast<float>(scale_linear_to_db01(v, range));
        }
    }
    return out;
}

BandGrid gapfill_rolling_mean(const std::map<int, BandGrid>& yearly, int target_year, int window) {
    if (window < 1 || window % 2 == 0) fail(ErrorKind::argument, "gap-fill window must be a positive odd year count");
    const int half = (window - 1) / 2;
    std::vector<const BandGrid*> neighbours;
    const BandGrid* target = nullptr;
    for (int y = target_year - half; y <= target_year + half; ++y) {
        auto it = yearly.find(y);
        if (it == yearly.end()) continue;
        it->second.validate();
        if (y == target_year) {
            target = &it->second;
        } else {
            neighbours.push_back(&it->second);
        }
    }
    if (!target && neighbours.empty()) {
        fail(ErrorKind::argument, "no annual grids inside the gap-fill window around " + std::to_string(target_year));
    }
    const BandGrid& ref = target ? *target : *neighbours.front();
    for (const BandGrid* g : neighbours) raster::require_aligned(ref.header, g->header, "gap-fill year");

    BandGrid out = target ? *target : BandGrid::filled(ref.header, ref.header.nodata);
    std::vector<double> obs;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (!out.is_nodata_at(i) && std::isfinite(out.values[i])) continue;
        obs.clear();
        for (const BandGrid* g : neighbours) {
            const float v = g->values[i];
            if (!g->is_nodata(v) && std::isfinite(v)) obs.push_back(v);
        }
        out.values[i] = obs.empty() ? out.header.nodata
                                    : static_cast<float>(sorted_sum(obs) / static_cast<double>(obs.size()));
    }
    return out;
}

BandGrid slope_from_dem(const BandGrid& dem) {
    dem.validate();
    const GridHeader& h = dem.header;
    if (h.crs_tag != raster::kCrsMeters) {
        fail(ErrorKind::unsupported, "slope needs a projected DEM in meters, got crs_tag '" + h.crs_tag + "'");
    }
    GridHeader out_header = h;
    out_header.band_name = "slope";
    BandGrid out = BandGrid::filled(out_header, h.nodata);
    const auto w = static_cast<std::ptrdiff_t>(h.width);
    const auto ht = static_cast<std::ptrdiff_t>(h.height);

    parallel_for(h.height, [&](std::size_t r0, std::size_t r1) {
        for (auto row = static_cast<std::ptrdiff_t>(r0); row < static_cast<std::ptrdiff_t>(r1); ++row) {
            for (std::ptrdiff_t col = 0; col < w; ++col) {
                double z[3][3];
                bool valid = true;
                for (int dr = -1; dr <= 1 && valid; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        const auto rr = std::clamp<std::ptrdiff_t>(row + dr, 0, ht - 1);
                        const auto cc = std::clamp<std::ptrdiff_t>(col + dc, 0, w - 1);
                        const float v = dem.values[static_cast<std::size_t>(rr * w + cc)];
                        if (dem.is_nodata(v) || !std::isfinite(v)) {
                            valid = false;
                            break;
                        }
                        z[dr + 1][dc + 1] = v;
                    }
                }
                if (!valid) continue;
                // x grows with column (east), y grows with row index (south).
                const double dzdx = ((z[0][2] + 2.0 * z[1][2] + z[2][2]) - (z[0][0] + 2.0 * z[1][0] + z[2][0])) /
                                    (8.0 * h.pixel_size_x);
                const double dzdy = ((z[2][0] + 2.0 * z[2][1] + z[2][2]) - (z[0][0] + 2.0 * z[0][1] + z[0][2])) /
                                    (8.0 * h.pixel_size_y);
                const double degrees = std::atan(std::hypot(dzdx, dzdy)) * 180.0 / std::numbers::pi;
                out.values[static_cast<std::size_t>(row * w + col)] =
                    static_cast<float>(std::clamp(degrees / 90.0, 0.0, 1.0));
            }
        }
    });
    return out;
}

} // namespace palmgrid::compositor
