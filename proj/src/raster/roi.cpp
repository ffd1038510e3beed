#include "palmgrid/raster/roi.hpp"

#include "palmgrid/error.hpp"
#include "palmgrid/raster/grid_io.hpp"

#include <json.hpp>

#include <algorithm>

namespace palmgrid::raster {

namespace {

int orientation(const Vertex& a, const Vertex& b, const Vertex& c) {
    const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    return (v > 0.0) - (v < 0.0);
}

bool on_segment(const Vertex& a, const Vertex& b, const Vertex& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Vertex& p1, const Vertex& p2, const Vertex& q1, const Vertex& q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

std::vector<Vertex> open_ring(const std::vector<Vertex>& ring) {
    std::vector<Vertex> out = ring;
    if (out.size() > 1 && out.front().x == out.back().x && out.front().y == out.back().y) {
        out.pop_back();
    }
    return out;
}

} // namespace

void RegionOfInterest::validate() const {
    const auto pts = open_ring(ring);
    if (pts.size() < 3) {
        fail(ErrorKind::argument, "ROI '" + id + "' needs at least 3 vertices, has " +
                                      std::to_string(pts.size()));
    }
    for (const auto& v : pts) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
            fail(ErrorKind::argument, "ROI '" + id + "' has a non-finite vertex");
        }
    }
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n])) {
                fail(ErrorKind::argument, "ROI '" + id + "' ring self-intersects (edges " +
                                              std::to_string(i) + " and " + std::to_string(j) + ")");
            }
        }
    }
}

std::vector<RegionOfInterest> parse_rois(std::string_view json_text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(ErrorKind::parse, std::string("ROI file is not valid JSON: ") + e.what());
    }
    if (!j.is_array()) fail(ErrorKind::parse, "ROI file must hold a JSON array");
    std::vector<RegionOfInterest> rois;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto& item = j[k];
        if (!item.is_object() || !item.contains("id") || !item.contains("ring") ||
            !item["id"].is_string() || !item["ring"].is_array()) {
            fail(ErrorKind::parse, "ROI entry " + std::to_string(k) + " needs string 'id' and array 'ring'");
        }
        RegionOfInterest roi;
        roi.id = item["id"].get<std::string>();
        for (const auto& v : item["ring"]) {
            if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
                fail(ErrorKind::parse, "ROI '" + roi.id + "' has a vertex that is not [x, y]");
            }
            roi.ring.push_back({v[0].get<double>(), v[1].get<double>()});
        }
        roi.validate();
        rois.push_back(std::move(roi));
    }
    return rois;
}

std::vector<RegionOfInterest> read_rois(const std::filesystem::path& path) {
    return parse_rois(read_file(path));
}

std::string format_rois(const std::vector<RegionOfInterest>& rois) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& roi : rois) {
        nlohmann::json ring = nlohmann::json::array();
        for (const auto& v : roi.ring) ring.push_back({v.x, v.y});
        j.push_back({{"id", roi.id}, {"ring", ring}});
    }
    return j.dump(2) + "\n";
}

MaskGrid rasterize_roi(const RegionOfInterest& roi, const GridHeader& grid) {
    grid.validate();
    roi.validate();
    const auto pts = open_ring(roi.ring);
    const std::size_t n = pts.size();

    GridHeader mask_header = grid;
    mask_header.nodata = kMaskNodata;
    mask_header.band_name = roi.id;
    MaskGrid mask = MaskGrid::filled(mask_header, 0);

    // Scanline form of the crossing-number test: a center is inside when an odd
    // number of edge crossings on its row lie strictly to its right.
    std::vector<double> crossings;
    for (std::size_t row = 0; row < grid.height; ++row) {
        const double y = grid.center_y(row);
        crossings.clear();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const Vertex& a = pts[i];
            const Vertex& b = pts[j];
            if ((a.y > y) != (b.y > y)) {
                crossings.push_back((b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x);
            }
        }
        if (crossings.empty()) continue;
        std::sort(crossings.begin(), crossings.end());
        std::size_t right = 0; // crossings <= x
        for (std::size_t col = 0; col < grid.width; ++col) {
            const double x = grid.center_x(col);
            while (right < crossings.size() && crossings[right] <= x) ++right;
            const std::size_t strictly_right = crossings.size() - right;
            if (strictly_right % 2 == 1) mask.at(row, col) = 1;
        }
    }
    return mask;
}

} // namespace palmgrid::raster
