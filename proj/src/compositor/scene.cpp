#include "palmgrid/compositor/scene.hpp"

#include "palmgrid/error.hpp"
#include "palmgrid/raster/grid_io.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>

namespace palmgrid::compositor {

namespace {

int parse_field(std::string_view text, std::string_view whole) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        fail(ErrorKind::parse, "bad date '" + std::string(whole) + "', expected YYYY-MM-DD");
    }
    return v;
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

} // namespace

Date Date::parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        fail(ErrorKind::parse, "bad date '" + std::string(text) + "', expected YYYY-MM-DD");
    }
    Date d{parse_field(text.substr(0, 4), text), parse_field(text.substr(5, 2), text),
           parse_field(text.substr(8, 2), text)};
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (d.month < 1 || d.month > 12) fail(ErrorKind::parse, "bad month in '" + std::string(text) + "'");
    const int max_day = kDays[d.month - 1] + (d.month == 2 && leap(d.year) ? 1 : 0);
    if (d.day < 1 || d.day > max_day) fail(ErrorKind::parse, "bad day in '" + std::string(text) + "'");
    return d;
}

std::string Date::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

const raster::BandGrid& Scene::band(const std::string& name) const {
    auto it = bands.find(name);
    if (it == bands.end()) {
        fail(ErrorKind::schema, "scene " + timestamp.str() + " has no band '" + name + "'");
    }
    return it->second;
}

void Scene::validate() const {
    if (bands.empty()) fail(ErrorKind::schema, "scene " + timestamp.str() + " has no bands");
    const auto& ref = bands.begin()->second;
    for (const auto& [name, grid] : bands) {
        grid.validate();
        raster::require_aligned(ref.header, grid.header, "scene " + timestamp.str() + " band " + name);
    }
    if (quality) {
        quality->validate();
        raster::require_aligned(ref.header, quality->header, "scene " + timestamp.str() + " quality");
    }
}

std::vector<Scene> load_scene_manifest(const std::filesystem::path& manifest) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(raster::read_file(manifest));
    } catch (const json::exception& e) {
        fail(ErrorKind::parse, "scene manifest '" + manifest.string() + "': " + e.what());
    }
    if (!j.is_array()) fail(ErrorKind::parse, "scene manifest must be a JSON array");
    const auto base = manifest.parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base / path;
    };

    std::vector<Scene> scenes;
    for (const auto& item : j) {
        if (!item.is_object() || !item.contains("timestamp") || !item.contains("bands") ||
            !item["timestamp"].is_string() || !item["bands"].is_object()) {
            fail(ErrorKind::parse, "scene entries need 'timestamp' and 'bands'");
        }
        Scene scene;
        scene.timestamp = Date::parse(item["timestamp"].get<std::string>());
        for (const auto& [name, path] : item["bands"].items()) {
            if (!path.is_string()) fail(ErrorKind::parse, "band path for '" + name + "' must be text");
            scene.bands.emplace(name, raster::read_grid(resolve(path.get<std::string>())));
        }
        if (item.contains("quality") && !item["quality"].is_null()) {
            if (!item["quality"].is_string()) fail(ErrorKind::parse, "'quality' must be a path or null");
            scene.quality = raster::read_grid(resolve(item["quality"].get<std::string>()));
        }
        scene.validate();
        scenes.push_back(std::move(scene));
    }
    return scenes;
}

std::vector<Scene> scenes_in_year(const std::vector<Scene>& scenes, int year) {
    std::vector<Scene> out;
    for (const auto& s : scenes) {
        if (s.timestamp.year == year) out.push_back(s);
    }
    return out;
}

} // namespace palmgrid::compositor
