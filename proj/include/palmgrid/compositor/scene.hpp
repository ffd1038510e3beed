#pragma once

#include "palmgrid/raster/grid.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace palmgrid::compositor {

struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    /// Strict "YYYY-MM-DD"; throws ErrorKind::parse otherwise.
    static Date parse(std::string_view text);
    std::string str() const;

    auto operator<=>(const Date&) const = default;
};

/// One acquisition: co-registered bands plus an optional per-pixel cloud
/// score (higher is clearer).
struct Scene {
    Date timestamp;
    std::map<std::string, raster::BandGrid> bands;
    std::optional<raster::BandGrid> quality;

    const raster::BandGrid& band(const std::string& name) const;
    /// Throws ErrorKind::schema when bands (and quality) are not aligned.
    void validate() const;
};

/// Loads a scene manifest: [{"timestamp":"YYYY-MM-DD","bands":{"name":"path"},
/// "quality":"path"|null}, ...]. Relative paths resolve against the manifest's
/// directory.
std::vector<Scene> load_scene_manifest(const std::filesystem::path& manifest);

/// Scenes whose timestamp falls in `year`, in manifest order.
std::vector<Scene> scenes_in_year(const std::vector<Scene>& scenes, int year);

} // namespace palmgrid::compositor
