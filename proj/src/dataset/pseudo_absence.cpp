#include "palmgrid/dataset/pseudo_absence.hpp"

#include "palmgrid/error.hpp"
#include "palmgrid/raster/projection.hpp"
#include "palmgrid/rng.hpp"

#include <algorithm>

namespace palmgrid::dataset {

namespace {

// Partial Fisher-Yates driven by a counter-based generator: draw k depends
// only on (seed, stratum, k).
std::vector<std::size_t> sample_stratum(const raster::MaskGrid& mask, std::size_t n, std::uint64_t key,
                                        const char* stratum) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < mask.values.size(); ++i) {
        if (mask.values[i] == 1) eligible.push_back(i);
    }
    if (n > eligible.size()) {
        fail(ErrorKind::capacity, std::string("stratum '") + stratum + "' has " + std::to_string(eligible.size()) +
                                      " eligible pixels, " + std::to_string(n) + " requested");
    }
    for (std::size_t k = 0; k < n; ++k) {
        const std::uint64_t remaining = eligible.size() - k;
        const auto offset = static_cast<std::size_t>(
            (static_cast<unsigned __int128>(hash_draw(key, k)) * remaining) >> 64);
        std::swap(eligible[k], eligible[k + offset]);
    }
    eligible.resize(n);
    std::sort(eligible.begin(), eligible.end());
    return eligible;
}

void emit(const raster::MaskGrid& mask, const std::vector<std::size_t>& picks, int year,
          std::vector<SamplePoint>& out) {
    const auto& h = mask.header;
    for (std::size_t idx : picks) {
        const std::size_t row = idx / h.width;
        const std::size_t col = idx % h.width;
        const auto ll = raster::from_grid_coords(h, {h.center_x(col), h.center_y(row)});
        SamplePoint p{ll.lon, ll.lat, 0.0, year, kPseudoAbsenceSource, 1.0};
        validate(p);
        out.push_back(std::move(p));
    }
}

} // namespace

std::vector<SamplePoint> pseudo_absence_sample(const raster::MaskGrid& non_tree, const raster::MaskGrid& stable_forest,
                                               std::size_t n_non_tree, std::size_t n_forest, std::uint64_t seed,
                                               int year) {
    non_tree.validate();
    stable_forest.validate();
    raster::require_same_lattice(non_tree.header, stable_forest.header, "pseudo-absence masks");

    std::vector<SamplePoint> out;
    out.reserve(n_non_tree + n_forest);
    const auto non_tree_picks = sample_stratum(non_tree, n_non_tree, splitmix64(seed) ^ 0x6e6f6e5f74726565ULL, "non_tree");
    const auto forest_picks = sample_stratum(stable_forest, n_forest, splitmix64(seed) ^ 0x666f726573747321ULL, "stable_forest");
    emit(non_tree, non_tree_picks, year, out);
    emit(stable_forest, forest_picks, year, out);
    return out;
}

} // namespace palmgrid::dataset
