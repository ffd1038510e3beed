#include "palmgrid/dataset/folds.hpp"

#include "palmgrid/error.hpp"
#include "palmgrid/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>

namespace palmgrid::dataset {

int fold_of_cell(const HexCell& cell, std::uint64_t seed) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(cell.q));
    h = splitmix64(h ^ static_cast<std::uint64_t>(cell.r));
    return static_cast<int>(h % kFoldCount);
}

FoldAssignment assign_folds(std::span<const SamplePoint> points, const HexGridSpec& spec, std::uint64_t seed) {
    if (points.empty()) fail(ErrorKind::argument, "cannot assign folds to an empty sample set");
    spec.validate();

    FoldAssignment out;
    out.fold_of_point.reserve(points.size());
    for (int f = 0; f < kFoldCount; ++f) out.folds[static_cast<std::size_t>(f)].index = f;
    for (const auto& p : points) {
        const int fold = fold_of_cell(hex_cell_of({p.lon, p.lat}, spec), seed);
        out.fold_of_point.push_back(fold);
        auto& stats = out.folds[static_cast<std::size_t>(fold)];
        ++stats.points;
        if (p.label >= 0.5) ++stats.positives;
    }
    for (auto& stats : out.folds) {
        if (stats.points > 0) {
            stats.positive_fraction = static_cast<double>(stats.positives) / static_cast<double>(stats.points);
        }
    }

    std::array<int, kFoldCount> order{};
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return out.folds[static_cast<std::size_t>(a)].points > out.folds[static_cast<std::size_t>(b)].points;
    });
    out.training_fold = order[0];
    out.validation_fold = order[1];
    out.test_fold = order[2];
    return out;
}

std::string fold_report_json(const FoldAssignment& a) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["folds"] = nlohmann::ordered_json::array();
    for (const auto& f : a.folds) {
        nlohmann::ordered_json fj;
        fj["index"] = f.index;
        fj["points"] = f.points;
        fj["positives"] = f.positives;
        fj["positive_fraction"] = f.positive_fraction ? nlohmann::ordered_json(*f.positive_fraction) : nullptr;
        j["folds"].push_back(fj);
    }
    j["training_fold"] = a.training_fold;
    j["validation_fold"] = a.validation_fold;
    j["test_fold"] = a.test_fold;
    return j.dump(2) + "\n";
}

} // namespace palmgrid::dataset
