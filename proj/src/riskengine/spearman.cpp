#include "palmgrid/riskengine/risk.hpp"

#include "palmgrid/error.hpp"
#include "palmgrid/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace palmgrid::riskengine {

namespace {

constexpr std::uint32_t kInvalid = std::numeric_limits<std::uint32_t>::max();

struct DenseRanks {
    std::vector<std::uint32_t> rank; // kInvalid for nodata
    std::size_t distinct = 0;
};

// Global dense ranks preserve the ordering inside every window.
DenseRanks dense_rank(const raster::BandGrid& g) {
    std::vector<float> sorted;
    sorted.reserve(g.values.size());
    for (float v : g.values) {
        if (std::isfinite(v) && !g.is_nodata(v)) sorted.push_back(v);
    }
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    DenseRanks out;
    out.distinct = sorted.size();
    out.rank.resize(g.values.size(), kInvalid);
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        const float v = g.values[i];
        if (std::isfinite(v) && !g.is_nodata(v)) {
            out.rank[i] = static_cast<std::uint32_t>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
        }
    }
    return out;
}

// Doubled midranks (2 * midrank, always an integer) of one window's ranks.
class MidrankTable {
public:
    MidrankTable(std::size_t distinct, std::size_t max_pairs)
        : counting_(distinct <= 2 * max_pairs), counts_(counting_ ? distinct : 0, 0), table_(counts_.size(), 0) {}

    // Fills r2[i] for every ranks[i]; returns the sum of r2 squared.
    std::uint64_t assign(const std::vector<std::uint32_t>& ranks, std::vector<std::uint64_t>& r2) {
        r2.resize(ranks.size());
        std::uint64_t sum_sq = 0;
        if (counting_) {
            for (std::uint32_t k : ranks) ++counts_[k];
            std::uint64_t below = 0;
            for (std::size_t k = 0; k < counts_.size(); ++k) {
                const std::uint64_t c = counts_[k];
                if (c == 0) continue;
                table_[k] = 2 * below + c + 1;
                sum_sq += c * table_[k] * table_[k];
                below += c;
            }
            for (std::size_t i = 0; i < ranks.size(); ++i) r2[i] = table_[ranks[i]];
            for (std::uint32_t k : ranks) counts_[k] = 0;
            return sum_sq;
        }
        sorted_ = ranks;
        std::sort(sorted_.begin(), sorted_.end());
        for (std::size_t i = 0; i < ranks.size(); ++i) {
            const auto range = std::equal_range(sorted_.begin(), sorted_.end(), ranks[i]);
            const auto lo = static_cast<std::uint64_t>(range.first - sorted_.begin());
            const auto hi = static_cast<std::uint64_t>(range.second - sorted_.begin());
            r2[i] = lo + hi + 1;
            sum_sq += r2[i] * r2[i];
        }
        return sum_sq;
    }

private:
    bool counting_;
    std::vector<std::uint32_t> counts_;
    std::vector<std::uint64_t> table_;
    std::vector<std::uint32_t> sorted_;
};

} // namespace

DoubleGrid DoubleGrid::filled(const raster::GridHeader& h, double value) {
    h.validate();
    return DoubleGrid{h, std::vector<double>(h.width * h.height, value)};
}

raster::BandGrid DoubleGrid::to_band_grid() const {
    raster::BandGrid out{header, std::vector<float>(values.size())};
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.values[i] = is_nodata(values[i]) ? header.nodata : static_cast<float>(values[i]);
    }
    return out;
}

DoubleGrid windowed_spearman(const raster::BandGrid& prev, const raster::BandGrid& curr, std::size_t window,
                             std::size_t min_pairs) {
    if (window == 0 || window % 2 == 0) {
        fail(ErrorKind::argument, "spearman window must be a positive odd pixel count, got " + std::to_string(window));
    }
    prev.validate();
    curr.validate();
    raster::require_aligned(prev.header, curr.header, "spearman inputs");

    const auto& h = prev.header;
    const DenseRanks rx = dense_rank(prev);
    const DenseRanks ry = dense_rank(curr);
    raster::GridHeader out_header = h;
    out_header.band_name = "rho";
    DoubleGrid out = DoubleGrid::filled(out_header, std::numeric_limits<double>::quiet_NaN());
    const std::size_t half = window / 2;
    const std::size_t max_pairs = std::min(window, h.width) * std::min(window, h.height);

    parallel_for(h.height, [&](std::size_t r0, std::size_t r1) {
        MidrankTable tx(rx.distinct, max_pairs), ty(ry.distinct, max_pairs);
        std::vector<std::uint32_t> px, py;
        std::vector<std::uint64_t> r2x, r2y;
        px.reserve(max_pairs);
        py.reserve(max_pairs);
        for (std::size_t row = r0; row < r1; ++row) {
            const std::size_t wr0 = row >= half ? row - half : 0;
            const std::size_t wr1 = std::min(h.height, row + half + 1);
            for (std::size_t col = 0; col < h.width; ++col) {
                const std::size_t centre = row * h.width + col;
                if (rx.rank[centre] == kInvalid || ry.rank[centre] == kInvalid) continue;
                const std::size_t wc0 = col >= half ? col - half : 0;
                const std::size_t wc1 = std::min(h.width, col + half + 1);
                px.clear();
                py.clear();
                for (std::size_t r = wr0; r < wr1; ++r) {
                    for (std::size_t c = wc0; c < wc1; ++c) {
                        const std::size_t i = r * h.width + c;
                        if (rx.rank[i] != kInvalid && ry.rank[i] != kInvalid) {
                            px.push_back(rx.rank[i]);
                            py.push_back(ry.rank[i]);
                        }
                    }
                }
                const std::size_t n = px.size();
                if (n < min_pairs || n < 2) {
                    out.values[centre] = 0.0;
                    continue;
                }
                const std::uint64_t sxx = tx.assign(px, r2x);
                const std::uint64_t syy = ty.assign(py, r2y);
                std::uint64_t sxy = 0;
                for (std::size_t i = 0; i < n; ++i) sxy += r2x[i] * r2y[i];
                // Doubled ranks sum to n(n+1) in both variables.
                const auto nn = static_cast<__int128>(n);
                const __int128 s = nn * (nn + 1);
                const __int128 num = nn * static_cast<__int128>(sxy) - s * s;
                const __int128 dx = nn * static_cast<__int128>(sxx) - s * s;
                const __int128 dy = nn * static_cast<__int128>(syy) - s * s;
                if (dx <= 0 || dy <= 0) {
                    out.values[centre] = 0.0;
                    continue;
                }
                const double rho = static_cast<double>(num) /
                                   std::sqrt(static_cast<double>(dx) * static_cast<double>(dy));
                out.values[centre] = std::clamp(rho, -1.0, 1.0);
            }
        }
    });
    return out;
}

} // namespace palmgrid::riskengine
