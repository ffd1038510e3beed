#pragma once

#include "palmgrid/raster/grid.hpp"
#include "palmgrid/raster/roi.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace palmgrid::riskengine {

inline constexpr std::size_t kDefaultWindow = 31;
inline constexpr std::size_t kDefaultMinPairs = 10;
inline constexpr double kRhoTolerance = 1e-9;

/// Double-precision plane; NaN marks nodata.
struct DoubleGrid {
    raster::GridHeader header;
    std::vector<double> values;

    static DoubleGrid filled(const raster::GridHeader& h, double value);
    bool is_nodata(double v) const noexcept { return v != v; }
    /// Float copy with the header's nodata value in place of NaN.
    raster::BandGrid to_band_grid() const;
};

/// Spearman correlation over a window centred on each pixel, using the
/// pairs where both grids are valid, with midranks for ties. Windows are
/// clipped at the edges. Pixels with fewer than `min_pairs` valid pairs or
/// a constant ranking get 0; pixels whose own value is nodata in either grid
/// are nodata. Throws ErrorKind::argument for an even or zero window and
/// ErrorKind::schema for misaligned grids.
DoubleGrid windowed_spearman(const raster::BandGrid& prev, const raster::BandGrid& curr,
                             std::size_t window = kDefaultWindow, std::size_t min_pairs = kDefaultMinPairs);

struct JointCell {
    double p11 = 0.0;
    double p10 = 0.0;
    double p01 = 0.0;
    double p00 = 0.0;
};

/// Contingency probabilities of two Bernoulli indicators with marginals m1
/// (earlier) and m2 (later) and correlation rho. p11 is clamped to the
/// attainable range [max(0, m1 + m2 - 1), min(m1, m2)]. Throws
/// ErrorKind::argument for marginals outside [0,1] or |rho| > 1 + 1e-9.
JointCell joint_cell(double m1, double m2, double rho);

struct JointProbGrids {
    raster::GridHeader header;
    DoubleGrid p11, p10, p01, p00;
    DoubleGrid rho;
};

/// Per-pixel joint_cell. Nodata in either marginal or in rho gives nodata.
JointProbGrids joint_probabilities(const raster::BandGrid& prev, const raster::BandGrid& curr, const DoubleGrid& rho);

/// The p11 plane, renamed "stable_palm".
DoubleGrid stable_palm(const JointProbGrids& joint);

struct StratumRisk {
    double area_ha = 0.0;
    std::optional<double> to_palm_ha;   // empty when the stratum has no area
    std::optional<double> from_palm_ha;
};

struct RoiRisk {
    std::string id;
    StratumRisk forest;
    StratumRisk non_forest;
    double excluded_ha = 0.0; // joint nodata or forest-mask nodata
};

struct TransitionRiskReport {
    std::vector<RoiRisk> rois;
};

/// Area-weighted transition sums per ROI and forest stratum (mask 1 forest,
/// 0 non-forest, 255 excluded). Throws ErrorKind::schema when the forest mask
/// is not on the joint grid's lattice.
TransitionRiskReport risk_aggregate(const JointProbGrids& joint, std::span<const raster::RegionOfInterest> rois,
                                    const raster::MaskGrid& forest);

/// Sum of pixel area times probability over valid pixels, inside the ROI when
/// one is given.
double expected_area_ha(const raster::BandGrid& prob, const raster::RegionOfInterest* roi = nullptr);
/// Sum of pixel area over valid pixels with probability >= threshold.
double thresholded_area_ha(const raster::BandGrid& prob, double threshold,
                           const raster::RegionOfInterest* roi = nullptr);

std::string risk_report_json(const TransitionRiskReport& report);
/// One column per ROI; rows Forest, To-palm risk (forest), From-palm risk
/// (forest), Non-forest, To-palm risk (non-forest), From-palm risk
/// (non-forest), Excluded. Empty strata print "N/A".
std::string risk_report_csv(const TransitionRiskReport& report);

} // namespace palmgrid::riskengine
