#pragma once

#include "palmgrid/raster/grid.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace palmgrid::metrics {

inline constexpr std::size_t kDefaultOtsuBins = 256;

struct ScoredSample {
    double score = 0.0;  // probability in [0,1]
    double label = 0.0;  // binarized at 0.5
    double weight = 1.0;
    bool positive() const noexcept { return label >= 0.5; }
};

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

/// Rates are weighted; counts are plain sample counts. Undefined rates are
/// empty optionals.
struct MetricReport {
    double threshold = 0.5;
    std::size_t samples = 0;
    double cross_entropy = 0.0;
    double binary_accuracy = 0.0;
    std::optional<double> auc;
    std::optional<double> recall;
    std::optional<double> precision;
    std::optional<double> f1;
    ConfusionCounts counts;
};

/// Positive prediction iff score >= threshold. Throws ErrorKind::argument for
/// empty input, scores outside [0,1], or nonpositive weights.
MetricReport evaluate(std::span<const ScoredSample> samples, double threshold);

/// Weighted Mann-Whitney statistic with midrank ties; empty when either class
/// is missing.
std::optional<double> auc(std::span<const ScoredSample> samples);

struct SweepRow {
    double threshold = 0.0;
    double accuracy = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::size_t predicted_positive = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // thresholds k / n for k = 0..n
    std::optional<double> best_f1_threshold; // lowest threshold among F1 maxima
};

/// Throws ErrorKind::argument for n_thresholds < 1 or empty input.
SweepResult curve_sweep(std::span<const ScoredSample> samples, std::size_t n_thresholds);

/// Histogram threshold maximizing between-class variance over `bins` equal
/// bins on [0,1]; returns a bin boundary k / bins with class 0 the bins below
/// it. Ties go to the lowest boundary. Throws ErrorKind::degenerate_input when
/// fewer than two bins are occupied and ErrorKind::argument for bins < 2 or
/// values outside [0,1].
double otsu_threshold(std::span<const double> values, std::span<const double> weights = {},
                      std::size_t bins = kDefaultOtsuBins);
/// Nodata pixels are excluded.
double otsu_threshold(const raster::BandGrid& probabilities, std::size_t bins = kDefaultOtsuBins);

std::string report_json(const MetricReport& report);
/// Header row plus one value row shaped like an accuracy table.
std::string report_csv(const MetricReport& report);
std::string sweep_json(const SweepResult& sweep);
std::string sweep_csv(const SweepResult& sweep);

} // namespace palmgrid::metrics
