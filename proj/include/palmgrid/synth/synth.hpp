#pragma once

#include "palmgrid/palmnet/mlp.hpp"
#include "palmgrid/raster/grid.hpp"

#include <cstdint>

namespace palmgrid::synth {

/// Two Gaussian classes separated along channels 0 and 1 (means 0.3 and 0.7,
/// sd 0.08, clipped to [0,1]); the other 22 channels are uniform noise.
/// Labels alternate so both classes hold half the rows.
palmnet::LabeledBatch make_separable_blobs(std::size_t n, std::uint64_t seed);

struct BernoulliParams {
    double m1 = 0.5;  // P(first indicator = 1)
    double m2 = 0.5;  // P(second indicator = 1)
    double rho = 0.0; // correlation of the two indicators
    /// p11 from the moments; throws ErrorKind::argument when the triple is not
    /// attainable by a bivariate Bernoulli law.
    double p11() const;
    double p01() const { return m2 - p11(); }
    double p10() const { return m1 - p11(); }
};

struct IndicatorFields {
    raster::BandGrid prev; // 0/1 values
    raster::BandGrid curr;
    std::size_t count01 = 0;
    std::size_t count10 = 0;
    std::size_t count11 = 0;
};

/// Independent pixels, each drawing a (prev, curr) pair from the joint law.
IndicatorFields simulate_bivariate_bernoulli(const raster::GridHeader& header, const BernoulliParams& params,
                                             std::uint64_t seed);

} // namespace palmgrid::synth
