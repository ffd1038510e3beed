#include "palmgrid/synth/synth.hpp"

#include "palmgrid/error.hpp"
#include "palmgrid/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace palmgrid::synth {

palmnet::LabeledBatch make_separable_blobs(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    palmnet::LabeledBatch batch;
    std::array<double, palmnet::kInputSize> x{};
    for (std::size_t i = 0; i < n; ++i) {
        const double label = (i % 2 == 0) ? 1.0 : 0.0;
        const double mean = label > 0.5 ? 0.7 : 0.3;
        for (std::size_t c = 0; c < x.size(); ++c) {
            x[c] = c < 2 ? std::clamp(mean + 0.08 * rng.normal(), 0.0, 1.0) : rng.uniform();
        }
        batch.push_back(x, label);
    }
    return batch;
}

double BernoulliParams::p11() const {
    if (!(m1 >= 0.0 && m1 <= 1.0 && m2 >= 0.0 && m2 <= 1.0 && rho >= -1.0 && rho <= 1.0)) {
        fail(ErrorKind::argument, "bivariate Bernoulli parameters out of range");
    }
    const double p = rho * std::sqrt(m1 * (1.0 - m1) * m2 * (1.0 - m2)) + m1 * m2;
    const double lo = std::max(0.0, m1 + m2 - 1.0);
    const double hi = std::min(m1, m2);
    if (p < lo - 1e-12 || p > hi + 1e-12) {
        fail(ErrorKind::argument, "correlation not attainable for these marginals");
    }
    return std::clamp(p, lo, hi);
}

IndicatorFields simulate_bivariate_bernoulli(const raster::GridHeader& header, const BernoulliParams& params,
                                             std::uint64_t seed) {
    header.validate();
    const double p11 = params.p11();
    const double p10 = params.m1 - p11;
    const double p01 = params.m2 - p11;
    IndicatorFields out{raster::BandGrid::filled(header, 0.0f), raster::BandGrid::filled(header, 0.0f)};
    out.prev.header.band_name = "prev";
    out.curr.header.band_name = "curr";
    Rng rng(seed);
    for (std::size_t i = 0; i < out.prev.values.size(); ++i) {
        const double u = rng.uniform();
        if (u < p11) {
            out.prev.values[i] = out.curr.values[i] = 1.0f;
            ++out.count11;
        } else if (u < p11 + p10) {
            out.prev.values[i] = 1.0f;
            ++out.count10;
        } else if (u < p11 + p10 + p01) {
            out.curr.values[i] = 1.0f;
            ++out.count01;
        }
    }
    return out;
}

} // namespace palmgrid::synth
