#include "unit/test_support.hpp"

#include "palmgrid/parallel.hpp"
#include "palmgrid/riskengine/risk.hpp"
#include "palmgrid/rng.hpp"
#include "palmgrid/synth/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <vector>

using namespace palmgrid;
using namespace palmgrid::riskengine;

namespace {

raster::BandGrid random_grid(std::size_t w, std::size_t h, std::uint64_t seed, int levels = 0, double nodata_rate = 0.0) {
    Rng rng(seed);
    auto g = raster::BandGrid::filled(testing::meters_header(w, h), 0.0f);
    for (auto& v : g.values) {
        v = levels > 0 ? static_cast<float>(rng.below(static_cast<std::uint64_t>(levels))) / static_cast<float>(levels - 1)
                       : static_cast<float>(rng.uniform());
        if (rng.uniform() < nodata_rate) v = g.header.nodata;
    }
    return g;
}

std::vector<double> midranks(const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double less = 0, equal = 0;
        for (double u : v) {
            less += u < v[i];
            equal += u == v[i];
        }
        r[i] = less + (equal + 1.0) / 2.0;
    }
    return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

double naive_rho(const raster::BandGrid& a, const raster::BandGrid& b, std::size_t row, std::size_t col,
                 std::size_t window, std::size_t min_pairs) {
    const auto& h = a.header;
    const std::size_t i0 = row * h.width + col;
    if (a.is_nodata(a.values[i0]) || b.is_nodata(b.values[i0])) return std::nan("");
    const long half = static_cast<long>(window / 2);
    std::vector<double> x, y;
    for (long r = static_cast<long>(row) - half; r <= static_cast<long>(row) + half; ++r) {
        for (long c = static_cast<long>(col) - half; c <= static_cast<long>(col) + half; ++c) {
            if (r < 0 || c < 0 || r >= static_cast<long>(h.height) || c >= static_cast<long>(h.width)) continue;
            const std::size_t i = static_cast<std::size_t>(r) * h.width + static_cast<std::size_t>(c);
            if (a.is_nodata(a.values[i]) || b.is_nodata(b.values[i])) continue;
            x.push_back(a.values[i]);
            y.push_back(b.values[i]);
        }
    }
    if (x.size() < min_pairs) return 0.0;
    return pearson(midranks(x), midranks(y));
}

raster::RegionOfInterest rect(const std::string& id, double x0, double y0, double x1, double y1) {
    return {id, {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

JointProbGrids constant_joint(std::size_t w, std::size_t h, double p01, double p10) {
    JointProbGrids j;
    j.header = testing::meters_header(w, h);
    j.p01 = DoubleGrid::filled(j.header, p01);
    j.p10 = DoubleGrid::filled(j.header, p10);
    j.p11 = DoubleGrid::filled(j.header, 0.0);
    j.p00 = DoubleGrid::filled(j.header, 1.0 - p01 - p10);
    j.rho = DoubleGrid::filled(j.header, 0.0);
    return j;
}

void check_cell_invariants(double m1, double m2, const JointCell& c) {
    for (double p : {c.p11, c.p10, c.p01, c.p00}) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
    CHECK(std::abs(c.p11 + c.p10 + c.p01 + c.p00 - 1.0) <= 1e-9);
    CHECK(std::abs(c.p11 + c.p01 - m2) <= 1e-9);
    CHECK(std::abs(c.p11 + c.p10 - m1) <= 1e-9);
    // m1 + m2 - 1 is itself rounded; allow its one-ulp error.
    CHECK(c.p11 >= std::max(0.0, m1 + m2 - 1.0) - 0x1p-52);
    CHECK(c.p11 <= std::min(m1, m2));
}

} // namespace

TEST_CASE("spearman: identical grids give one") {
    const auto f = random_grid(20, 15, 1);
    const auto rho = windowed_spearman(f, f, 5);
    for (std::size_t r = 2; r + 2 < 15; ++r) {
        for (std::size_t c = 2; c + 2 < 20; ++c) CHECK(rho.values[r * 20 + c] == 1.0);
    }
    CHECK(rho.values[0] == 0.0); // 9 pairs in the clipped corner window
}

TEST_CASE("spearman: reversed grid gives minus one") {
    const auto f = random_grid(20, 15, 2);
    auto g = f;
    for (auto& v : g.values) v = 1.0f - v;
    const auto rho = windowed_spearman(f, g, 7);
    for (double r : rho.values) CHECK(r == -1.0); // corner windows hold 16 pairs
}

TEST_CASE("spearman: matches naive midrank oracle") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const int levels = seed % 3 == 0 ? 0 : static_cast<int>(2 + seed % 5);
        const auto a = random_grid(7, 7, seed * 2, levels, seed % 2 ? 0.1 : 0.0);
        const auto b = random_grid(7, 7, seed * 2 + 1, levels, seed % 2 ? 0.1 : 0.0);
        const std::size_t min_pairs = seed % 4 == 0 ? 10 : 2;
        const auto rho = windowed_spearman(a, b, 3, min_pairs);
        for (std::size_t r = 0; r < 7; ++r) {
            for (std::size_t c = 0; c < 7; ++c) {
                const double want = naive_rho(a, b, r, c, 3, min_pairs);
                const double got = rho.values[r * 7 + c];
                if (std::isnan(want)) {
                    CHECK(std::isnan(got));
                } else {
                    CHECK(std::abs(got - want) <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("spearman: large window oracle with ties") {
    const auto a = random_grid(12, 10, 5, 4);
    const auto b = random_grid(12, 10, 6, 0);
    const auto rho = windowed_spearman(a, b, 9);
    for (std::size_t r = 0; r < 10; ++r) {
        for (std::size_t c = 0; c < 12; ++c) CHECK(std::abs(rho.values[r * 12 + c] - naive_rho(a, b, r, c, 9, 10)) <= 1e-12);
    }
}

TEST_CASE("spearman: invariant under a common increasing transform") {
    auto a = random_grid(16, 16, 7, 6);
    auto b = random_grid(16, 16, 8);
    const auto base = windowed_spearman(a, b, 5);
    for (auto& v : a.values) v = std::exp(3.0f * v);
    for (auto& v : b.values) v = std::exp(3.0f * v);
    const auto moved = windowed_spearman(a, b, 5);
    CHECK(std::memcmp(base.values.data(), moved.values.data(), base.values.size() * sizeof(double)) == 0);
}

TEST_CASE("spearman: fallbacks and nodata") {
    const auto f = random_grid(9, 9, 3);
    const auto constant = raster::BandGrid::filled(testing::meters_header(9, 9), 0.4f);
    for (double r : windowed_spearman(f, constant, 3).values) CHECK(r == 0.0);
    for (double r : windowed_spearman(f, f, 3, 10).values) CHECK(r == 0.0); // at most 9 pairs
    auto holes = f;
    holes.values[40] = holes.header.nodata;
    const auto rho = windowed_spearman(holes, f, 5);
    CHECK(std::isnan(rho.values[40]));
    CHECK(rho.values[41] == 1.0);
    CHECK(rho.to_band_grid().values[40] == holes.header.nodata);
}

TEST_CASE("spearman: argument and schema errors") {
    const auto f = random_grid(9, 9, 3);
    CHECK_ERROR_KIND(windowed_spearman(f, f, 4), ErrorKind::argument);
    CHECK_ERROR_KIND(windowed_spearman(f, f, 0), ErrorKind::argument);
    const auto g = random_grid(9, 8, 3);
    CHECK_ERROR_KIND(windowed_spearman(f, g, 3), ErrorKind::schema);
}

TEST_CASE("spearman: thread count does not change bytes") {
    const auto a = random_grid(40, 33, 11);
    const auto b = random_grid(40, 33, 12, 3);
    set_max_threads(1);
    const auto serial = windowed_spearman(a, b, 7);
    set_max_threads(5);
    const auto parallel = windowed_spearman(a, b, 7);
    set_max_threads(0);
    CHECK(std::memcmp(serial.values.data(), parallel.values.data(), serial.values.size() * sizeof(double)) == 0);
}

TEST_CASE("joint: boundary and textbook cases") {
    auto c = joint_cell(0.0, 0.7, 0.4);
    CHECK(c.p11 == 0.0);
    CHECK(c.p01 == 0.7);
    CHECK(c.p10 == 0.0);
    CHECK(c.p00 == doctest::Approx(0.3).epsilon(1e-15));
    c = joint_cell(0.5, 0.5, 0.0);
    CHECK(c.p11 == 0.25);
    CHECK(c.p10 == 0.25);
    CHECK(c.p01 == 0.25);
    CHECK(c.p00 == 0.25);
    c = joint_cell(0.5, 0.5, 1.0);
    CHECK(c.p11 == 0.5);
    CHECK(c.p01 == 0.0);
    CHECK(c.p10 == 0.0);
    CHECK(c.p00 == 0.5);
}

TEST_CASE("joint: zero correlation is the independence product") {
    Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
        const double m1 = rng.uniform(), m2 = rng.uniform();
        CHECK(joint_cell(m1, m2, 0.0).p11 == m1 * m2);
    }
}

TEST_CASE("joint: invariants over random triples") {
    Rng rng(5);
    for (int i = 0; i < 5000; ++i) {
        const double m1 = i % 50 == 0 ? 1.0 : rng.uniform();
        const double m2 = i % 70 == 0 ? 0.0 : rng.uniform();
        const double rho = rng.uniform(-1.0, 1.0);
        check_cell_invariants(m1, m2, joint_cell(m1, m2, rho));
    }
}

TEST_CASE("joint: correlation range") {
    CHECK_NOTHROW(joint_cell(0.5, 0.5, 1.0 + 1e-10));
    CHECK_ERROR_KIND(joint_cell(0.5, 0.5, 1.0 + 1e-6), ErrorKind::argument);
    CHECK_ERROR_KIND(joint_cell(1.2, 0.5, 0.0), ErrorKind::argument);
    const auto f = random_grid(4, 4, 1);
    auto rho = DoubleGrid::filled(f.header, 0.0);
    rho.values[3] = -1.5;
    CHECK_ERROR_KIND(joint_probabilities(f, f, rho), ErrorKind::argument);
}

TEST_CASE("joint: grids propagate nodata and keep invariants") {
    const auto a = random_grid(12, 9, 21, 0, 0.1);
    const auto b = random_grid(12, 9, 22, 0, 0.1);
    const auto rho = windowed_spearman(a, b, 3, 2);
    const auto j = joint_probabilities(a, b, rho);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const bool missing = a.is_nodata(a.values[i]) || b.is_nodata(b.values[i]);
        CHECK(std::isnan(j.p11.values[i]) == missing);
        if (missing) continue;
        check_cell_invariants(a.values[i], b.values[i],
                              {j.p11.values[i], j.p10.values[i], j.p01.values[i], j.p00.values[i]});
    }
    const auto s = stable_palm(j);
    CHECK(s.header.band_name == "stable_palm");
    CHECK(std::memcmp(s.values.data(), j.p11.values.data(), s.values.size() * sizeof(double)) == 0);
}

TEST_CASE("joint: recovers simulated transition frequency") {
    const auto h = testing::meters_header(200, 200);
    const std::vector<synth::BernoulliParams> cases{{0.3, 0.6, 0.4}, {0.5, 0.5, -0.5}, {0.7, 0.4, 0.2}, {0.2, 0.2, 0.8}};
    std::uint64_t seed = 1;
    for (const auto& p : cases) {
        const auto fields = synth::simulate_bivariate_bernoulli(h, p, seed++);
        const double n = static_cast<double>(h.width * h.height);
        const double expected = joint_cell(p.m1, p.m2, p.rho).p01;
        const double observed = static_cast<double>(fields.count01) / n;
        const double se = std::sqrt(expected * (1.0 - expected) / n);
        CHECK(std::abs(observed - expected) <= 3.0 * se);
    }
}

TEST_CASE("joint: stable palm examples") {
    const auto half = raster::BandGrid::filled(testing::meters_header(3, 3), 0.5f);
    auto zero = half;
    std::fill(zero.values.begin(), zero.values.end(), 0.0f);
    const auto one = DoubleGrid::filled(half.header, 1.0);
    for (double v : stable_palm(joint_probabilities(half, half, one)).values) CHECK(v == 0.5);
    for (double v : stable_palm(joint_probabilities(zero, half, one)).values) CHECK(v == 0.0);
}

TEST_CASE("risk: arithmetic on a 100-pixel ROI") {
    const auto j = constant_joint(20, 20, 0.1, 0.0);
    const auto forest = raster::MaskGrid::filled(j.header, 0);
    const std::vector<raster::RegionOfInterest> rois{rect("a", 0, 0, 100, 100)};
    const auto report = risk_aggregate(j, rois, forest);
    REQUIRE(report.rois.size() == 1);
    const auto& r = report.rois[0];
    CHECK(r.non_forest.area_ha == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*r.non_forest.to_palm_ha == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(*r.non_forest.from_palm_ha == 0.0);
    CHECK(r.forest.area_ha == 0.0);
    CHECK_FALSE(r.forest.to_palm_ha.has_value());
    CHECK(risk_report_csv(report).find("N/A") != std::string::npos);
}

TEST_CASE("risk: forest ROI with null transitions") {
    const auto j = constant_joint(10, 10, 0.0, 0.0);
    const auto forest = raster::MaskGrid::filled(j.header, 1);
    const std::vector<raster::RegionOfInterest> rois{rect("f", 0, 0, 50, 50)};
    const auto r = risk_aggregate(j, rois, forest).rois[0];
    CHECK(r.forest.area_ha == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(*r.forest.to_palm_ha == 0.0);
    CHECK(*r.forest.from_palm_ha == 0.0);
}

TEST_CASE("risk: matches per-pixel oracle and is additive") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto a = random_grid(30, 25, seed * 3, 0, 0.05);
        const auto b = random_grid(30, 25, seed * 3 + 1, 0, 0.05);
        const auto j = joint_probabilities(a, b, windowed_spearman(a, b, 5));
        Rng rng(seed);
        auto forest = raster::MaskGrid::filled(j.header, 0);
        for (auto& m : forest.values) {
            const auto u = rng.below(10);
            m = u < 4 ? 1 : (u == 9 ? raster::kMaskNodata : 0);
        }
        const std::vector<raster::RegionOfInterest> rois{
            {"tri", {{10, 10}, {290, 40}, {120, 240}}}, rect("left", 0, 0, 150, 250), rect("right", 150, 0, 300, 250),
            rect("all", 0, 0, 300, 250)};
        const auto report = risk_aggregate(j, rois, forest);
        for (std::size_t k = 0; k < rois.size(); ++k) {
            const auto mask = raster::rasterize_roi(rois[k], j.header);
            double fa = 0, ft = 0, ff = 0, na = 0, nt = 0, nf = 0, ex = 0;
            for (std::size_t i = 0; i < mask.values.size(); ++i) {
                if (mask.values[i] != 1) continue;
                const double area = 0.01;
                if (forest.values[i] == 255 || std::isnan(j.p01.values[i])) {
                    ex += area;
                } else if (forest.values[i] == 1) {
                    fa += area; ft += area * j.p01.values[i]; ff += area * j.p10.values[i];
                } else {
                    na += area; nt += area * j.p01.values[i]; nf += area * j.p10.values[i];
                }
            }
            const auto& r = report.rois[k];
            CHECK(r.forest.area_ha == doctest::Approx(fa).epsilon(1e-9));
            CHECK(*r.forest.to_palm_ha == doctest::Approx(ft).epsilon(1e-9));
            CHECK(*r.forest.from_palm_ha == doctest::Approx(ff).epsilon(1e-9));
            CHECK(r.non_forest.area_ha == doctest::Approx(na).epsilon(1e-9));
            CHECK(*r.non_forest.to_palm_ha == doctest::Approx(nt).epsilon(1e-9));
            CHECK(*r.non_forest.from_palm_ha == doctest::Approx(nf).epsilon(1e-9));
            CHECK(r.excluded_ha == doctest::Approx(ex).epsilon(1e-9));
            CHECK(*r.forest.to_palm_ha <= r.forest.area_ha);
        }
        const auto& left = report.rois[1];
        const auto& right = report.rois[2];
        const auto& all = report.rois[3];
        CHECK(left.forest.area_ha + right.forest.area_ha == doctest::Approx(all.forest.area_ha).epsilon(1e-12));
        CHECK(*left.non_forest.to_palm_ha + *right.non_forest.to_palm_ha ==
              doctest::Approx(*all.non_forest.to_palm_ha).epsilon(1e-12));
    }
}

TEST_CASE("risk: thread count does not change the report") {
    const auto a = random_grid(50, 41, 1);
    const auto b = random_grid(50, 41, 2);
    const auto j = joint_probabilities(a, b, windowed_spearman(a, b, 5));
    const auto forest = raster::MaskGrid::filled(j.header, 1);
    const std::vector<raster::RegionOfInterest> rois{{"t", {{3, 3}, {480, 20}, {200, 400}}}};
    set_max_threads(1);
    const auto serial = risk_report_json(risk_aggregate(j, rois, forest));
    set_max_threads(6);
    const auto parallel = risk_report_json(risk_aggregate(j, rois, forest));
    set_max_threads(0);
    CHECK(serial == parallel);
}

TEST_CASE("risk: misaligned mask and report formats") {
    const auto j = constant_joint(10, 10, 0.1, 0.2);
    const auto bad = raster::MaskGrid::filled(testing::meters_header(10, 9), 0);
    const std::vector<raster::RegionOfInterest> rois{rect("a,b", 0, 0, 50, 50), rect("c", 50, 50, 100, 100)};
    CHECK_ERROR_KIND(risk_aggregate(j, rois, bad), ErrorKind::schema);
    const auto report = risk_aggregate(j, rois, raster::MaskGrid::filled(j.header, 0));
    const auto csv = risk_report_csv(report);
    CHECK(csv.rfind("# schema_version: 1\nrow,\"a,b\",c\nForest,", 0) == 0);
    for (const char* row : {"To-palm risk (forest)", "From-palm risk (forest)", "Non-forest", "To-palm risk (non-forest)",
                            "From-palm risk (non-forest)"}) {
        CHECK(csv.find(std::string("\n") + row + ",") != std::string::npos);
    }
    const auto js = nlohmann::json::parse(risk_report_json(report));
    CHECK(js["schema_version"] == 1);
    CHECK(js["rois"][0]["forest"]["to_palm_risk_ha"] == "N/A");
    CHECK(js["rois"][1]["non_forest"]["area_ha"].get<double>() == doctest::Approx(0.25));
}

TEST_CASE("area: expected and thresholded") {
    auto half = raster::BandGrid::filled(testing::meters_header(10, 10), 0.5f);
    CHECK(expected_area_ha(half) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(thresholded_area_ha(half, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(thresholded_area_ha(half, 0.506) == 0.0);
    auto ones = raster::BandGrid::filled(testing::meters_header(10, 10), 1.0f);
    CHECK(expected_area_ha(ones) == doctest::Approx(1.0).epsilon(1e-12));
    const auto roi = rect("q", 0, 0, 50, 50);
    CHECK(expected_area_ha(ones, &roi) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("area: random grid matches naive loop") {
    const auto g = random_grid(37, 23, 9, 0, 0.1);
    const raster::RegionOfInterest roi{"t", {{5, 5}, {360, 30}, {100, 220}}};
    const auto mask = raster::rasterize_roi(roi, g.header);
    double e = 0, t = 0;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        if (mask.values[i] != 1 || g.is_nodata(g.values[i])) continue;
        e += 0.01 * g.values[i];
        if (g.values[i] >= 0.3) t += 0.01;
    }
    CHECK(expected_area_ha(g, &roi) == doctest::Approx(e).epsilon(1e-9));
    CHECK(thresholded_area_ha(g, 0.3, &roi) == doctest::Approx(t).epsilon(1e-9));
}

TEST_CASE("area: bimodal map gap is closed-form") {
    auto g = raster::BandGrid::filled(testing::meters_header(20, 20), 0.25f);
    for (std::size_t i = 0; i < 100; ++i) g.values[i] = 0.875f;
    // 100 pixels at 0.875 and 300 at 0.25, 0.01 ha each.
    const double expected = 0.01 * (100 * 0.875 + 300 * 0.25);
    const double thresholded = 0.01 * 100;
    CHECK(expected_area_ha(g) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(thresholded_area_ha(g, 0.5) == doctest::Approx(thresholded).epsilon(1e-12));
    CHECK(expected_area_ha(g) - thresholded_area_ha(g, 0.5) == doctest::Approx(0.01 * (300 * 0.25 - 100 * 0.125)));
}
