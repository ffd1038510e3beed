#include "palmgrid/riskengine/risk.hpp"

#include "palmgrid/error.hpp"
#include "palmgrid/parallel.hpp"
#include "palmgrid/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace palmgrid::riskengine {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool valid(const raster::BandGrid& g, float v) { return std::isfinite(v) && !g.is_nodata(v); }

std::optional<raster::MaskGrid> roi_mask(const raster::RegionOfInterest* roi, const raster::GridHeader& h) {
    if (!roi) return std::nullopt;
    return raster::rasterize_roi(*roi, h);
}

template <typename PixelWeight>
double area_sum(const raster::BandGrid& prob, const raster::RegionOfInterest* roi, PixelWeight weight) {
    prob.validate();
    const auto mask = roi_mask(roi, prob.header);
    const auto& h = prob.header;
    double total = 0.0;
    for (std::size_t row = 0; row < h.height; ++row) {
        const double area = raster::pixel_area_ha(h, row);
        double row_sum = 0.0;
        for (std::size_t col = 0; col < h.width; ++col) {
            const std::size_t i = row * h.width + col;
            if (mask && mask->values[i] != 1) continue;
            const float v = prob.values[i];
            if (valid(prob, v)) row_sum += area * weight(static_cast<double>(v));
        }
        total += row_sum;
    }
    return total;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

nlohmann::ordered_json stratum_json(const StratumRisk& s) {
    nlohmann::ordered_json j;
    j["area_ha"] = s.area_ha;
    j["to_palm_risk_ha"] = s.to_palm_ha ? nlohmann::ordered_json(*s.to_palm_ha) : nlohmann::ordered_json("N/A");
    j["from_palm_risk_ha"] = s.from_palm_ha ? nlohmann::ordered_json(*s.from_palm_ha) : nlohmann::ordered_json("N/A");
    return j;
}

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : "N/A"; }

} // namespace

JointCell joint_cell(double m1, double m2, double rho) {
    if (!(m1 >= 0.0 && m1 <= 1.0 && m2 >= 0.0 && m2 <= 1.0)) {
        fail(ErrorKind::argument, "marginal probabilities must lie in [0, 1]");
    }
    if (!(std::abs(rho) <= 1.0 + kRhoTolerance)) {
        fail(ErrorKind::argument, "correlation must lie in [-1, 1], got " + format_double(rho));
    }
    rho = std::clamp(rho, -1.0, 1.0);
    const double raw = rho * std::sqrt(m1 * (1.0 - m1) * m2 * (1.0 - m2)) + m1 * m2;
    JointCell c;
    const double hi = std::min(m1, m2);
    // Rounding in m1 + m2 - 1 can push the lower bound past the upper one.
    const double lo = std::min(hi, std::max(0.0, m1 + m2 - 1.0));
    c.p11 = std::clamp(raw, lo, hi);
    c.p01 = m2 - c.p11;
    c.p10 = m1 - c.p11;
    c.p00 = std::clamp(1.0 - c.p11 - c.p01 - c.p10, 0.0, 1.0);
    return c;
}

JointProbGrids joint_probabilities(const raster::BandGrid& prev, const raster::BandGrid& curr, const DoubleGrid& rho) {
    prev.validate();
    curr.validate();
    raster::require_aligned(prev.header, curr.header, "joint probability marginals");
    raster::require_same_lattice(prev.header, rho.header, "correlation grid");
    if (rho.values.size() != prev.values.size()) fail(ErrorKind::shape, "correlation grid has the wrong pixel count");

    JointProbGrids out;
    out.header = prev.header;
    auto plane = [&](const char* name) {
        raster::GridHeader h = prev.header;
        h.band_name = name;
        return DoubleGrid::filled(h, kNaN);
    };
    out.p11 = plane("p11");
    out.p10 = plane("p10");
    out.p01 = plane("p01");
    out.p00 = plane("p00");
    out.rho = rho;

    // Validate up front so worker threads never throw.
    for (std::size_t i = 0; i < prev.values.size(); ++i) {
        const float a = prev.values[i], b = curr.values[i];
        if (valid(prev, a) && !(a >= 0.0f && a <= 1.0f)) fail(ErrorKind::argument, "earlier probabilities must lie in [0, 1]");
        if (valid(curr, b) && !(b >= 0.0f && b <= 1.0f)) fail(ErrorKind::argument, "later probabilities must lie in [0, 1]");
        const double r = rho.values[i];
        if (!rho.is_nodata(r) && !(std::abs(r) <= 1.0 + kRhoTolerance)) {
            fail(ErrorKind::argument, "correlation must lie in [-1, 1], got " + format_double(r));
        }
    }
    const auto& h = prev.header;
    parallel_for(h.height, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t i = r0 * h.width; i < r1 * h.width; ++i) {
            const float a = prev.values[i], b = curr.values[i];
            const double r = rho.values[i];
            if (!valid(prev, a) || !valid(curr, b) || rho.is_nodata(r)) continue;
            const JointCell c = joint_cell(a, b, r);
            out.p11.values[i] = c.p11;
            out.p10.values[i] = c.p10;
            out.p01.values[i] = c.p01;
            out.p00.values[i] = c.p00;
        }
    });
    return out;
}

DoubleGrid stable_palm(const JointProbGrids& joint) {
    DoubleGrid out = joint.p11;
    out.header.band_name = "stable_palm";
    return out;
}

TransitionRiskReport risk_aggregate(const JointProbGrids& joint, std::span<const raster::RegionOfInterest> rois,
                                    const raster::MaskGrid& forest) {
    const auto& h = joint.header;
    forest.validate();
    raster::require_same_lattice(h, forest.header, "forest mask");
    for (const DoubleGrid* g : {&joint.p11, &joint.p10, &joint.p01, &joint.p00}) {
        raster::require_same_lattice(h, g->header, "joint probability plane");
        if (g->values.size() != h.width * h.height) fail(ErrorKind::schema, "joint probability plane has the wrong size");
    }

    enum Slot { forest_area, forest_to, forest_from, other_area, other_to, other_from, excluded, kSlots };
    TransitionRiskReport report;
    for (const auto& roi : rois) {
        const raster::MaskGrid mask = raster::rasterize_roi(roi, h);
        std::vector<std::array<double, kSlots>> rows(h.height);
        parallel_for(h.height, [&](std::size_t r0, std::size_t r1) {
            for (std::size_t row = r0; row < r1; ++row) {
                const double area = raster::pixel_area_ha(h, row);
                std::array<double, kSlots> acc{};
                for (std::size_t col = 0; col < h.width; ++col) {
                    const std::size_t i = row * h.width + col;
                    if (mask.values[i] != 1) continue;
                    const std::uint8_t f = forest.values[i];
                    const double p01 = joint.p01.values[i], p10 = joint.p10.values[i];
                    if (f == raster::kMaskNodata || joint.p01.is_nodata(p01) || joint.p10.is_nodata(p10)) {
                        acc[excluded] += area;
                    } else if (f == 1) {
                        acc[forest_area] += area;
                        acc[forest_to] += area * p01;
                        acc[forest_from] += area * p10;
                    } else {
                        acc[other_area] += area;
                        acc[other_to] += area * p01;
                        acc[other_from] += area * p10;
                    }
                }
                rows[row] = acc;
            }
        });
        std::array<double, kSlots> total{};
        for (const auto& r : rows) {
            for (std::size_t k = 0; k < kSlots; ++k) total[k] += r[k];
        }
        RoiRisk rr;
        rr.id = roi.id;
        rr.forest.area_ha = total[forest_area];
        rr.non_forest.area_ha = total[other_area];
        if (total[forest_area] > 0.0) {
            rr.forest.to_palm_ha = total[forest_to];
            rr.forest.from_palm_ha = total[forest_from];
        }
        if (total[other_area] > 0.0) {
            rr.non_forest.to_palm_ha = total[other_to];
            rr.non_forest.from_palm_ha = total[other_from];
        }
        rr.excluded_ha = total[excluded];
        report.rois.push_back(std::move(rr));
    }
    return report;
}

double expected_area_ha(const raster::BandGrid& prob, const raster::RegionOfInterest* roi) {
    return area_sum(prob, roi, [](double p) { return p; });
}

double thresholded_area_ha(const raster::BandGrid& prob, double threshold, const raster::RegionOfInterest* roi) {
    return area_sum(prob, roi, [threshold](double p) { return p >= threshold ? 1.0 : 0.0; });
}

std::string risk_report_json(const TransitionRiskReport& report) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["units"] = "ha";
    j["rois"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rois) {
        nlohmann::ordered_json rj;
        rj["id"] = r.id;
        rj["forest"] = stratum_json(r.forest);
        rj["non_forest"] = stratum_json(r.non_forest);
        rj["excluded_ha"] = r.excluded_ha;
        j["rois"].push_back(rj);
    }
    return j.dump(2) + "\n";
}

std::string risk_report_csv(const TransitionRiskReport& report) {
    std::string out = "# schema_version: 1\nrow";
    for (const auto& r : report.rois) out += "," + csv_field(r.id);
    out += "\n";
    auto line = [&](const char* name, auto value) {
        out += name;
        for (const auto& r : report.rois) out += "," + value(r);
        out += "\n";
    };
    line("Forest", [](const RoiRisk& r) { return format_double(r.forest.area_ha); });
    line("To-palm risk (forest)", [](const RoiRisk& r) { return opt_text(r.forest.to_palm_ha); });
    line("From-palm risk (forest)", [](const RoiRisk& r) { return opt_text(r.forest.from_palm_ha); });
    line("Non-forest", [](const RoiRisk& r) { return format_double(r.non_forest.area_ha); });
    line("To-palm risk (non-forest)", [](const RoiRisk& r) { return opt_text(r.non_forest.to_palm_ha); });
    line("From-palm risk (non-forest)", [](const RoiRisk& r) { return opt_text(r.non_forest.from_palm_ha); });
    line("Excluded", [](const RoiRisk& r) { return format_double(r.excluded_ha); });
    return out;
}

} // namespace palmgrid::riskengine
