#include "palmgrid/metrics/metrics.hpp"

#include "palmgrid/error.hpp"
#include "palmgrid/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace palmgrid::metrics {

namespace {

constexpr double kScoreClamp = 1e-7;

void check_samples(std::span<const ScoredSample> samples) {
    if (samples.empty()) fail(ErrorKind::argument, "no samples to evaluate");
    double total = 0.0;
    for (const auto& s : samples) {
        if (!(s.score >= 0.0 && s.score <= 1.0)) fail(ErrorKind::argument, "scores must lie in [0, 1]");
        if (!(s.label >= 0.0 && s.label <= 1.0)) fail(ErrorKind::argument, "labels must lie in [0, 1]");
        if (!(s.weight >= 0.0) || !std::isfinite(s.weight)) fail(ErrorKind::argument, "weights must be finite and >= 0");
        total += s.weight;
    }
    if (!(total > 0.0)) fail(ErrorKind::argument, "sample weights sum to zero");
}

std::optional<double> ratio(double num, double den) {
    if (!(den > 0.0)) return std::nullopt;
    return num / den;
}

std::vector<std::size_t> order_by_score(std::span<const ScoredSample> samples) {
    std::vector<std::size_t> idx(samples.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return samples[a].score < samples[b].score; });
    return idx;
}

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : "undefined"; }

} // namespace

MetricReport evaluate(std::span<const ScoredSample> samples, double threshold) {
    check_samples(samples);
    MetricReport r;
    r.threshold = threshold;
    r.samples = samples.size();
    double w_total = 0.0, w_tp = 0.0, w_fp = 0.0, w_tn = 0.0, w_fn = 0.0, ce = 0.0;
    for (const auto& s : samples) {
        const double p = std::clamp(s.score, kScoreClamp, 1.0 - kScoreClamp);
        ce += s.weight * -(s.label * std::log(p) + (1.0 - s.label) * std::log(1.0 - p));
        w_total += s.weight;
        const bool predicted = s.score >= threshold;
        if (predicted && s.positive()) {
            ++r.counts.tp;
            w_tp += s.weight;
        } else if (predicted) {
            ++r.counts.fp;
            w_fp += s.weight;
        } else if (s.positive()) {
            ++r.counts.fn;
            w_fn += s.weight;
        } else {
            ++r.counts.tn;
            w_tn += s.weight;
        }
    }
    r.cross_entropy = ce / w_total;
    r.binary_accuracy = (w_tp + w_tn) / w_total;
    r.recall = ratio(w_tp, w_tp + w_fn);
    r.precision = ratio(w_tp, w_tp + w_fp);
    r.f1 = ratio(2.0 * w_tp, 2.0 * w_tp + w_fp + w_fn);
    r.auc = auc(samples);
    return r;
}

std::optional<double> auc(std::span<const ScoredSample> samples) {
    check_samples(samples);
    const auto idx = order_by_score(samples);
    double w_pos = 0.0, w_neg = 0.0, neg_below = 0.0, num = 0.0;
    for (std::size_t g = 0; g < idx.size();) {
        std::size_t end = g;
        double gp = 0.0, gn = 0.0;
        while (end < idx.size() && samples[idx[end]].score == samples[idx[g]].score) {
            const auto& s = samples[idx[end]];
            (s.positive() ? gp : gn) += s.weight;
            ++end;
        }
        num += gp * (neg_below + 0.5 * gn);
        neg_below += gn;
        w_pos += gp;
        w_neg += gn;
        g = end;
    }
    if (!(w_pos > 0.0) || !(w_neg > 0.0)) return std::nullopt;
    return num / (w_pos * w_neg);
}

SweepResult curve_sweep(std::span<const ScoredSample> samples, std::size_t n_thresholds) {
    if (n_thresholds < 1) fail(ErrorKind::argument, "curve sweep needs at least one threshold step");
    check_samples(samples);
    auto idx = order_by_score(samples);
    std::reverse(idx.begin(), idx.end()); // descending score

    double w_pos = 0.0, w_neg = 0.0;
    for (const auto& s : samples) (s.positive() ? w_pos : w_neg) += s.weight;
    const double w_total = w_pos + w_neg;

    SweepResult out;
    std::size_t taken = 0;
    double tp = 0.0, fp = 0.0;
    std::optional<double> best_f1;
    // Thresholds descend so the predicted set only grows.
    out.rows.resize(n_thresholds + 1);
    for (std::size_t k = n_thresholds + 1; k-- > 0;) {
        const double t = static_cast<double>(k) / static_cast<double>(n_thresholds);
        while (taken < idx.size() && samples[idx[taken]].score >= t) {
            const auto& s = samples[idx[taken]];
            (s.positive() ? tp : fp) += s.weight;
            ++taken;
        }
        const double fn = w_pos - tp;
        const double tn = w_neg - fp;
        SweepRow row;
        row.threshold = t;
        row.predicted_positive = taken;
        row.accuracy = (tp + tn) / w_total;
        row.precision = ratio(tp, tp + fp);
        row.recall = ratio(tp, tp + fn);
        row.f1 = ratio(2.0 * tp, 2.0 * tp + fp + fn);
        out.rows[k] = row;
    }
    for (const auto& row : out.rows) {
        if (row.f1 && (!best_f1 || *row.f1 > *best_f1)) {
            best_f1 = row.f1;
            out.best_f1_threshold = row.threshold;
        }
    }
    return out;
}

double otsu_threshold(std::span<const double> values, std::span<const double> weights, std::size_t bins) {
    if (bins < 2) fail(ErrorKind::argument, "otsu needs at least two bins");
    if (!weights.empty() && weights.size() != values.size()) {
        fail(ErrorKind::argument, "otsu weights must match the values");
    }
    std::vector<double> hist(bins, 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!(v >= 0.0 && v <= 1.0)) fail(ErrorKind::argument, "otsu values must lie in [0, 1]");
        const double w = weights.empty() ? 1.0 : weights[i];
        if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorKind::argument, "otsu weights must be finite and >= 0");
        const auto b = std::min(bins - 1, static_cast<std::size_t>(v * static_cast<double>(bins)));
        hist[b] += w;
    }
    if (std::count_if(hist.begin(), hist.end(), [](double h) { return h > 0.0; }) < 2) {
        fail(ErrorKind::degenerate_input, "otsu needs at least two distinct occupied histogram bins");
    }
    const double n_bins = static_cast<double>(bins);
    double total = 0.0, total_moment = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        total += hist[b];
        total_moment += hist[b] * (static_cast<double>(b) + 0.5) / n_bins;
    }
    double w0 = 0.0, m0 = 0.0, best = -1.0;
    std::size_t best_k = 1;
    for (std::size_t k = 1; k < bins; ++k) {
        w0 += hist[k - 1];
        m0 += hist[k - 1] * (static_cast<double>(k - 1) + 0.5) / n_bins;
        const double w1 = total - w0;
        if (!(w0 > 0.0) || !(w1 > 0.0)) continue;
        const double mu0 = m0 / w0;
        const double mu1 = (total_moment - m0) / w1;
        const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {
            best = between;
            best_k = k;
        }
    }
    return static_cast<double>(best_k) / n_bins;
}

double otsu_threshold(const raster::BandGrid& probabilities, std::size_t bins) {
    probabilities.validate();
    std::vector<double> values;
    values.reserve(probabilities.values.size());
    for (float v : probabilities.values) {
        if (!probabilities.is_nodata(v)) values.push_back(v);
    }
    return otsu_threshold(values, {}, bins);
}

std::string report_json(const MetricReport& r) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["threshold"] = r.threshold;
    j["samples"] = r.samples;
    j["cross_entropy"] = r.cross_entropy;
    j["binary_accuracy"] = r.binary_accuracy;
    j["auc"] = opt_json(r.auc);
    j["recall"] = opt_json(r.recall);
    j["precision"] = opt_json(r.precision);
    j["f1"] = opt_json(r.f1);
    j["counts"] = {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn}};
    return j.dump(2) + "\n";
}

std::string report_csv(const MetricReport& r) {
    std::string out = "# schema_version: 1\n";
    out += "threshold,samples,cross_entropy,binary_accuracy,auc,recall,precision,f1,tp,fp,tn,fn\n";
    out += format_double(r.threshold) + "," + std::to_string(r.samples) + "," + format_double(r.cross_entropy) + "," +
           format_double(r.binary_accuracy) + "," + opt_text(r.auc) + "," + opt_text(r.recall) + "," +
           opt_text(r.precision) + "," + opt_text(r.f1) + "," + std::to_string(r.counts.tp) + "," +
           std::to_string(r.counts.fp) + "," + std::to_string(r.counts.tn) + "," + std::to_string(r.counts.fn) + "\n";
    return out;
}

std::string sweep_json(const SweepResult& sweep) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["best_f1_threshold"] = opt_json(sweep.best_f1_threshold);
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : sweep.rows) {
        j["rows"].push_back({{"threshold", row.threshold},
                             {"accuracy", row.accuracy},
                             {"precision", opt_json(row.precision)},
                             {"recall", opt_json(row.recall)},
                             {"f1", opt_json(row.f1)},
                             {"predicted_positive", row.predicted_positive}});
    }
    return j.dump(2) + "\n";
}

std::string sweep_csv(const SweepResult& sweep) {
    std::string out = "# schema_version: 1\nthreshold,accuracy,precision,recall,f1,predicted_positive\n";
    for (const auto& row : sweep.rows) {
        out += format_double(row.threshold) + "," + format_double(row.accuracy) + "," + opt_text(row.precision) + "," +
               opt_text(row.recall) + "," + opt_text(row.f1) + "," + std::to_string(row.predicted_positive) + "\n";
    }
    return out;
}

} // namespace palmgrid::metrics
