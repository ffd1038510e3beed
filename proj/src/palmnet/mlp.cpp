#include "palmgrid/palmnet/mlp.hpp"

#include "palmgrid/error.hpp"
#include "palmgrid/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace palmgrid::palmnet {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamp_probability(double p) { return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp); }

double cross_entropy(double p, double y) {
    const double pc = clamp_probability(p);
    return -(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc));
}

// Activations of every layer for one input; acts[0] is the input. Returns
// the output logit.
double run(const MlpParams& params, std::span<const double> x, std::vector<std::vector<double>>& acts,
           std::vector<std::vector<double>>* pre = nullptr) {
    const auto& sizes = params.layer_sizes();
    const std::size_t layers = params.layer_count();
    acts.resize(layers + 1);
    if (pre) pre->resize(layers);
    acts[0].assign(x.begin(), x.end());
    const auto& v = params.values();
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = sizes[l], out = sizes[l + 1];
        const double* w = v.data() + params.weight_offset(l);
        const double* b = v.data() + params.bias_offset(l);
        auto& a = acts[l + 1];
        a.resize(out);
        if (pre) (*pre)[l].resize(out);
        const auto& prev = acts[l];
        for (std::size_t o = 0; o < out; ++o) {
            double z = b[o];
            const double* row = w + o * in;
            for (std::size_t i = 0; i < in; ++i) z += row[i] * prev[i];
            if (pre) (*pre)[l][o] = z;
            a[o] = (l + 1 < layers) ? std::max(0.0, z) : z;
        }
    }
    return acts[layers][0];
}

double total_weight(const LabeledBatch& batch, std::span<const std::size_t> rows) {
    double w = 0.0;
    for (std::size_t r : rows) w += batch.weights[r];
    return w;
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
}

} // namespace

MlpParams::MlpParams(std::span<const std::size_t> hidden) {
    sizes_.push_back(kInputSize);
    sizes_.insert(sizes_.end(), hidden.begin(), hidden.end());
    sizes_.push_back(1);
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        offsets_.push_back(offset);
        offset += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
    }
    values_.assign(offset, 0.0);
}

void MlpParams::validate() const {
    if (sizes_.size() != kHiddenLayers + 2) {
        fail(ErrorKind::shape, "network must have exactly " + std::to_string(kHiddenLayers) + " hidden layers");
    }
    if (sizes_.front() != kInputSize) fail(ErrorKind::shape, "network input must have 24 channels");
    if (sizes_.back() != 1) fail(ErrorKind::shape, "network output must be a single unit");
    for (std::size_t s : sizes_) {
        if (s == 0) fail(ErrorKind::shape, "layer widths must be positive");
    }
    std::size_t expected = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) expected += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
    if (values_.size() != expected) fail(ErrorKind::shape, "parameter count does not match layer sizes");
    for (double v : values_) {
        if (!std::isfinite(v)) fail(ErrorKind::argument, "network parameters must be finite");
    }
}

void MlpParams::round_to_float() {
    for (double& v : values_) v = static_cast<double>(static_cast<float>(v));
}

MlpParams init_params(std::span<const std::size_t> hidden, std::uint64_t seed) {
    MlpParams p(hidden);
    Rng rng(splitmix64(seed ^ 0x696e6974ULL));
    const auto& sizes = p.layer_sizes();
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const double limit = std::sqrt(6.0 / static_cast<double>(sizes[l]));
        for (std::size_t o = 0; o < sizes[l + 1]; ++o) {
            for (std::size_t i = 0; i < sizes[l]; ++i) p.weight(l, o, i) = rng.uniform(-limit, limit);
        }
    }
    return p;
}

double forward(const MlpParams& params, std::span<const double> x) {
    if (x.size() != params.layer_sizes().front()) {
        fail(ErrorKind::shape, "input has " + std::to_string(x.size()) + " channels, network expects " +
                                   std::to_string(params.layer_sizes().front()));
    }
    thread_local std::vector<std::vector<double>> acts;
    return clamp_probability(sigmoid(run(params, x, acts)));
}

void LabeledBatch::push_back(std::span<const double> x, double label, double weight) {
    if (x.size() != kInputSize) fail(ErrorKind::shape, "feature rows must have 24 channels");
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(label);
    weights.push_back(weight);
}

void LabeledBatch::validate() const {
    if (features.size() != labels.size() * kInputSize || weights.size() != labels.size()) {
        fail(ErrorKind::shape, "batch features, labels and weights disagree in length");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!(labels[i] >= 0.0 && labels[i] <= 1.0)) fail(ErrorKind::argument, "labels must lie in [0, 1]");
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) fail(ErrorKind::argument, "weights must be >= 0");
    }
    for (double f : features) {
        if (!std::isfinite(f)) fail(ErrorKind::argument, "features must be finite");
    }
}

double loss(const MlpParams& params, const LabeledBatch& batch) {
    if (batch.size() == 0) fail(ErrorKind::argument, "loss of an empty batch");
    double sum = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        sum += batch.weights[i] * cross_entropy(forward(params, batch.row(i)), batch.labels[i]);
        wsum += batch.weights[i];
    }
    if (!(wsum > 0.0)) fail(ErrorKind::argument, "batch weights sum to zero");
    return sum / wsum;
}

double loss_and_gradient(const MlpParams& params, const LabeledBatch& batch, std::span<const std::size_t> rows,
                         std::vector<double>& gradient) {
    if (rows.empty()) fail(ErrorKind::argument, "gradient of an empty batch");
    const double wsum = total_weight(batch, rows);
    if (!(wsum > 0.0)) fail(ErrorKind::argument, "batch weights sum to zero");

    const auto& sizes = params.layer_sizes();
    const std::size_t layers = params.layer_count();
    const auto& v = params.values();
    gradient.assign(v.size(), 0.0);

    std::vector<std::vector<double>> acts, pre;
    std::vector<double> delta, next_delta;
    double loss_sum = 0.0;
    for (std::size_t r : rows) {
        const double logit = run(params, batch.row(r), acts, &pre);
        const double p = sigmoid(logit);
        const double y = batch.labels[r];
        const double w = batch.weights[r] / wsum;
        loss_sum += batch.weights[r] * cross_entropy(p, y);

        delta.assign(1, w * (p - y));
        for (std::size_t l = layers; l-- > 0;) {
            const std::size_t in = sizes[l], out = sizes[l + 1];
            double* gw = gradient.data() + params.weight_offset(l);
            double* gb = gradient.data() + params.bias_offset(l);
            const auto& prev = acts[l];
            for (std::size_t o = 0; o < out; ++o) {
                const double d = delta[o];
                gb[o] += d;
                if (d == 0.0) continue;
                double* row = gw + o * in;
                for (std::size_t i = 0; i < in; ++i) row[i] += d * prev[i];
            }
            if (l == 0) break;
            const double* w_l = v.data() + params.weight_offset(l);
            next_delta.assign(in, 0.0);
            for (std::size_t o = 0; o < out; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                const double* row = w_l + o * in;
                for (std::size_t i = 0; i < in; ++i) next_delta[i] += row[i] * d;
            }
            for (std::size_t i = 0; i < in; ++i) {
                if (!(pre[l - 1][i] > 0.0)) next_delta[i] = 0.0;
            }
            delta.swap(next_delta);
        }
    }
    return loss_sum / wsum;
}

GradientCheckResult gradient_check(const MlpParams& params, const LabeledBatch& batch, std::uint64_t seed,
                                   std::size_t max_checks) {
    constexpr double kStep = 1e-4;
    constexpr double kFloor = 1e-6;
    const auto rows = all_rows(batch.size());
    std::vector<double> analytic;
    loss_and_gradient(params, batch, rows, analytic);

    // On/off pattern of every rectifier over the batch.
    auto pattern = [&](const MlpParams& p) {
        std::vector<bool> bits;
        std::vector<std::vector<double>> acts, pre;
        for (std::size_t r : rows) {
            run(p, batch.row(r), acts, &pre);
            for (std::size_t l = 0; l + 1 < p.layer_count(); ++l) {
                for (double z : pre[l]) bits.push_back(z > 0.0);
            }
        }
        return bits;
    };
    const auto base_pattern = pattern(params);

    std::vector<std::size_t> indices(params.values().size());
    std::iota(indices.begin(), indices.end(), 0);
    Rng rng(splitmix64(seed ^ 0x67726164ULL));
    const std::size_t n = std::min(max_checks, indices.size());
    for (std::size_t k = 0; k < n; ++k) std::swap(indices[k], indices[k + rng.below(indices.size() - k)]);

    GradientCheckResult result;
    MlpParams probe = params;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t idx = indices[k];
        const double original = probe.values()[idx];
        probe.values()[idx] = original + kStep;
        const bool plus_same = pattern(probe) == base_pattern;
        const double plus = loss(probe, batch);
        probe.values()[idx] = original - kStep;
        const bool minus_same = pattern(probe) == base_pattern;
        const double minus = loss(probe, batch);
        probe.values()[idx] = original;
        if (!plus_same || !minus_same) {
            ++result.skipped_at_kinks;
            continue;
        }
        const double numeric = (plus - minus) / (2.0 * kStep);
        const double a = analytic[idx];
        const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), kFloor});
        result.max_relative_error = std::max(result.max_relative_error, err);
        ++result.checked;
    }
    return result;
}

} // namespace palmgrid::palmnet
