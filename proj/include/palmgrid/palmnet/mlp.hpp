#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace palmgrid::palmnet {

inline constexpr std::size_t kInputSize = 24;
inline constexpr std::size_t kHiddenLayers = 4;
inline constexpr double kProbabilityClamp = 1e-7;

/// Feed-forward network: rectifier hidden layers, one logistic output.
/// Parameters are stored flat, layer by layer, each layer as a row-major
/// [outputs x inputs] weight block followed by its bias vector.
class MlpParams {
public:
    MlpParams() = default;
    /// Zero-initialized network with the given hidden widths.
    explicit MlpParams(std::span<const std::size_t> hidden);

    const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
    std::size_t layer_count() const noexcept { return sizes_.empty() ? 0 : sizes_.size() - 1; }

    std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
    std::size_t bias_offset(std::size_t layer) const {
        return offsets_[layer] + sizes_[layer] * sizes_[layer + 1];
    }

    double weight(std::size_t layer, std::size_t out, std::size_t in) const {
        return values_[weight_offset(layer) + out * sizes_[layer] + in];
    }
    double& weight(std::size_t layer, std::size_t out, std::size_t in) {
        return values_[weight_offset(layer) + out * sizes_[layer] + in];
    }
    double bias(std::size_t layer, std::size_t out) const { return values_[bias_offset(layer) + out]; }
    double& bias(std::size_t layer, std::size_t out) { return values_[bias_offset(layer) + out]; }

    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Throws ErrorKind::shape for a wrong architecture, ErrorKind::argument for
    /// non-finite parameters.
    void validate() const;

    /// Round every parameter to the nearest float, matching the model file.
    void round_to_float();

    bool operator==(const MlpParams&) const = default;

private:
    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> offsets_;
    std::vector<double> values_;
};

/// He-uniform weights, zero biases, reproducible from `seed`.
MlpParams init_params(std::span<const std::size_t> hidden, std::uint64_t seed);

/// Probability in [1e-7, 1 - 1e-7]. Throws ErrorKind::shape when x has the
/// wrong length.
double forward(const MlpParams& params, std::span<const double> x);

/// Training rows: features is row-major [size x 24].
struct LabeledBatch {
    std::vector<double> features;
    std::vector<double> labels;
    std::vector<double> weights;

    std::size_t size() const noexcept { return labels.size(); }
    std::span<const double> row(std::size_t i) const { return {features.data() + i * kInputSize, kInputSize}; }
    void push_back(std::span<const double> x, double label, double weight = 1.0);
    /// Throws ErrorKind::shape / argument on inconsistent sizes or labels.
    void validate() const;
};

/// Weighted mean binary cross-entropy with p clamped to [1e-7, 1 - 1e-7].
/// Fractional labels are allowed. Throws ErrorKind::argument when empty.
double loss(const MlpParams& params, const LabeledBatch& batch);

/// Same loss plus its gradient (shaped like params) via backpropagation.
/// The gradient uses the unclamped logistic derivative, (p - y) at the logit.
double loss_and_gradient(const MlpParams& params, const LabeledBatch& batch, std::span<const std::size_t> rows,
                         std::vector<double>& gradient);

struct GradientCheckResult {
    double max_relative_error = 0.0;
    std::size_t checked = 0;
    std::size_t skipped_at_kinks = 0;
};

/// Compares backprop against central differences (step 1e-4) on up to
/// `max_checks` randomly chosen parameters. The relative error is
/// |a - n| / max(|a|, |n|, 1e-6). Parameters whose perturbation flips any
/// rectifier on/off are skipped, since the loss is not differentiable there.
GradientCheckResult gradient_check(const MlpParams& params, const LabeledBatch& batch, std::uint64_t seed = 0,
                                   std::size_t max_checks = 64);

} // namespace palmgrid::palmnet
