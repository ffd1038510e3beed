#include "palmgrid/palmnet/trainer.hpp"

#include "palmgrid/error.hpp"
#include "palmgrid/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace palmgrid::palmnet {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;

double subset_loss(const MlpParams& params, const LabeledBatch& data, const std::vector<std::size_t>& rows) {
    LabeledBatch sub;
    for (std::size_t r : rows) sub.push_back(data.row(r), data.labels[r], data.weights[r]);
    return loss(params, sub);
}

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

} // namespace

std::vector<std::string> TrainConfig::problems() const {
    std::vector<std::string> out;
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) out.emplace_back("learning_rate must be positive");
    if (batch_size == 0) out.emplace_back("batch_size must be positive");
    if (epochs == 0) out.emplace_back("epochs must be positive");
    if (hidden.size() != kHiddenLayers) out.emplace_back("hidden must list exactly 4 layer widths");
    for (std::size_t h : hidden) {
        if (h == 0) out.emplace_back("hidden layer widths must be positive");
    }
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
        out.emplace_back("validation_fraction must lie in [0, 1)");
    }
    return out;
}

TrainResult train(const LabeledBatch& data, const TrainConfig& config, const MlpParams* initial) {
    if (auto problems = config.problems(); !problems.empty()) {
        std::string msg = "invalid training config:";
        for (const auto& p : problems) msg += " " + p + ";";
        fail(ErrorKind::argument, msg);
    }
    data.validate();
    if (std::set<double>(data.labels.begin(), data.labels.end()).size() < 2) {
        fail(ErrorKind::precondition, "training needs at least two distinct labels");
    }

    Rng rng(splitmix64(config.seed));
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);
    const auto holdout_n = static_cast<std::size_t>(std::floor(config.validation_fraction * static_cast<double>(data.size())));
    std::vector<std::size_t> holdout(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(holdout_n));
    std::vector<std::size_t> train_rows(order.begin() + static_cast<std::ptrdiff_t>(holdout_n), order.end());
    if (train_rows.empty() || config.batch_size > train_rows.size()) {
        fail(ErrorKind::argument, "batch_size " + std::to_string(config.batch_size) + " exceeds the " +
                                      std::to_string(train_rows.size()) + "-row training slice");
    }

    TrainResult result;
    result.train_rows = train_rows.size();
    result.holdout_rows = holdout.size();
    MlpParams params = initial ? *initial : init_params(config.hidden, config.seed);
    params.validate();
    if (!std::equal(config.hidden.begin(), config.hidden.end(), params.layer_sizes().begin() + 1)) {
        fail(ErrorKind::shape, "initial parameters do not match the configured hidden widths");
    }
    MlpParams best = params;
    double best_holdout = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;

    std::vector<double> m(params.values().size(), 0.0), v(params.values().size(), 0.0), grad;
    std::size_t step = 0;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        shuffle(train_rows, rng);
        for (std::size_t start = 0; start < train_rows.size(); start += config.batch_size) {
            const std::size_t end = std::min(train_rows.size(), start + config.batch_size);
            const std::span<const std::size_t> rows(train_rows.data() + start, end - start);
            const double batch_loss = loss_and_gradient(params, data, rows, grad);
            if (!std::isfinite(batch_loss)) {
                fail(ErrorKind::divergence, "loss became non-finite in epoch " + std::to_string(epoch));
            }
            ++step;
            auto& p = params.values();
            if (config.optimizer == Optimizer::sgd) {
                for (std::size_t i = 0; i < p.size(); ++i) p[i] -= config.learning_rate * grad[i];
            } else {
                const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
                const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
                for (std::size_t i = 0; i < p.size(); ++i) {
                    m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * grad[i];
                    v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
                    p[i] -= config.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + kAdamEpsilon);
                }
            }
        }

        EpochLog entry;
        entry.epoch = epoch;
        entry.train_loss = subset_loss(params, data, train_rows);
        if (!holdout.empty()) entry.holdout_loss = subset_loss(params, data, holdout);
        const bool finite_params = std::all_of(params.values().begin(), params.values().end(),
                                               [](double x) { return std::isfinite(x); });
        if (!std::isfinite(entry.train_loss) || !finite_params ||
            (entry.holdout_loss && !std::isfinite(*entry.holdout_loss))) {
            fail(ErrorKind::divergence, "loss became non-finite in epoch " + std::to_string(epoch));
        }
        result.log.push_back(entry);

        if (!entry.holdout_loss) {
            best = params;
            result.best_epoch = epoch;
            continue;
        }
        if (*entry.holdout_loss < best_holdout) {
            best_holdout = *entry.holdout_loss;
            best = params;
            result.best_epoch = epoch;
            since_best = 0;
        } else if (config.patience > 0 && ++since_best >= config.patience) {
            break;
        }
    }

    best.round_to_float();
    result.params = std::move(best);
    return result;
}

std::string training_log_json(const TrainResult& result) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["train_rows"] = result.train_rows;
    j["holdout_rows"] = result.holdout_rows;
    j["best_epoch"] = result.best_epoch;
    j["epochs"] = nlohmann::ordered_json::array();
    for (const auto& e : result.log) {
        nlohmann::ordered_json ej;
        ej["epoch"] = e.epoch;
        ej["train_loss"] = e.train_loss;
        ej["holdout_loss"] = e.holdout_loss ? nlohmann::ordered_json(*e.holdout_loss) : nullptr;
        j["epochs"].push_back(ej);
    }
    return j.dump(2) + "\n";
}

} // namespace palmgrid::palmnet
