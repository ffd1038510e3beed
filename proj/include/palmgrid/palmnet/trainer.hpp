#pragma once

#include "palmgrid/palmnet/mlp.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace palmgrid::palmnet {

enum class Optimizer { adam, sgd };

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 256;
    std::size_t epochs = 30;
    std::uint64_t seed = 1;
    std::vector<std::size_t> hidden{64, 64, 32, 16};
    double validation_fraction = 0.1; // held out from the training fold
    std::size_t patience = 5;         // epochs without held-out improvement; 0 disables
    Optimizer optimizer = Optimizer::adam;

    /// Every problem found, empty when valid.
    std::vector<std::string> problems() const;
};

struct EpochLog {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    std::optional<double> holdout_loss;
};

struct TrainResult {
    MlpParams params;
    std::vector<EpochLog> log;
    std::size_t best_epoch = 0;
    std::size_t train_rows = 0;
    std::size_t holdout_rows = 0;
};

/// Mini-batch training, deterministic for a given seed. Parameters of the
/// epoch with the lowest held-out loss are returned (the last epoch when
/// nothing is held out), rounded to float precision.
///
/// Throws ErrorKind::precondition when fewer than two distinct labels are
/// present, ErrorKind::argument for an invalid config or a batch larger than
/// the training slice, and ErrorKind::divergence naming the epoch when the
/// loss stops being finite. `initial`, when given, replaces the seeded
/// initialization and must match config.hidden.
TrainResult train(const LabeledBatch& data, const TrainConfig& config, const MlpParams* initial = nullptr);

std::string training_log_json(const TrainResult& result);

} // namespace palmgrid::palmnet
