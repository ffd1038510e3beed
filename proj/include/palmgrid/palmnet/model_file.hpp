#pragma once

#include "palmgrid/palmnet/mlp.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace palmgrid::palmnet {

inline constexpr std::string_view kModelFormat = "palmnet-1";

/// JSON model: {"format":"palmnet-1","layer_sizes":[...],"hidden_activation":"relu",
/// "output_activation":"sigmoid","layers":[{"weights":b64,"biases":b64},...]}
/// with little-endian float32 blobs. Parameters are rounded to float on save.
std::string encode_model(const MlpParams& params);
MlpParams decode_model(std::string_view json_text);

void save_model(const MlpParams& params, const std::filesystem::path& path);
MlpParams load_model(const std::filesystem::path& path);

} // namespace palmgrid::palmnet
