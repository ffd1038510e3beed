#include "palmgrid/palmnet/model_file.hpp"

#include "palmgrid/error.hpp"
#include "palmgrid/raster/grid_io.hpp"

#include <json.hpp>
#include <sodium.h>

#include <bit>
#include <cstdint>

namespace palmgrid::palmnet {

namespace {

constexpr int kBase64Variant = sodium_base64_VARIANT_ORIGINAL;

std::string encode_floats(const double* values, std::size_t n) {
    std::string bytes(n * 4, '\0');
    for (std::size_t i = 0; i < n; ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(values[i]));
        for (int b = 0; b < 4; ++b) bytes[i * 4 + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xffu);
    }
    std::string out(sodium_base64_encoded_len(bytes.size(), kBase64Variant), '\0');
    sodium_bin2base64(out.data(), out.size(), reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(),
                      kBase64Variant);
    out.resize(out.size() - 1); // trailing NUL
    return out;
}

void decode_floats(const std::string& b64, double* out, std::size_t n, const std::string& what) {
    std::string bytes(n * 4 + 4, '\0');
    std::size_t len = 0;
    if (sodium_base642bin(reinterpret_cast<unsigned char*>(bytes.data()), bytes.size(), b64.data(), b64.size(),
                          nullptr, &len, nullptr, kBase64Variant) != 0 ||
        len != n * 4) {
        fail(ErrorKind::format, "model blob '" + what + "' is not " + std::to_string(n) + " base64 float32 values");
    }
    const auto* src = reinterpret_cast<const unsigned char*>(bytes.data());
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(src[i * 4 + static_cast<std::size_t>(b)]) << (8 * b);
        out[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
}

} // namespace

std::string encode_model(const MlpParams& params) {
    params.validate();
    nlohmann::ordered_json j;
    j["format"] = kModelFormat;
    j["layer_sizes"] = params.layer_sizes();
    j["hidden_activation"] = "relu";
    j["output_activation"] = "sigmoid";
    j["layers"] = nlohmann::ordered_json::array();
    const auto& sizes = params.layer_sizes();
    for (std::size_t l = 0; l < params.layer_count(); ++l) {
        j["layers"].push_back(
            {{"weights", encode_floats(params.values().data() + params.weight_offset(l), sizes[l] * sizes[l + 1])},
             {"biases", encode_floats(params.values().data() + params.bias_offset(l), sizes[l + 1])}});
    }
    return j.dump(2) + "\n";
}

MlpParams decode_model(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, std::string("model file is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || j.value("format", std::string{}) != kModelFormat) {
        fail(ErrorKind::format, "model file must declare \"format\": \"palmnet-1\"");
    }
    if (j.value("hidden_activation", std::string{}) != "relu" || j.value("output_activation", std::string{}) != "sigmoid") {
        fail(ErrorKind::format, "unsupported activation tags in model file");
    }
    std::vector<std::size_t> sizes;
    try {
        sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    } catch (const nlohmann::json::exception&) {
        fail(ErrorKind::format, "model file has no valid layer_sizes");
    }
    if (sizes.size() < 2 || sizes.front() != kInputSize || sizes.back() != 1) {
        fail(ErrorKind::shape, "model layer_sizes must run from 24 inputs to 1 output");
    }
    std::vector<std::size_t> hidden(sizes.begin() + 1, sizes.end() - 1);
    MlpParams params(hidden);
    const auto& layers = j.value("layers", nlohmann::json::array());
    if (!layers.is_array() || layers.size() != params.layer_count()) {
        fail(ErrorKind::format, "model file layer count does not match layer_sizes");
    }
    for (std::size_t l = 0; l < params.layer_count(); ++l) {
        const auto& lj = layers[l];
        if (!lj.is_object() || !lj.contains("weights") || !lj.contains("biases") || !lj["weights"].is_string() ||
            !lj["biases"].is_string()) {
            fail(ErrorKind::format, "model layer " + std::to_string(l) + " needs weights and biases blobs");
        }
        decode_floats(lj["weights"].get<std::string>(), params.values().data() + params.weight_offset(l),
                      sizes[l] * sizes[l + 1], "layer " + std::to_string(l) + " weights");
        decode_floats(lj["biases"].get<std::string>(), params.values().data() + params.bias_offset(l), sizes[l + 1],
                      "layer " + std::to_string(l) + " biases");
    }
    params.validate();
    return params;
}

void save_model(const MlpParams& params, const std::filesystem::path& path) {
    raster::write_file_atomic(path, encode_model(params));
}

MlpParams load_model(const std::filesystem::path& path) { return decode_model(raster::read_file(path)); }

} // namespace palmgrid::palmnet
