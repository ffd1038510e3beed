#include "unit/test_support.hpp"

#include "palmgrid/cli/cli.hpp"
#include "palmgrid/compositor/annual_stack.hpp"
#include "palmgrid/dataset/sample.hpp"
#include "palmgrid/palmnet/model_file.hpp"
#include "palmgrid/raster/grid_io.hpp"
#include "palmgrid/raster/projection.hpp"
#include "palmgrid/raster/roi.hpp"
#include "palmgrid/rng.hpp"

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

using namespace palmgrid;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "palmgrid");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) { return raster::read_file(p); }

raster::BandGrid prob_grid(std::uint64_t seed, std::size_t n = 24) {
    Rng rng(seed);
    auto g = raster::BandGrid::filled(testing::meters_header(n, n), 0.0f);
    for (auto& v : g.values) v = static_cast<float>(rng.uniform());
    return g;
}

// Probability grids, forest mask and regions for the risk subcommand.
void write_risk_inputs(const testing::TempDir& dir) {
    raster::write_grid(prob_grid(1), dir / "f2020.fgrd");
    raster::write_grid(prob_grid(2), dir / "f2023.fgrd");
    auto forest = raster::MaskGrid::filled(testing::meters_header(24, 24), 0);
    for (std::size_t i = 0; i < forest.values.size(); i += 3) forest.values[i] = 1;
    raster::write_mask(forest, dir / "forest.fgrd");
    const std::vector<raster::RegionOfInterest> rois{{"a", {{0, 0}, {120, 0}, {120, 240}, {0, 240}}},
                                                     {"b", {{120, 0}, {240, 0}, {240, 240}, {120, 240}}}};
    raster::write_file_atomic(dir / "rois.json", raster::format_rois(rois));
}

// A random 24-channel stack for 2020, a model and points on the stack.
void write_model_inputs(const testing::TempDir& dir) {
    Rng rng(5);
    std::vector<raster::BandGrid> channels;
    for (std::size_t c = 0; c < palmnet::kInputSize; ++c) {
        auto g = raster::BandGrid::filled(testing::meters_header(16, 16), 0.0f);
        for (auto& v : g.values) v = static_cast<float>(rng.uniform());
        channels.push_back(std::move(g));
    }
    const auto stack = compositor::assemble_annual_stack(2020, std::move(channels));
    compositor::write_stack(stack, dir / "stack2020");
    auto params = palmnet::init_params(std::vector<std::size_t>{8, 8, 8, 8}, 3);
    params.round_to_float();
    palmnet::save_model(params, dir / "model.json");
    std::vector<dataset::SamplePoint> samples;
    const auto& h = stack.header();
    for (std::size_t k = 0; k < 60; ++k) {
        const std::size_t r = rng.below(16), c = rng.below(16);
        const auto ll = raster::from_grid_coords(h, {h.center_x(c), h.center_y(r)});
        samples.push_back({ll.lon, ll.lat, static_cast<double>(k % 2), 2020, "t", 1.0});
    }
    dataset::write_samples(samples, dir / "test.csv");
}

} // namespace

TEST_CASE("cli: help exits cleanly") {
    const auto r = run_cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("risk") != std::string::npos);
    const auto sub = run_cli({"train", "--help"});
    CHECK(sub.code == 0);
    CHECK(sub.out.find("--learning-rate FLOAT [0.001]") != std::string::npos);
    CHECK(sub.out.find("[64,64,32,16]") != std::string::npos);
}

TEST_CASE("cli: unknown subcommand is a usage error") {
    const auto r = run_cli({"frobnicate"});
    CHECK(r.code == 2);
    CHECK(r.err.rfind("palmgrid: error: usage: unknown subcommand 'frobnicate'\n", 0) == 0);
    CHECK(r.err.find("Usage:") != std::string::npos);
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"risk", "--no-such-flag"}).code == 2);
}

TEST_CASE("cli: config problems are enumerated in one line") {
    const auto r = run_cli({"risk", "--prev", "missing.fgrd", "--window", "4"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("palmgrid: error: config: 6 problem(s):", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
    for (const char* item : {"--prev: no such file", "missing --curr", "missing --rois", "missing --forest",
                             "missing --out", "--window must be odd"}) {
        CHECK(r.err.find(item) != std::string::npos);
    }
}

TEST_CASE("cli: risk writes a table-shaped report") {
    testing::TempDir dir;
    write_risk_inputs(dir);
    const auto r = run_cli({"risk", "--prev", (dir / "f2020.fgrd").string(), "--curr", (dir / "f2023.fgrd").string(),
                            "--rois", (dir / "rois.json").string(), "--forest", (dir / "forest.fgrd").string(),
                            "--out", (dir / "report.json").string(), "--csv", (dir / "report.csv").string(),
                            "--window", "5", "--stable-out", (dir / "stable.fgrd").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(j["schema_version"] == 1);
    CHECK(j["rois"].size() == 2);
    CHECK(j["rois"][0]["id"] == "a");
    const double area = j["rois"][0]["forest"]["area_ha"].get<double>() + j["rois"][0]["non_forest"]["area_ha"].get<double>();
    CHECK(area == doctest::Approx(0.01 * 12 * 24));
    const auto csv = slurp(dir / "report.csv");
    CHECK(csv.find("row,a,b\nForest,") != std::string::npos);
    CHECK(csv.find("\nTo-palm risk (non-forest),") != std::string::npos);
    CHECK(raster::read_grid(dir / "stable.fgrd").header.band_name == "stable_palm");
    for (const auto& entry : fs::directory_iterator(dir.path())) {
        CHECK(entry.path().filename().string().find(".tmp") == std::string::npos);
    }
}

TEST_CASE("cli: thread count leaves outputs byte-identical") {
    testing::TempDir dir;
    write_risk_inputs(dir);
    std::vector<std::string> common{"risk", "--prev", (dir / "f2020.fgrd").string(), "--curr",
                                    (dir / "f2023.fgrd").string(), "--rois", (dir / "rois.json").string(),
                                    "--forest", (dir / "forest.fgrd").string(), "--window", "7"};
    auto one = common;
    one.insert(one.begin(), {"--threads", "1"});
    one.insert(one.end(), {"--out", (dir / "r1.json").string(), "--rho-out", (dir / "rho1.fgrd").string()});
    auto many = common;
    many.insert(many.begin(), {"--threads", "8"});
    many.insert(many.end(), {"--out", (dir / "r8.json").string(), "--rho-out", (dir / "rho8.fgrd").string()});
    REQUIRE(run_cli(one).code == 0);
    REQUIRE(run_cli(many).code == 0);
    CHECK(slurp(dir / "r1.json") == slurp(dir / "r8.json"));
    CHECK(slurp(dir / "rho1.fgrd") == slurp(dir / "rho8.fgrd"));
}

TEST_CASE("cli: config file values and flag overrides") {
    testing::TempDir dir;
    write_risk_inputs(dir);
    raster::write_file_atomic(dir / "run.toml", "threads = 2\n[risk]\nwindow = 4\nmin-pairs = 3\n");
    std::vector<std::string> args{"--config", (dir / "run.toml").string(), "risk", "--prev",
                                  (dir / "f2020.fgrd").string(), "--curr", (dir / "f2023.fgrd").string(),
                                  "--rois", (dir / "rois.json").string(), "--forest", (dir / "forest.fgrd").string(),
                                  "--out", (dir / "r.json").string()};
    const auto from_file = run_cli(args);
    CHECK(from_file.code == 1);
    CHECK(from_file.err.find("--window must be odd") != std::string::npos);
    args.insert(args.end(), {"--window", "3"});
    const auto overridden = run_cli(args);
    CHECK_MESSAGE(overridden.code == 0, overridden.err);
    const auto missing = run_cli({"--config", (dir / "nope.toml").string(), "otsu"});
    CHECK(missing.code == 1);
    CHECK(missing.err.rfind("palmgrid: error: config:", 0) == 0);
}

TEST_CASE("cli: runtime failures carry their category") {
    testing::TempDir dir;
    raster::write_file_atomic(dir / "bad.fgrd", "not a grid");
    const auto r = run_cli({"otsu", "--prob", (dir / "bad.fgrd").string()});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("palmgrid: error: format: ", 0) == 0);
    raster::write_grid(raster::BandGrid::filled(testing::meters_header(4, 4), 0.3f), dir / "flat.fgrd");
    const auto flat = run_cli({"otsu", "--prob", (dir / "flat.fgrd").string()});
    CHECK(flat.code == 1);
    CHECK(flat.err.rfind("palmgrid: error: degenerate_input: ", 0) == 0);
}

TEST_CASE("cli: otsu and area") {
    testing::TempDir dir;
    auto g = raster::BandGrid::filled(testing::meters_header(10, 10), 0.2f);
    for (std::size_t i = 0; i < 30; ++i) g.values[i] = 0.9f;
    raster::write_grid(g, dir / "p.fgrd");
    const auto o = run_cli({"otsu", "--prob", (dir / "p.fgrd").string(), "--out", (dir / "o.json").string()});
    REQUIRE(o.code == 0);
    const double t = nlohmann::json::parse(slurp(dir / "o.json"))["threshold"];
    CHECK(t > 0.2);
    CHECK(t <= 0.9);
    const auto a = run_cli({"area", "--prob", (dir / "p.fgrd").string(), "--otsu", "--out", (dir / "a.json").string()});
    REQUIRE(a.code == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "a.json"));
    CHECK(j["threshold"] == t);
    CHECK(j["regions"][0]["thresholded_ha"].get<double>() == doctest::Approx(0.3));
    CHECK(j["regions"][0]["expected_ha"].get<double>() == doctest::Approx(0.01 * (30 * 0.9 + 70 * 0.2)).epsilon(1e-6));
}

TEST_CASE("cli: evaluate prints a metrics table") {
    testing::TempDir dir;
    write_model_inputs(dir);
    const auto r = run_cli({"evaluate", "--model", (dir / "model.json").string(), "--samples",
                            (dir / "test.csv").string(), "--stack", (dir / "stack2020" / "stack.json").string(),
                            "--threshold", "0.5", "--out", (dir / "m.json").string(), "--csv", (dir / "m.csv").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(r.out.find("cross_entropy  accuracy@0.5  auc  recall@0.5  precision@0.5") != std::string::npos);
    const auto j = nlohmann::json::parse(slurp(dir / "m.json"));
    CHECK(j["schema_version"] == 1);
    CHECK(j["samples"] == 60);
    CHECK(slurp(dir / "m.csv").rfind("# schema_version: 1\nthreshold,", 0) == 0);
}

TEST_CASE("cli: predict and sweep") {
    testing::TempDir dir;
    write_model_inputs(dir);
    const auto p = run_cli({"predict", "--model", (dir / "model.json").string(), "--stack",
                            (dir / "stack2020" / "stack.json").string(), "--out", (dir / "prob.fgrd").string()});
    REQUIRE_MESSAGE(p.code == 0, p.err);
    const auto prob = raster::read_grid(dir / "prob.fgrd");
    CHECK(prob.header.band_name == "palm_probability");
    CHECK(prob.values.size() == 256);
    const auto s = run_cli({"sweep", "--model", (dir / "model.json").string(), "--samples", (dir / "test.csv").string(),
                            "--stack", (dir / "stack2020" / "stack.json").string(), "--n-thresholds", "10", "--csv",
                            (dir / "s.csv").string()});
    REQUIRE_MESSAGE(s.code == 0, s.err);
    const auto csv = slurp(dir / "s.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
}

TEST_CASE("cli: train and split-folds") {
    testing::TempDir dir;
    write_model_inputs(dir);
    const auto split = run_cli({"split-folds", "--samples", (dir / "test.csv").string(), "--out-dir",
                                (dir / "folds").string(), "--hex-area-km2", "0.001"});
    REQUIRE_MESSAGE(split.code == 0, split.err);
    const auto report = nlohmann::json::parse(slurp(dir / "folds" / "folds.json"));
    std::size_t total = 0;
    for (const auto& f : report["folds"]) total += f["points"].get<std::size_t>();
    CHECK(total == 60);
    const auto train = run_cli({"train", "--samples", (dir / "test.csv").string(), "--stack",
                                (dir / "stack2020" / "stack.json").string(), "--model-out",
                                (dir / "m2.json").string(), "--batch-size", "16", "--epochs", "2", "--hidden",
                                "4,4,4,4", "--log-out", (dir / "log.json").string()});
    REQUIRE_MESSAGE(train.code == 0, train.err);
    CHECK(palmnet::load_model(dir / "m2.json").layer_sizes() == std::vector<std::size_t>{24, 4, 4, 4, 4, 1});
    const auto bad = run_cli({"train", "--samples", (dir / "test.csv").string(), "--model-out", "x.json",
                              "--learning-rate", "-1", "--hidden", "4,4", "--optimizer", "lbfgs"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("4 problem(s)") != std::string::npos);
}
