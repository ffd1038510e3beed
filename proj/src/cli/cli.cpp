#include "palmgrid/cli/cli.hpp"

#include "palmgrid/compositor/annual_stack.hpp"
#include "palmgrid/compositor/scene.hpp"
#include "palmgrid/dataset/folds.hpp"
#include "palmgrid/dataset/pseudo_absence.hpp"
#include "palmgrid/dataset/sample.hpp"
#include "palmgrid/error.hpp"
#include "palmgrid/metrics/metrics.hpp"
#include "palmgrid/palmnet/inference.hpp"
#include "palmgrid/palmnet/model_file.hpp"
#include "palmgrid/palmnet/trainer.hpp"
#include "palmgrid/parallel.hpp"
#include "palmgrid/raster/grid_io.hpp"
#include "palmgrid/raster/roi.hpp"
#include "palmgrid/riskengine/risk.hpp"
#include "palmgrid/text.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace palmgrid::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kFooter = R"(Configuration:
  --config FILE reads TOML. Top-level keys set global options (threads = 4);
  a [subcommand] table sets that subcommand's options, e.g.
      [risk]
      window = 31
  Flags given on the command line override file values.

Errors print one line "palmgrid: error: <category>: <message>" and exit 1.
Usage errors exit 2.)";

// Collects every configuration problem before failing.
class Problems {
public:
    void add(std::string problem) { items_.push_back(std::move(problem)); }

    void input(const std::string& flag, const std::string& path) {
        if (path.empty()) {
            add("missing " + flag);
        } else if (!fs::exists(path)) {
            add(flag + ": no such file '" + path + "'");
        }
    }
    void output(const std::string& flag, const std::string& path) {
        if (path.empty()) add("missing " + flag);
    }
    void probability(const std::string& flag, double v) {
        if (!(v >= 0.0 && v <= 1.0)) add(flag + " must lie in [0, 1]");
    }

    void raise() const {
        if (items_.empty()) return;
        std::string msg = std::to_string(items_.size()) + " problem(s):";
        for (const auto& p : items_) msg += " " + p + ";";
        msg.pop_back();
        fail(ErrorKind::config, msg);
    }

private:
    std::vector<std::string> items_;
};

std::map<int, compositor::AnnualStack> load_stacks(const std::vector<std::string>& manifests) {
    std::map<int, compositor::AnnualStack> stacks;
    for (const auto& m : manifests) {
        auto stack = compositor::read_stack(m);
        const int year = stack.year;
        if (!stacks.emplace(year, std::move(stack)).second) {
            fail(ErrorKind::config, "two stacks given for year " + std::to_string(year));
        }
    }
    return stacks;
}

// Model scores for every sample that lands on a valid stack pixel.
std::vector<metrics::ScoredSample> score_samples(const palmnet::MlpParams& params,
                                                 const std::vector<dataset::SamplePoint>& samples,
                                                 const std::map<int, compositor::AnnualStack>& stacks,
                                                 std::ostream& out) {
    const auto features = palmnet::extract_features(samples, stacks);
    out << "samples: " << features.batch.size() << " scored, " << features.skipped_outside << " outside, "
        << features.skipped_nodata << " on nodata\n";
    std::vector<metrics::ScoredSample> scored;
    scored.reserve(features.batch.size());
    for (std::size_t i = 0; i < features.batch.size(); ++i) {
        scored.push_back({palmnet::forward(params, features.batch.row(i)), features.batch.labels[i],
                          features.batch.weights[i]});
    }
    if (scored.empty()) fail(ErrorKind::precondition, "no sample falls on a valid stack pixel");
    return scored;
}

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : "undefined"; }

// ---------------------------------------------------------------- composite

struct CompositeArgs {
    std::string optical, sar, palsar, dem, out_dir;
    int year = 0;
    compositor::CompositeOptions options;
};

void add_composite(CLI::App& app, CompositeArgs& a) {
    auto* sub = app.add_subcommand("composite", "Build the 24-channel annual stack for one year");
    sub->add_option("--optical", a.optical, "Optical scene manifest (JSON)");
    sub->add_option("--sar", a.sar, "C-band SAR scene manifest with VV and VH bands (JSON)");
    sub->add_option("--palsar", a.palsar, "L-band yearly HH/HV manifest (JSON)");
    sub->add_option("--dem", a.dem, "Elevation grid (FGRD)");
    sub->add_option("--year", a.year, "Calendar year to composite");
    sub->add_option("--out-dir", a.out_dir, "Directory receiving the channel grids and stack.json");
    sub->add_option("--cloud-threshold", a.options.cloud_threshold, "Minimum clear-sky score")->capture_default_str();
    sub->add_option("--c-band-min", a.options.c_band.lo, "C-band dB floor")->capture_default_str();
    sub->add_option("--c-band-max", a.options.c_band.hi, "C-band dB ceiling")->capture_default_str();
    sub->add_option("--l-band-min", a.options.l_band.lo, "L-band dB floor")->capture_default_str();
    sub->add_option("--l-band-max", a.options.l_band.hi, "L-band dB ceiling")->capture_default_str();
    sub->add_option("--gapfill-window", a.options.gapfill_window, "Odd L-band gap-fill window in years")
        ->capture_default_str();
}

void run_composite(const CompositeArgs& a, std::ostream& out) {
    Problems p;
    p.input("--optical", a.optical);
    p.input("--sar", a.sar);
    p.input("--palsar", a.palsar);
    p.input("--dem", a.dem);
    p.output("--out-dir", a.out_dir);
    if (a.year <= 0) p.add("missing --year");
    p.probability("--cloud-threshold", a.options.cloud_threshold);
    if (!(a.options.c_band.lo < a.options.c_band.hi)) p.add("--c-band-min must be below --c-band-max");
    if (!(a.options.l_band.lo < a.options.l_band.hi)) p.add("--l-band-min must be below --l-band-max");
    if (a.options.gapfill_window <= 0 || a.options.gapfill_window % 2 == 0) p.add("--gapfill-window must be odd");
    p.raise();

    const auto optical = compositor::load_scene_manifest(a.optical);
    const auto sar = compositor::load_scene_manifest(a.sar);
    const auto palsar = compositor::load_palsar_manifest(a.palsar);
    const auto dem = raster::read_grid(a.dem);
    const auto stack = compositor::build_annual_stack(a.year, optical, sar, palsar, dem, a.options);
    compositor::write_stack(stack, a.out_dir);
    out << "wrote " << (fs::path(a.out_dir) / "stack.json").string() << " (" << stack.channels.size()
        << " channels, " << stack.header().width << "x" << stack.header().height << ")\n";
}

// -------------------------------------------------------------- split-folds

struct SplitArgs {
    std::string samples, out_dir;
    std::uint64_t seed = 0;
    dataset::HexGridSpec hex;
    std::string non_tree, stable_forest;
    std::size_t pseudo_non_tree = 0, pseudo_forest = 0;
    std::uint64_t pseudo_seed = 0;
    int pseudo_year = 0;
};

void add_split(CLI::App& app, SplitArgs& a) {
    auto* sub = app.add_subcommand("split-folds", "Assign samples to hexagon-based spatial folds");
    sub->add_option("--samples", a.samples, "Labelled points (CSV: lon,lat,label,year,source,weight)");
    sub->add_option("--out-dir", a.out_dir, "Directory receiving train.csv, validation.csv, test.csv, folds.json");
    sub->add_option("--seed", a.seed, "Fold hash seed")->capture_default_str();
    sub->add_option("--hex-area-km2", a.hex.cell_area_km2, "Hexagon cell area in km2")->capture_default_str();
    sub->add_option("--hex-offset-x", a.hex.offset_x_m, "Grid offset east in meters")->capture_default_str();
    sub->add_option("--hex-offset-y", a.hex.offset_y_m, "Grid offset north in meters")->capture_default_str();
    sub->add_option("--non-tree", a.non_tree, "Stable non-tree mask for pseudo-absences (FGRD u8)");
    sub->add_option("--stable-forest", a.stable_forest, "Stable forest mask for pseudo-absences (FGRD u8)");
    sub->add_option("--pseudo-non-tree", a.pseudo_non_tree, "Pseudo-absences drawn from the non-tree mask")
        ->capture_default_str();
    sub->add_option("--pseudo-forest", a.pseudo_forest, "Pseudo-absences drawn from the forest mask")
        ->capture_default_str();
    sub->add_option("--pseudo-seed", a.pseudo_seed, "Pseudo-absence sampling seed")->capture_default_str();
    sub->add_option("--pseudo-year", a.pseudo_year, "Year stamped on pseudo-absences")->capture_default_str();
}

void run_split(const SplitArgs& a, std::ostream& out) {
    Problems p;
    p.input("--samples", a.samples);
    p.output("--out-dir", a.out_dir);
    if (!(a.hex.cell_area_km2 > 0.0)) p.add("--hex-area-km2 must be positive");
    const bool pseudo = a.pseudo_non_tree > 0 || a.pseudo_forest > 0;
    if (pseudo) {
        p.input("--non-tree", a.non_tree);
        p.input("--stable-forest", a.stable_forest);
    }
    p.raise();

    auto samples = dataset::read_samples(a.samples);
    if (pseudo) {
        const auto extra = dataset::pseudo_absence_sample(raster::read_mask(a.non_tree), raster::read_mask(a.stable_forest),
                                                          a.pseudo_non_tree, a.pseudo_forest, a.pseudo_seed,
                                                          a.pseudo_year);
        samples.insert(samples.end(), extra.begin(), extra.end());
    }
    const auto folds = dataset::assign_folds(samples, a.hex, a.seed);
    const std::array<std::pair<int, const char*>, 3> files{{{folds.training_fold, "train.csv"},
                                                            {folds.validation_fold, "validation.csv"},
                                                            {folds.test_fold, "test.csv"}}};
    fs::create_directories(a.out_dir);
    for (const auto& [fold, name] : files) {
        std::vector<dataset::SamplePoint> part;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (folds.fold_of_point[i] == fold) part.push_back(samples[i]);
        }
        dataset::write_samples(part, fs::path(a.out_dir) / name);
        out << name << ": " << part.size() << " points (fold " << fold << ")\n";
    }
    raster::write_file_atomic(fs::path(a.out_dir) / "folds.json", dataset::fold_report_json(folds));
}

// -------------------------------------------------------------------- train

struct TrainArgs {
    std::string samples, model_out, log_out;
    std::vector<std::string> stacks;
    palmnet::TrainConfig config;
    std::string optimizer = "adam";
};

void add_train(CLI::App& app, TrainArgs& a) {
    auto* sub = app.add_subcommand("train", "Train the palm probability network");
    sub->add_option("--samples", a.samples, "Training points (CSV)");
    sub->add_option("--stack", a.stacks, "Stack manifest per year (repeatable)");
    sub->add_option("--model-out", a.model_out, "Model file to write (JSON)");
    sub->add_option("--log-out", a.log_out, "Per-epoch loss log to write (JSON)");
    sub->add_option("--learning-rate", a.config.learning_rate, "Step size")->capture_default_str();
    sub->add_option("--batch-size", a.config.batch_size, "Mini-batch rows")->capture_default_str();
    sub->add_option("--epochs", a.config.epochs, "Maximum epochs")->capture_default_str();
    sub->add_option("--seed", a.config.seed, "Initialization and shuffling seed")->capture_default_str();
    sub->add_option("--hidden", a.config.hidden, "Four hidden layer widths")->delimiter(',')->capture_default_str();
    sub->add_option("--validation-fraction", a.config.validation_fraction, "Share of rows held out for early stopping")
        ->capture_default_str();
    sub->add_option("--patience", a.config.patience, "Epochs without held-out improvement before stopping (0 = off)")
        ->capture_default_str();
    sub->add_option("--optimizer", a.optimizer, "adam or sgd")->capture_default_str();
}

void run_train(TrainArgs a, std::ostream& out) {
    Problems p;
    p.input("--samples", a.samples);
    if (a.stacks.empty()) p.add("missing --stack");
    for (const auto& s : a.stacks) p.input("--stack", s);
    p.output("--model-out", a.model_out);
    for (const auto& problem : a.config.problems()) p.add(problem);
    if (a.optimizer == "adam") {
        a.config.optimizer = palmnet::Optimizer::adam;
    } else if (a.optimizer == "sgd") {
        a.config.optimizer = palmnet::Optimizer::sgd;
    } else {
        p.add("--optimizer must be adam or sgd");
    }
    p.raise();

    const auto samples = dataset::read_samples(a.samples);
    const auto stacks = load_stacks(a.stacks);
    const auto features = palmnet::extract_features(samples, stacks);
    out << "samples: " << features.batch.size() << " usable, " << features.skipped_outside << " outside, "
        << features.skipped_nodata << " on nodata\n";
    if (features.batch.size() == 0) fail(ErrorKind::precondition, "no sample falls on a valid stack pixel");
    const auto result = palmnet::train(features.batch, a.config);
    palmnet::save_model(result.params, a.model_out);
    if (!a.log_out.empty()) raster::write_file_atomic(a.log_out, palmnet::training_log_json(result));
    const auto& best = result.log[result.best_epoch - 1];
    out << "epochs: " << result.log.size() << ", best " << result.best_epoch << " (train loss "
        << format_double(best.train_loss);
    if (best.holdout_loss) out << ", held-out loss " << format_double(*best.holdout_loss);
    out << ")\nwrote " << a.model_out << "\n";
}

// ------------------------------------------------------------------ predict

struct PredictArgs {
    std::string model, stack, out;
};

void add_predict(CLI::App& app, PredictArgs& a) {
    auto* sub = app.add_subcommand("predict", "Write a palm probability grid for one stack");
    sub->add_option("--model", a.model, "Model file (JSON)");
    sub->add_option("--stack", a.stack, "Stack manifest (stack.json)");
    sub->add_option("--out", a.out, "Probability grid to write (FGRD)");
}

void run_predict(const PredictArgs& a, std::ostream& out) {
    Problems p;
    p.input("--model", a.model);
    p.input("--stack", a.stack);
    p.output("--out", a.out);
    p.raise();
    const auto params = palmnet::load_model(a.model);
    const auto stack = compositor::read_stack(a.stack);
    raster::write_grid(palmnet::predict_grid(params, stack), a.out);
    out << "wrote " << a.out << "\n";
}

// ---------------------------------------------------------- evaluate, sweep

struct EvaluateArgs {
    std::string model, samples, out, csv;
    std::vector<std::string> stacks;
    double threshold = 0.5;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a) {
    auto* sub = app.add_subcommand("evaluate", "Accuracy metrics of a model on labelled points");
    sub->add_option("--model", a.model, "Model file (JSON)");
    sub->add_option("--samples", a.samples, "Evaluation points (CSV)");
    sub->add_option("--stack", a.stacks, "Stack manifest per year (repeatable)");
    sub->add_option("--threshold", a.threshold, "Positive iff score >= threshold")->capture_default_str();
    sub->add_option("--out", a.out, "Metric report to write (JSON)");
    sub->add_option("--csv", a.csv, "Metric report to write (CSV)");
}

void run_evaluate(const EvaluateArgs& a, std::ostream& out) {
    Problems p;
    p.input("--model", a.model);
    p.input("--samples", a.samples);
    if (a.stacks.empty()) p.add("missing --stack");
    for (const auto& s : a.stacks) p.input("--stack", s);
    p.probability("--threshold", a.threshold);
    p.raise();
    const auto scored = score_samples(palmnet::load_model(a.model), dataset::read_samples(a.samples),
                                      load_stacks(a.stacks), out);
    const auto r = metrics::evaluate(scored, a.threshold);
    if (!a.out.empty()) raster::write_file_atomic(a.out, metrics::report_json(r));
    if (!a.csv.empty()) raster::write_file_atomic(a.csv, metrics::report_csv(r));
    const std::string t = format_double(a.threshold);
    out << "samples  cross_entropy  accuracy@" << t << "  auc  recall@" << t << "  precision@" << t << "  f1@" << t
        << "\n"
        << r.samples << "  " << format_double(r.cross_entropy) << "  " << format_double(r.binary_accuracy) << "  "
        << opt_text(r.auc) << "  " << opt_text(r.recall) << "  " << opt_text(r.precision) << "  " << opt_text(r.f1)
        << "\ncounts tp=" << r.counts.tp << " fp=" << r.counts.fp << " tn=" << r.counts.tn << " fn=" << r.counts.fn
        << "\n";
}

struct SweepArgs {
    std::string model, samples, out, csv;
    std::vector<std::string> stacks;
    std::size_t n_thresholds = 100;
};

void add_sweep(CLI::App& app, SweepArgs& a) {
    auto* sub = app.add_subcommand("sweep", "Accuracy, precision, recall and F1 over evenly spaced thresholds");
    sub->add_option("--model", a.model, "Model file (JSON)");
    sub->add_option("--samples", a.samples, "Evaluation points (CSV)");
    sub->add_option("--stack", a.stacks, "Stack manifest per year (repeatable)");
    sub->add_option("--n-thresholds", a.n_thresholds, "Threshold steps over [0, 1]")->capture_default_str();
    sub->add_option("--out", a.out, "Sweep table to write (JSON)");
    sub->add_option("--csv", a.csv, "Sweep table to write (CSV)");
}

void run_sweep(const SweepArgs& a, std::ostream& out) {
    Problems p;
    p.input("--model", a.model);
    p.input("--samples", a.samples);
    if (a.stacks.empty()) p.add("missing --stack");
    for (const auto& s : a.stacks) p.input("--stack", s);
    if (a.n_thresholds < 1) p.add("--n-thresholds must be at least 1");
    p.raise();
    const auto scored = score_samples(palmnet::load_model(a.model), dataset::read_samples(a.samples),
                                      load_stacks(a.stacks), out);
    const auto sweep = metrics::curve_sweep(scored, a.n_thresholds);
    if (!a.out.empty()) raster::write_file_atomic(a.out, metrics::sweep_json(sweep));
    if (!a.csv.empty()) raster::write_file_atomic(a.csv, metrics::sweep_csv(sweep));
    out << "best_f1_threshold " << opt_text(sweep.best_f1_threshold) << "\n";
}

// --------------------------------------------------------------------- otsu

struct OtsuArgs {
    std::string prob, out;
    std::size_t bins = metrics::kDefaultOtsuBins;
};

void add_otsu(CLI::App& app, OtsuArgs& a) {
    auto* sub = app.add_subcommand("otsu", "Histogram threshold of a probability grid");
    sub->add_option("--prob", a.prob, "Probability grid (FGRD)");
    sub->add_option("--bins", a.bins, "Histogram bins over [0, 1]")->capture_default_str();
    sub->add_option("--out", a.out, "Threshold to write (JSON)");
}

void run_otsu(const OtsuArgs& a, std::ostream& out) {
    Problems p;
    p.input("--prob", a.prob);
    if (a.bins < 2) p.add("--bins must be at least 2");
    p.raise();
    const double t = metrics::otsu_threshold(raster::read_grid(a.prob), a.bins);
    if (!a.out.empty()) {
        nlohmann::ordered_json j;
        j["schema_version"] = 1;
        j["bins"] = a.bins;
        j["threshold"] = t;
        raster::write_file_atomic(a.out, j.dump(2) + "\n");
    }
    out << "otsu_threshold " << format_double(t) << "\n";
}

// --------------------------------------------------------------------- risk

struct RiskArgs {
    std::string prev, curr, rois, forest, out, csv, stable_out, rho_out, p01_out, p10_out;
    std::size_t window = riskengine::kDefaultWindow;
    std::size_t min_pairs = riskengine::kDefaultMinPairs;
};

void add_risk(CLI::App& app, RiskArgs& a) {
    auto* sub = app.add_subcommand("risk", "Transition risk per region and forest stratum");
    sub->add_option("--prev", a.prev, "Earlier probability grid (FGRD)");
    sub->add_option("--curr", a.curr, "Later probability grid (FGRD)");
    sub->add_option("--rois", a.rois, "Regions of interest (JSON)");
    sub->add_option("--forest", a.forest, "Forest mask: 1 forest, 0 non-forest, 255 excluded (FGRD u8)");
    sub->add_option("--out", a.out, "Risk report to write (JSON)");
    sub->add_option("--csv", a.csv, "Risk table to write (CSV, one column per region)");
    sub->add_option("--window", a.window, "Odd rank-correlation window in pixels")->capture_default_str();
    sub->add_option("--min-pairs", a.min_pairs, "Valid pairs needed for a correlation; fewer gives 0")
        ->capture_default_str();
    sub->add_option("--stable-out", a.stable_out, "Stable palm probability grid to write (FGRD)");
    sub->add_option("--rho-out", a.rho_out, "Correlation grid to write (FGRD)");
    sub->add_option("--p01-out", a.p01_out, "To-palm probability grid to write (FGRD)");
    sub->add_option("--p10-out", a.p10_out, "From-palm probability grid to write (FGRD)");
}

void run_risk(const RiskArgs& a, std::ostream& out) {
    Problems p;
    p.input("--prev", a.prev);
    p.input("--curr", a.curr);
    p.input("--rois", a.rois);
    p.input("--forest", a.forest);
    p.output("--out", a.out);
    if (a.window == 0 || a.window % 2 == 0) p.add("--window must be odd");
    p.raise();

    const auto prev = raster::read_grid(a.prev);
    const auto curr = raster::read_grid(a.curr);
    const auto rois = raster::read_rois(a.rois);
    const auto forest = raster::read_mask(a.forest);
    const auto rho = riskengine::windowed_spearman(prev, curr, a.window, a.min_pairs);
    const auto joint = riskengine::joint_probabilities(prev, curr, rho);
    const auto report = riskengine::risk_aggregate(joint, rois, forest);
    raster::write_file_atomic(a.out, riskengine::risk_report_json(report));
    if (!a.csv.empty()) raster::write_file_atomic(a.csv, riskengine::risk_report_csv(report));
    if (!a.stable_out.empty()) raster::write_grid(riskengine::stable_palm(joint).to_band_grid(), a.stable_out);
    if (!a.rho_out.empty()) raster::write_grid(rho.to_band_grid(), a.rho_out);
    if (!a.p01_out.empty()) raster::write_grid(joint.p01.to_band_grid(), a.p01_out);
    if (!a.p10_out.empty()) raster::write_grid(joint.p10.to_band_grid(), a.p10_out);
    out << riskengine::risk_report_csv(report);
}

// --------------------------------------------------------------------- area

struct AreaArgs {
    std::string prob, rois, out;
    double threshold = 0.5;
    bool otsu = false;
    std::size_t bins = metrics::kDefaultOtsuBins;
};

void add_area(CLI::App& app, AreaArgs& a) {
    auto* sub = app.add_subcommand("area", "Expected and thresholded palm area");
    sub->add_option("--prob", a.prob, "Probability grid (FGRD)");
    sub->add_option("--rois", a.rois, "Regions of interest (JSON); the whole grid is always reported");
    sub->add_option("--threshold", a.threshold, "Thresholded area counts pixels with p >= threshold")
        ->capture_default_str();
    sub->add_flag("--otsu", a.otsu, "Use the histogram threshold instead of --threshold");
    sub->add_option("--bins", a.bins, "Histogram bins for --otsu")->capture_default_str();
    sub->add_option("--out", a.out, "Area report to write (JSON)");
}

void run_area(const AreaArgs& a, std::ostream& out) {
    Problems p;
    p.input("--prob", a.prob);
    if (!a.rois.empty()) p.input("--rois", a.rois);
    p.probability("--threshold", a.threshold);
    if (a.bins < 2) p.add("--bins must be at least 2");
    p.raise();

    const auto prob = raster::read_grid(a.prob);
    const double t = a.otsu ? metrics::otsu_threshold(prob, a.bins) : a.threshold;
    std::vector<raster::RegionOfInterest> rois;
    if (!a.rois.empty()) rois = raster::read_rois(a.rois);

    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["units"] = "ha";
    j["threshold"] = t;
    j["threshold_source"] = a.otsu ? "otsu" : "flag";
    j["regions"] = nlohmann::ordered_json::array();
    out << "region  expected_ha  thresholded_ha@" << format_double(t) << "\n";
    auto emit = [&](const std::string& id, const raster::RegionOfInterest* roi) {
        const double e = riskengine::expected_area_ha(prob, roi);
        const double th = riskengine::thresholded_area_ha(prob, t, roi);
        j["regions"].push_back({{"id", id}, {"expected_ha", e}, {"thresholded_ha", th}});
        out << id << "  " << format_double(e) << "  " << format_double(th) << "\n";
    };
    emit("all", nullptr);
    for (const auto& roi : rois) emit(roi.id, &roi);
    if (!a.out.empty()) raster::write_file_atomic(a.out, j.dump(2) + "\n");
}

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Palm probability mapping, spatial folds, accuracy metrics and transition risk.", "palmgrid"};
    app.footer(kFooter);
    app.set_config("--config", "", "TOML configuration file");
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker thread cap (0 = all cores); results do not depend on it")
        ->capture_default_str();
    app.require_subcommand(1, 1);

    CompositeArgs composite;
    SplitArgs split;
    TrainArgs train;
    PredictArgs predict;
    EvaluateArgs evaluate;
    SweepArgs sweep;
    OtsuArgs otsu;
    RiskArgs risk;
    AreaArgs area;
    add_composite(app, composite);
    add_split(app, split);
    add_train(app, train);
    add_predict(app, predict);
    add_evaluate(app, evaluate);
    add_sweep(app, sweep);
    add_otsu(app, otsu);
    add_risk(app, risk);
    add_area(app, area);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        if (dynamic_cast<const CLI::FileError*>(&e) || dynamic_cast<const CLI::ConfigError*>(&e)) {
            err << "palmgrid: error: config: " << one_line(e.what()) << "\n";
            return kExitFailure;
        }
        const auto extra = app.remaining();
        const std::string msg = !extra.empty() && app.get_subcommands().empty()
                                    ? "unknown subcommand '" + extra.front() + "'"
                                    : one_line(e.what());
        err << "palmgrid: error: usage: " << msg << "\n" << app.help();
        return kExitUsage;
    }

    try {
        set_max_threads(threads);
        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "composite") run_composite(composite, out);
        else if (name == "split-folds") run_split(split, out);
        else if (name == "train") run_train(train, out);
        else if (name == "predict") run_predict(predict, out);
        else if (name == "evaluate") run_evaluate(evaluate, out);
        else if (name == "sweep") run_sweep(sweep, out);
        else if (name == "otsu") run_otsu(otsu, out);
        else if (name == "risk") run_risk(risk, out);
        else if (name == "area") run_area(area, out);
    } catch (const Error& e) {
        err << "palmgrid: error: " << to_string(e.kind()) << ": " << one_line(e.what()) << "\n";
        return kExitFailure;
    } catch (const fs::filesystem_error& e) {
        err << "palmgrid: error: io: " << one_line(e.what()) << "\n";
        return kExitFailure;
    } catch (const std::bad_alloc&) {
        err << "palmgrid: error: capacity: out of memory\n";
        return kExitFailure;
    }
    return kExitOk;
}

} // namespace palmgrid::cli
