#include "palmgrid/error.hpp"
#include "palmgrid/synth/demo.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Write the synthetic demo dataset used by run_demo.sh", "palmgrid_mkdemo"};
    std::string out_dir;
    palmgrid::synth::DemoSpec spec;
    app.add_option("--out-dir", out_dir, "Directory to create")->required();
    app.add_option("--size", spec.size, "Pixels per side")->capture_default_str();
    app.add_option("--samples-per-year", spec.samples_per_year, "Labelled points per epoch")->capture_default_str();
    app.add_option("--seed", spec.seed, "Noise seed")->capture_default_str();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        palmgrid::synth::write_demo_dataset(out_dir, spec);
    } catch (const palmgrid::Error& e) {
        std::cerr << "palmgrid_mkdemo: error: " << palmgrid::to_string(e.kind()) << ": " << e.what() << "\n";
        return 1;
    }
    std::cout << "wrote demo dataset to " << out_dir << "\n";
    return 0;
}
