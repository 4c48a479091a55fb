// simanalyze: derives lane indicators, nearest-object tables and the run
// plot from a run directory written by simrun.

#include <iostream>

#include <CLI11.hpp>

#include "drivesim/analysis.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Analyze a simulator run directory"};
    std::string run_dir;
    std::string out_dir;
    drivesim::AnalyzeOptions options;
    app.add_option("--run", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    app.add_flag("--plot-only", options.plot_only, "Only write plot.svg");
    app.add_option("--out", out_dir, "Output directory (default: the run directory)");
    CLI11_PARSE(app, argc, argv);
    if (!out_dir.empty()) options.out_dir = out_dir;

    try {
        for (const auto& w : drivesim::analyze(run_dir, options)) std::cerr << "warning: " << w << "\n";
    } catch (const drivesim::LogFormatError& e) {
        std::cerr << "simanalyze: " << e.file();
        if (!e.column().empty()) std::cerr << " column " << e.column();
        std::cerr << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "simanalyze: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
