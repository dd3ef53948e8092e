// Command-line front end: runs verification scenarios (bundled or from JSON
// files) and writes machine-readable reports plus a human-readable table.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "vforms/catalog.hpp"
#include "vforms/scenario.hpp"

namespace {

int list_bundled() {
    std::cout << "bundled scenarios:\n";
    for (const std::string& name : vforms::bundled_scenario_names())
        std::cout << "  " << name << "\n";
    std::cout << "\nmanifold catalog:\n";
    for (const vforms::CatalogEntry& e : vforms::catalog_manifolds())
        std::cout << "  " << e.name << " — " << e.description << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "vforms — vector-valued differential forms on chart atlases: runs "
        "scenario files of numerical checks (differential identities, chart "
        "consistency, partition-of-unity integrals, boundary identities) and "
        "reports pass/fail per check"};
    app.set_version_flag("--version", "0.1.0");

    std::string scenario;
    std::string report_path;
    std::optional<int> quad_order;
    std::optional<double> fd_step;
    std::optional<std::uint64_t> seed;
    double tolerance_scale = 1.0;
    bool list = false;

    app.add_option("-s,--scenario", scenario,
                   "scenario to run: a JSON file path, or the name of a bundled scenario");
    app.add_option("-r,--report", report_path,
                   "write the JSON report here (default: JSON to stdout, summary to stderr)");
    app.add_option("-q,--quad-order", quad_order,
                   "override the Gauss-Legendre order used by integral checks")
        ->check(CLI::Range(1, 512));
    app.add_option("--fd-step", fd_step, "override the finite-difference step")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "override the sampling seed");
    app.add_option("--tolerance-scale", tolerance_scale,
                   "multiply every check tolerance by this factor")
        ->check(CLI::PositiveNumber);
    app.add_flag("-l,--list", list, "list bundled scenarios and the manifold catalog, then exit");

    CLI11_PARSE(app, argc, argv);

    if (list) return list_bundled();
    if (scenario.empty()) {
        std::cerr << "error: no scenario given (use --scenario, or --list to see "
                     "what is bundled)\n";
        return 2;
    }

    vforms::RunOptions opts;
    opts.quad_order = quad_order;
    opts.fd_step = fd_step;
    opts.seed = seed;
    opts.tolerance_scale = tolerance_scale;

    vforms::RunOutcome outcome;
    if (std::filesystem::exists(scenario)) {
        outcome = vforms::run_scenario_file(scenario, opts);
    } else {
        try {
            outcome = vforms::run_scenario_text(vforms::bundled_scenario_text(scenario), opts);
        } catch (const std::invalid_argument&) {
            std::cerr << "error: '" << scenario
                      << "' is neither a readable file nor a bundled scenario name "
                         "(--list shows the bundled names)\n";
            return 2;
        }
    }

    if (!outcome.error.empty()) {
        std::cerr << "error: " << outcome.error << "\n";
        return outcome.exit_code;
    }

    if (report_path.empty()) {
        std::cout << outcome.report_json;
        std::cerr << outcome.human_summary;
    } else {
        std::ofstream out(report_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write report to '" << report_path << "'\n";
            return 3;
        }
        out << outcome.report_json;
        std::cout << outcome.human_summary;
    }
    return outcome.exit_code;
}
