// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0
//
// oscilab: construct exact oscillating weak solutions, certify them
// (Rankine-Hugoniot, weak-form and interior residuals), measure
// weak-convergence rates, validate dispersion asymptotics, and run the
// finite-difference cross-check.
//
// Exit codes: 0 success, 2 usage/parameter error, 3 certification failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "oscilab/scenario.hpp"

namespace {

namespace fs = std::filesystem;
using oscilab::scenario::Outcome;
using oscilab::scenario::Scenario;

std::string output_dir(const std::string& flag_value) {
    if (const char* env = std::getenv("OSCILAB_OUTPUT_DIR")) return env;
    return flag_value;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << content;
}

int emit(const Outcome& out, const std::string& dir, const std::string& stem, int fail_code) {
    write_file(fs::path(dir) / (stem + "_report.json"), out.report_json);
    if (!out.csv.empty()) write_file(fs::path(dir) / (stem + ".csv"), out.csv);
    std::cout << out.report_json << "\n";
    return out.pass ? 0 : fail_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oscilab: oscillating weak solutions laboratory"};
    app.require_subcommand(1);
    std::string outdir = "out";
    auto* outdir_opt = app.add_option("--output-dir", outdir,
                                      "output directory (env OSCILAB_OUTPUT_DIR overrides; "
                                      "defaults to the scenario's output_dir)");

    // dispersion
    auto* disp = app.add_subcommand("dispersion", "exact vs asymptotic mode analysis");
    oscilab::scenario::DispersionRequest rq;
    std::string n_range = "1:1";
    disp->add_option("--lambda", rq.lambda, "elastic modulus")->required();
    disp->add_option("--m", rq.m, "thermoelastic coupling")->required();
    disp->add_option("--mu", rq.mu, "viscosity")->required();
    disp->add_option("--kappa", rq.kappa, "heat diffusivity")->required();
    disp->add_option("--n-range", n_range, "n range start:end[:dyadic]");
    disp->add_option("--order", rq.order, "asymptotic truncation order (0..2)");

    // construct
    auto* cons = app.add_subcommand("construct", "build and certify an exact weak solution");
    cons->require_subcommand(1);
    std::string scenario_path;
    for (const char* name : {"bar", "viscoplastic", "gas", "euler", "twinning"}) {
        auto* sub = cons->add_subcommand(name);
        sub->add_option("--scenario", scenario_path, "scenario JSON file");
    }

    // rates
    auto* rates = app.add_subcommand("rates", "weak-convergence slopes across n");
    rates->add_option("--scenario", scenario_path, "scenario JSON file");

    // simulate
    auto* sim = app.add_subcommand("simulate", "finite-difference cross-validation");
    sim->add_option("--scenario", scenario_path, "scenario JSON file");
    int refine_override = -1;
    sim->add_option("--refine", refine_override, "extra dyadic refinement levels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string dir = output_dir(outdir);
    try {
        if (disp->parsed()) {
            // parse start:end[:dyadic]
            auto first = n_range.find(':');
            if (first == std::string::npos) throw std::invalid_argument("bad --n-range");
            rq.n_from = std::stoi(n_range.substr(0, first));
            auto rest = n_range.substr(first + 1);
            auto second = rest.find(':');
            if (second == std::string::npos) {
                rq.n_to = std::stoi(rest);
            } else {
                rq.n_to = std::stoi(rest.substr(0, second));
                rq.dyadic = rest.substr(second + 1) == "dyadic";
            }
            return emit(oscilab::scenario::run_dispersion(rq), dir, "dispersion", 3);
        }

        Scenario sc;
        if (!scenario_path.empty()) sc = Scenario::from_json_file(scenario_path);
        const std::string run_dir =
            (outdir_opt->count() > 0 || std::getenv("OSCILAB_OUTPUT_DIR")) ? dir : sc.output_dir;

        if (cons->parsed()) {
            for (auto* sub : cons->get_subcommands()) sc.system = sub->get_name();
            return emit(oscilab::scenario::run_construct(sc), run_dir, "construct_" + sc.system,
                        3);
        }
        if (rates->parsed()) {
            if (scenario_path.empty() && sc.system == "bar") sc.name = "rates-default";
            return emit(oscilab::scenario::run_rates(sc), run_dir, "rates", 3);
        }
        if (sim->parsed()) {
            if (refine_override >= 0) sc.fd_refine = refine_override;
            return emit(oscilab::scenario::run_simulate(sc), run_dir, "simulate", 3);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
