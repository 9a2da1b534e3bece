// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0
//
// Scenario ingestion and report/CSV emission for the command-line front end.
// Reports use the versioned schema "oscilab-report/1"; field samples go to CSV
// with the fixed column order t, x_or_y, phase_id, u_or_rho, v_or_u, theta.

#pragma once

#include <string>
#include <vector>

namespace oscilab::scenario {

struct Scenario {
    std::string name = "default";
    std::string system = "bar";  // bar | viscoplastic | gas | euler | twinning
    double a = 1.0, b = 3.0;
    double fraction = 0.5;
    double mu = 1.0;
    int mode = 1;
    double exponent = 1.0;  // viscoplastic
    double phiA = 1.0, phiB = 1.0;
    std::string law_base = "linear";  // linear | constant
    double law_value = 1.0;           // slope (linear) or value (constant)
    double tau_const = 0.2;           // gas: tau on the A window
    std::vector<int> n_list{4, 8, 16, 32};
    int test_count = 20;
    unsigned long long seed = 20250801ULL;
    int fd_N = 512;
    double fd_dt = 0.0;  // 0: automatic CFL choice
    int fd_mode = 2;
    int fd_refine = 0;
    std::string output_dir = "out";

    static Scenario from_json_text(const std::string& text);
    static Scenario from_json_file(const std::string& path);
    void validate() const;  // throws std::invalid_argument on bad parameters
};

struct Outcome {
    bool pass = false;
    std::string report_json;  // schema oscilab-report/1
    std::string csv;          // field samples or slope tables ("" when not applicable)
};

Outcome run_construct(const Scenario& sc);
Outcome run_rates(const Scenario& sc);
Outcome run_simulate(const Scenario& sc);

struct DispersionRequest {
    double lambda = 1.0, m = 0.0, mu = 1.0, kappa = 0.0;
    int n_from = 1, n_to = 1;
    bool dyadic = false;
    int order = 1;
};
Outcome run_dispersion(const DispersionRequest& rq);

}  // namespace oscilab::scenario
