// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oscilab/fdsolver.hpp"

using namespace oscilab;
using namespace oscilab::fdsolver;
using namespace oscilab::constructors;
using materials::LawKind;
using materials::PhasePair;
using materials::ScalarC1;

namespace {

materials::MaterialLaw default_sigma() {
    return materials::build_sigma(PhasePair{1.0, 3.0}, ScalarC1::linear(1.0));
}

materials::MaterialLaw monotone_sigma() {
    return materials::law_from_callable(LawKind::sigma, PhasePair{1.0, 3.0}, 1e-3, 50.0,
                                        ScalarC1::linear(1.0));
}

// conservative restriction of a fine solution (factor 2) onto the coarse grid
std::vector<double> restrict_half(const std::vector<double>& fine) {
    std::vector<double> coarse(fine.size() / 2);
    for (std::size_t i = 0; i < coarse.size(); ++i)
        coarse[i] = 0.5 * (fine[2 * i] + fine[2 * i + 1]);
    return coarse;
}

}  // namespace

TEST_CASE("grid validation and guards") {
    Grid1D g;
    g.N = 16;
    CHECK_THROWS_AS(g.validate(2), std::invalid_argument);  // N < 16 n
    g.N = 64;
    g.validate(2);

    auto sigma = monotone_sigma();
    std::vector<double> u0(64, 1.0), v0(64, 0.0);
    Grid1D bad;
    bad.N = 64;
    bad.dt = 1e-3;  // far above the parabolic bound 0.4 dx^2
    CHECK_THROWS_AS(solve_bar(sigma, 1.0, u0, v0, bad, {}), std::invalid_argument);

    std::vector<double> uneg(64, 1.0);
    uneg[3] = -0.5;
    Grid1D ok;
    ok.N = 64;
    CHECK_THROWS_AS(solve_bar(sigma, 1.0, uneg, v0, ok, {}), std::invalid_argument);
}

TEST_CASE("discrete mass conservation on the periodic grid") {
    auto sigma = default_sigma();
    auto bar = rescale(bar_solution(PhasePair{1.0, 3.0}, 0.5, sigma, 1.0), 2);
    Grid1D grid;
    grid.N = 64;
    grid.t1 = 1.05;
    std::vector<double> u0, v0;
    sample_initial(bar, grid, u0, v0);
    auto run = solve_bar(sigma, 1.0, u0, v0, grid, {}, BoundaryKind::periodic, nullptr, bar.v0());
    CHECK(run.mass_drift_per_step < 1e-12);
}

TEST_CASE("exact uniform extension is reproduced to round-off with exact ghosts") {
    // u = a t, v = a x solves the system for every sigma; spatially linear and
    // constant fields carry zero truncation error
    const double a = 1.3;
    ExactFields exact{[a](double t, double) { return a * t; },
                      [a](double, double x) { return a * x; }};
    auto sigma = monotone_sigma();
    Grid1D grid;
    grid.N = 64;
    grid.t1 = 1.2;
    std::vector<double> u0(64), v0(64);
    for (int i = 0; i < 64; ++i) {
        double x = (i + 0.5) * grid.dx();
        u0[static_cast<std::size_t>(i)] = exact.u(1.0, x);
        v0[static_cast<std::size_t>(i)] = exact.v(1.0, x);
    }
    auto run = solve_bar(sigma, 1.0, u0, v0, grid, {}, BoundaryKind::exact_dirichlet, &exact);
    const auto& last = run.snapshots.back();
    double worst = 0.0;
    for (int i = 0; i < 64; ++i) {
        double x = (i + 0.5) * grid.dx();
        worst = std::max(worst, std::fabs(last.u[static_cast<std::size_t>(i)] - exact.u(last.t, x)));
        worst = std::max(worst, std::fabs(last.v[static_cast<std::size_t>(i)] - exact.v(last.t, x)));
    }
    CHECK(worst < 1e-11);
}

TEST_CASE("smooth self-convergence at second order") {
    auto sigma = monotone_sigma();
    const double t_end = 1.05;
    std::vector<std::vector<double>> finals;
    for (int N : {32, 64, 128}) {
        Grid1D grid;
        grid.N = N;
        grid.t1 = t_end;
        std::vector<double> u0(static_cast<std::size_t>(N)), v0(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i) {
            double x = (i + 0.5) * grid.dx();
            u0[static_cast<std::size_t>(i)] = 1.0 + 0.1 * std::sin(2.0 * M_PI * x);
            v0[static_cast<std::size_t>(i)] = 0.1 * std::cos(2.0 * M_PI * x);
        }
        auto run = solve_bar(sigma, 1.0, u0, v0, grid, {});
        finals.push_back(run.snapshots.back().u);
    }
    // Richardson: restrict each finer solution and compare on the coarser grid
    auto diff_norm = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]) / a.size();
        return s;
    };
    double e1 = diff_norm(finals[0], restrict_half(finals[1]));
    double e2 = diff_norm(finals[1], restrict_half(finals[2]));
    double order = std::log2(e1 / e2);
    CHECK(order >= 1.8);
}

TEST_CASE("oscillation metric on the sampled exact solution") {
    auto bar = rescale(bar_solution(PhasePair{1.0, 3.0}, 0.5, default_sigma(), 1.0), 2);
    Grid1D grid;
    grid.N = 256;
    std::vector<double> u0, v0;
    sample_initial(bar, grid, u0, v0);
    Snapshot snap{1.0, u0, v0};
    auto met = oscillation_metric(snap, 1.0, 3.0);
    // TV per unit length = 2 n |b-a| t = 2*2*2*1
    CHECK(met.tv_per_unit_length == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(met.weight_a == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(met.weight_b == doctest::Approx(0.5).epsilon(1e-12));

    Snapshot flat{1.0, std::vector<double>(256, 2.0), std::vector<double>(256, 0.0)};
    CHECK(oscillation_metric(flat, 1.0, 3.0).tv_per_unit_length == 0.0);
}

TEST_CASE("bar run: persistence of the two-phase structure and constant stress") {
    auto sigma = default_sigma();
    auto bar = rescale(bar_solution(PhasePair{1.0, 3.0}, 0.5, sigma, 1.0), 2);
    Grid1D grid;
    grid.N = 256;
    std::vector<double> u0, v0;
    sample_initial(bar, grid, u0, v0);
    auto run =
        solve_bar(sigma, 1.0, u0, v0, grid, {1.5}, BoundaryKind::periodic, nullptr, bar.v0());
    REQUIRE(run.snapshots.size() >= 3);

    auto ifpos = bar.interface_positions(1.0, 0.0, 1.0);
    for (const auto& snap : run.snapshots) {
        auto met = oscillation_metric(snap, 1.0, 3.0);
        CHECK(std::fabs(met.weight_a - 0.5) <= 0.1);
        // TV persists (it grows like t for the exact solution)
        CHECK(met.tv_per_unit_length > 0.5 * 8.0);
        auto stats = total_stress_stats(snap, sigma, 1.0, grid, ifpos, 3, bar.v0());
        CHECK(stats.stddev < 5e-2);
    }
}

TEST_CASE("interface error shrinks under refinement") {
    auto sigma = default_sigma();
    auto bar = rescale(bar_solution(PhasePair{1.0, 3.0}, 0.5, sigma, 1.0), 2);
    ExactFields exact{[&bar](double t, double x) { return bar.eval(t, x).u; },
                      [&bar](double t, double x) { return bar.eval(t, x).v; }};
    auto ifpos = bar.interface_positions(1.0, 0.0, 1.0);
    std::vector<double> errs;
    for (int N : {64, 128, 256}) {
        Grid1D grid;
        grid.N = N;
        grid.t1 = 1.25;
        std::vector<double> u0, v0;
        sample_initial(bar, grid, u0, v0);
        auto run = solve_bar(sigma, 1.0, u0, v0, grid, {}, BoundaryKind::periodic, nullptr,
                             bar.v0());
        errs.push_back(
            l1_error_excluding_collar(run.snapshots.back(), exact, grid, ifpos, 3));
    }
    CHECK(errs[0] > errs[1]);
    CHECK(errs[1] > errs[2]);
}

TEST_CASE("monotone stress damps smooth oscillations (reported contrast)") {
    auto sigma = monotone_sigma();
    Grid1D grid;
    grid.N = 64;
    grid.t1 = 1.5;
    std::vector<double> u0(64), v0(64, 0.0);
    for (int i = 0; i < 64; ++i)
        u0[static_cast<std::size_t>(i)] = 2.0 + 0.5 * std::sin(4.0 * M_PI * (i + 0.5) / 64.0);
    auto run = solve_bar(sigma, 1.0, u0, v0, grid, {});
    auto m0 = oscillation_metric(run.snapshots.front(), 1.5, 2.5);
    auto m1 = oscillation_metric(run.snapshots.back(), 1.5, 2.5);
    CHECK(m1.tv_per_unit_length < m0.tv_per_unit_length);
}
