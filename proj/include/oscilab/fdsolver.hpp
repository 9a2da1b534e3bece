// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0
//
// Small finite-difference initial-value solver for the one-dimensional
// viscoelastic bar, used to cross-validate the constructed exact solutions and
// to demonstrate oscillation persistence numerically.

#pragma once

#include <functional>
#include <vector>

#include "oscilab/constructors.hpp"
#include "oscilab/materials.hpp"

namespace oscilab::fdsolver {

struct Grid1D {
    int N = 256;          // cells on periodic [0,1]
    double dt = 0.0;      // 0: choose from the CFL bound with safety 0.4
    double t0 = 1.0, t1 = 2.0;
    double cfl_safety = 0.4;

    double dx() const { return 1.0 / N; }
    void validate(int oscillation_mode = 1) const;
};

enum class BoundaryKind { periodic, exact_dirichlet };

struct Snapshot {
    double t = 0.0;
    std::vector<double> u, v;
};

struct BarRun {
    Grid1D grid;
    std::vector<Snapshot> snapshots;   // at requested times (always includes t0, t1)
    // max per-step deviation of mean(u) from the exact growth c*dt
    double mass_drift_per_step = 0.0;
    double actual_dt = 0.0;
    long steps = 0;
};

// Exact-solution ghost values for the Dirichlet mode.
struct ExactFields {
    std::function<double(double, double)> u;
    std::function<double(double, double)> v;
};

// Second-order central differences in space, explicit RK2 (Heun) in time.
// Viscous face flux (mu/u_face) dv/dx with harmonic-mean u at the face; the
// elastic face flux is the average of the adjacent cell stresses.
//
// The two-phase laminates have velocity c x + (periodic), which does not fit a
// periodic grid directly; the solver therefore evolves the periodic deviation
// v - c x with `mean_strain_rate` = c, so u_t = c + dv/dx and the viscous flux
// sees the full strain rate c + dv/dx. Pass c = 0 for genuinely periodic data.
// Throws on CFL violation or loss of strain positivity.
BarRun solve_bar(const materials::MaterialLaw& sigma, double mu,
                 const std::vector<double>& u0, const std::vector<double>& v0, const Grid1D& grid,
                 const std::vector<double>& snapshot_times,
                 BoundaryKind bc = BoundaryKind::periodic, const ExactFields* exact = nullptr,
                 double mean_strain_rate = 0.0);

// Sample initial data for the FD run from an exact solution on cell centers;
// the sampled velocity is the periodic deviation from the c x ramp (c = sol.v0()).
void sample_initial(const constructors::PiecewisePeriodicSolution& sol, const Grid1D& grid,
                    std::vector<double>& u0, std::vector<double>& v0);

// Discrete total stress sigma(u_i) + (mu/u_i) centered v_x; the standard
// deviation excludes a collar of `collar` cells around each interface of the
// reference solution (first-order smearing there is not an error of the bulk).
struct StressStats {
    double mean = 0.0;
    double stddev = 0.0;
};
StressStats total_stress_stats(const Snapshot& snap, const materials::MaterialLaw& sigma,
                               double mu, const Grid1D& grid,
                               const std::vector<double>& interface_positions, int collar = 3,
                               double mean_strain_rate = 0.0);

struct OscillationMetric {
    double tv_per_unit_length = 0.0;
    double weight_a = 0.0;  // fraction of cells nearest the 'a' phase value
    double weight_b = 0.0;
};
// Two-bin histogram around the phase values a*t, b*t and total variation.
OscillationMetric oscillation_metric(const Snapshot& snap, double a, double b);

// L1 distance to an exact solution excluding a collar of `collar` cells
// around each listed interface position.
double l1_error_excluding_collar(const Snapshot& snap, const ExactFields& exact,
                                 const Grid1D& grid,
                                 const std::vector<double>& interface_positions, int collar);

}  // namespace oscilab::fdsolver
