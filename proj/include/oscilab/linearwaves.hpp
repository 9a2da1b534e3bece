// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0
//
// Oscillatory wave fields assembled from exact eigenpairs of the amplitude
// system: single-mode solutions of the linear thermoviscoelastic systems in
// one and several dimensions, their pointwise PDE residuals, and the
// amplitude-persistence tables across the mode number n.

#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "oscilab/amplitude.hpp"
#include "oscilab/dispersion.hpp"

namespace oscilab::linearwaves {

using dispersion::ElasticSystem;
using dispersion::LinearTVParams;

enum class WaveSystem { tve1d, multid, adiabatic };
enum class Branch { slow = 0, fast1 = 1, fast2 = 2 };
enum class Quantity { u, v, w, v_x, theta, theta_xx };

// Exact single-mode exponential solution: u_k = (1/n) a0 e^{rho t} zeta_k E,
// theta = -i b0 e^{rho t} E with E = exp(i n nu.x). The eigenpair comes from the
// exact amplitude matrix, not a truncated expansion.
struct WaveField {
    WaveSystem system = WaveSystem::tve1d;
    Branch branch = Branch::slow;
    int n = 1;
    int d = 1;
    Vec nu;              // unit direction (d >= 2); ignored for d == 1
    double rho = 0.0;    // real decay rate of the used branch
    double a0 = 0.0;     // displacement-amplitude scale (first component a(0))
    double b0 = 0.0;     // temperature-amplitude scale, theta = -i b(t) E
    Vec zeta;            // polarization, zeta[0] carries the normalization for d == 1

    // residual-evaluation context
    LinearTVParams params_1d;     // tve1d and the reduced multid dynamics
    ElasticSystem sys;            // multid / adiabatic
    bool has_sys = false;

    Complex u(double t, double x) const;                 // d == 1
    Complex theta1d(double t, double x) const;           // d == 1
    Complex u_k(double t, const Vec& x, int k) const;    // d >= 2
    Complex theta(double t, const Vec& x) const;         // d >= 2

    // sup over x of |quantity(t, .)| (modulus of the complex amplitude).
    double amplitude(Quantity q, double t) const;
};

// Slow/fast wave of the 1-d system from the exact eigenpair of A(n); the
// eigenvector is scaled so its first component equals mu * init_scale.
// Throws if the requested branch root is complex.
WaveField wave_1d(const LinearTVParams& p, Branch branch, double init_scale = 1.0);

// Progressive wave along nu from acoustic eigenpair r (ascending order);
// requires H1-H3 for (nu, xi^r). Time dynamics are the slow branch of the
// reduced system with lambda^r, m^r.
WaveField wave_multid(const ElasticSystem& sys, const Vec& nu, int r, int n);

// Adiabatic wave (kappa = 0) from the modified acoustic tensor eigenpair r;
// theta = i (zeta^r . M nu) alpha(t) E oscillates at leading order.
WaveField wave_adiabatic(const ElasticSystem& sys, const Vec& nu, int r, int n);

// Max modulus of the centered-difference residual of the governing system over
// a fixed sample set; O(h^2) plus the analytic zero of the exact eigenwave.
double pde_residual(const WaveField& f, double h_t, double h_x);

struct PersistenceRow {
    int n = 0;
    double amp_t0 = 0.0;
    double amp_t1 = 0.0;
};
struct PersistenceTable {
    Quantity quantity;
    std::vector<PersistenceRow> rows;
    double slope_t0 = 0.0;  // log-log least-squares slope of amplitude vs n
    double slope_t1 = 0.0;
};

PersistenceTable persistence_metric(const std::function<WaveField(int)>& make_field, Quantity q,
                                    const std::vector<int>& n_list);

}  // namespace oscilab::linearwaves
