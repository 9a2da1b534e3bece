// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0
//
// Amplitude ODE systems of the mode analysis: fixed-step integration of the
// (a, v, b) system, explicit quadratic roots for the viscoelastic branch and
// the adiabatic reduction, and the mode-energy dissipation identity.

#pragma once

#include <complex>
#include <vector>

#include "oscilab/core.hpp"
#include "oscilab/dispersion.hpp"

namespace oscilab::amplitude {

using dispersion::LinearTVParams;

struct AmplitudeState {
    double a = 0.0;  // displacement amplitude
    double v = 0.0;  // velocity amplitude, v = da/dt
    double b = 0.0;  // temperature amplitude
    double t = 0.0;
};

enum class Integrator { rk4, trapezoidal };

struct Trajectory {
    std::vector<AmplitudeState> samples;  // strictly increasing t, first = init
    double dt = 0.0;
    Integrator method = Integrator::rk4;
    int method_order() const { return method == Integrator::rk4 ? 4 : 2; }
};

// Fixed-step integration of the (a,v,b) system. Explicit RK4 requires
// dt * (mu + kappa) * n^2 <= 0.5; the implicit trapezoidal option has no guard.
Trajectory integrate_amplitude(const LinearTVParams& p, const AmplitudeState& init, double t_end,
                               double dt, Integrator method = Integrator::rk4);

// Max over interior samples of |d/dt(v^2/2 + lambda n^2 a^2/2 + n^2 b^2/2)
// + mu n^2 v^2 + kappa n^4 b^2| with centered differences. Needs >= 3 samples.
double energy_identity_residual(const Trajectory& traj, const LinearTVParams& p);

double mode_energy(const AmplitudeState& s, const LinearTVParams& p);

// rho_{-,+} = (mu n^2 / 2)(-1 -+ sqrt(1 - 4 lambda / (mu^2 n^2))); complex when
// 4 lambda > mu^2 n^2. rho_plus is the slow branch.
struct QuadraticRoots {
    Complex rho_minus;
    Complex rho_plus;
};
QuadraticRoots viscoelastic_roots(double lambda, double mu, int n);

// Adiabatic reduction: roots of the alpha equation with sigma_r in place of
// lambda, plus the temperature-recovery coefficient b(t) = b_coeff * alpha(t)
// where b_coeff = -(zeta . M nu) (pass the coupling zeta . M nu).
struct AdiabaticAmplitude {
    QuadraticRoots roots;
    double b_coeff = 0.0;
};
AdiabaticAmplitude adiabatic_amplitude(double sigma_r, double mu, int n, double coupling = 0.0);

}  // namespace oscilab::amplitude
