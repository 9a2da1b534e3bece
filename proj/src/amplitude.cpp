// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0

#include "oscilab/amplitude.hpp"

#include <cmath>

namespace oscilab::amplitude {

namespace {

struct State3 {
    double a, v, b;
};

State3 rhs(const LinearTVParams& p, const State3& s) {
    const double n2 = sq(static_cast<double>(p.n));
    return {s.v, -p.lambda * n2 * s.a - p.mu * n2 * s.v + p.m * n2 * s.b,
            -p.m * s.v - p.kappa * n2 * s.b};
}

State3 axpy(const State3& s, double h, const State3& d) {
    return {s.a + h * d.a, s.v + h * d.v, s.b + h * d.b};
}

// One trapezoidal step: solve (I - dt/2 A) x_{k+1} = (I + dt/2 A) x_k directly
// (3x3 system, A constant).
State3 trapezoidal_step(const Mat& A, const State3& s, double dt) {
    Mat L = Mat::identity(3) - 0.5 * dt * A;
    State3 r0 = {s.a, s.v, s.b};
    Mat R = Mat::identity(3) + 0.5 * dt * A;
    Vec rv = R * Vec(r0.a, r0.v, r0.b);
    // Gaussian elimination with partial pivoting on the 3x3 L.
    double m[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = L(i, j);
        m[i][3] = rv[i];
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
        std::swap(m[col], m[piv]);
        for (int r = col + 1; r < 3; ++r) {
            double f = m[r][col] / m[col][col];
            for (int j = col; j < 4; ++j) m[r][j] -= f * m[col][j];
        }
    }
    double x[3];
    for (int i = 2; i >= 0; --i) {
        double s2 = m[i][3];
        for (int j = i + 1; j < 3; ++j) s2 -= m[i][j] * x[j];
        x[i] = s2 / m[i][i];
    }
    return {x[0], x[1], x[2]};
}

}  // namespace

Trajectory integrate_amplitude(const LinearTVParams& p, const AmplitudeState& init, double t_end,
                               double dt, Integrator method) {
    p.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("integrate_amplitude: dt must be > 0");
    if (!(t_end > init.t)) throw std::invalid_argument("integrate_amplitude: t_end <= t0");
    const double n2 = sq(static_cast<double>(p.n));
    if (method == Integrator::rk4 && dt * (p.mu + p.kappa) * n2 > 0.5)
        throw std::invalid_argument(
            "integrate_amplitude: explicit stability guard dt*(mu+kappa)*n^2 <= 0.5 violated "
            "(use the trapezoidal integrator)");

    Trajectory traj;
    traj.dt = dt;
    traj.method = method;
    const auto steps = static_cast<std::size_t>(std::ceil((t_end - init.t) / dt - 1e-12));
    traj.samples.reserve(steps + 1);
    traj.samples.push_back(init);

    State3 s{init.a, init.v, init.b};
    double t = init.t;
    Mat A = dispersion::amplitude_matrix(p);
    for (std::size_t k = 0; k < steps; ++k) {
        double h = std::min(dt, t_end - t);
        if (method == Integrator::rk4) {
            State3 k1 = rhs(p, s);
            State3 k2 = rhs(p, axpy(s, 0.5 * h, k1));
            State3 k3 = rhs(p, axpy(s, 0.5 * h, k2));
            State3 k4 = rhs(p, axpy(s, h, k3));
            s = {s.a + h / 6.0 * (k1.a + 2 * k2.a + 2 * k3.a + k4.a),
                 s.v + h / 6.0 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v),
                 s.b + h / 6.0 * (k1.b + 2 * k2.b + 2 * k3.b + k4.b)};
        } else {
            s = trapezoidal_step(A, s, h);
        }
        t += h;
        traj.samples.push_back({s.a, s.v, s.b, t});
    }
    return traj;
}

double mode_energy(const AmplitudeState& s, const LinearTVParams& p) {
    const double n2 = sq(static_cast<double>(p.n));
    return 0.5 * s.v * s.v + 0.5 * p.lambda * n2 * s.a * s.a + 0.5 * n2 * s.b * s.b;
}

double energy_identity_residual(const Trajectory& traj, const LinearTVParams& p) {
    if (traj.samples.size() < 3)
        throw std::invalid_argument("energy_identity_residual: need >= 3 samples");
    const double n2 = sq(static_cast<double>(p.n));
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < traj.samples.size(); ++i) {
        const auto& sm = traj.samples[i - 1];
        const auto& s = traj.samples[i];
        const auto& sp = traj.samples[i + 1];
        const double h = sp.t - sm.t;
        const double dE = (mode_energy(sp, p) - mode_energy(sm, p)) / h;
        const double dissipation = p.mu * n2 * s.v * s.v + p.kappa * n2 * n2 * s.b * s.b;
        worst = std::max(worst, std::fabs(dE + dissipation));
    }
    return worst;
}

QuadraticRoots viscoelastic_roots(double lambda, double mu, int n) {
    if (!(lambda > 0.0) || !(mu > 0.0))
        throw std::invalid_argument("viscoelastic_roots: lambda, mu must be > 0");
    if (n < 1) throw std::invalid_argument("viscoelastic_roots: n must be >= 1");
    const double n2 = sq(static_cast<double>(n));
    const double half = 0.5 * mu * n2;
    const double disc = 1.0 - 4.0 * lambda / (mu * mu * n2);
    QuadraticRoots r;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        r.rho_plus = Complex(half * (-1.0 + s), 0.0);
        r.rho_minus = Complex(half * (-1.0 - s), 0.0);
    } else {
        const double s = std::sqrt(-disc);
        r.rho_plus = Complex(-half, half * s);
        r.rho_minus = Complex(-half, -half * s);
    }
    return r;
}

AdiabaticAmplitude adiabatic_amplitude(double sigma_r, double mu, int n, double coupling) {
    if (!(sigma_r > 0.0)) throw std::invalid_argument("adiabatic_amplitude: sigma_r must be > 0");
    AdiabaticAmplitude out;
    out.roots = viscoelastic_roots(sigma_r, mu, n);
    out.b_coeff = -coupling;
    return out;
}

}  // namespace oscilab::amplitude
