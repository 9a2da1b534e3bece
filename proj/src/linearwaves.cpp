// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0

#include "oscilab/linearwaves.hpp"

#include <cmath>

namespace oscilab::linearwaves {

namespace {

const Complex I(0.0, 1.0);

Complex phase(int n, double s) { return std::exp(I * (n * s)); }

}  // namespace

Complex WaveField::u(double t, double x) const {
    return (a0 / n) * std::exp(rho * t) * phase(n, x);
}

Complex WaveField::theta1d(double t, double x) const {
    return -I * b0 * std::exp(rho * t) * phase(n, x);
}

Complex WaveField::u_k(double t, const Vec& x, int k) const {
    return (a0 / n) * zeta[k] * std::exp(rho * t) * phase(n, nu.dot(x));
}

Complex WaveField::theta(double t, const Vec& x) const {
    return -I * b0 * std::exp(rho * t) * phase(n, nu.dot(x));
}

double WaveField::amplitude(Quantity q, double t) const {
    const double decay = std::exp(rho * t);
    const double polar = (d == 1) ? 1.0 : zeta.norm();
    switch (q) {
        case Quantity::u: return std::fabs(a0) / n * polar * decay;
        case Quantity::v: return std::fabs(rho * a0) / n * polar * decay;
        case Quantity::w: return std::fabs(a0) * polar * decay;
        case Quantity::v_x: return std::fabs(rho * a0) * polar * decay;
        case Quantity::theta: return std::fabs(b0) * decay;
        case Quantity::theta_xx: return std::fabs(b0) * n * static_cast<double>(n) * decay;
    }
    return 0.0;
}

WaveField wave_1d(const LinearTVParams& p, Branch branch, double init_scale) {
    p.validate();
    auto cubic = dispersion::characteristic_cubic(p);
    auto roots = dispersion::solve_cubic(cubic);
    const Complex rho_c = roots.roots[static_cast<std::size_t>(branch)];
    if (rho_c.imag() != 0.0)
        throw std::invalid_argument("wave_1d: requested branch has a complex root");
    const double rho = rho_c.real();

    Vec xi = dispersion::amplitude_eigenvector(p, rho, p.mu * init_scale);
    WaveField f;
    f.system = WaveSystem::tve1d;
    f.branch = branch;
    f.n = p.n;
    f.d = 1;
    f.rho = rho;
    f.a0 = xi[0];
    f.b0 = xi[2];
    f.zeta = Vec(1.0, 0.0);
    f.params_1d = p;
    return f;
}

WaveField wave_multid(const ElasticSystem& sys, const Vec& nu, int r, int n) {
    sys.validate();
    if (r < 0 || r >= sys.d) throw std::invalid_argument("wave_multid: branch index out of range");
    auto rep = dispersion::check_hypotheses(sys, nu);
    if (!rep.h1 || !rep.h2) throw std::invalid_argument("wave_multid: H1/H2 violated");
    bool matched = false;
    double m_r = 0.0;
    for (auto [idx, m] : rep.h3_matches)
        if (idx == r) {
            matched = true;
            m_r = m;
        }
    if (!matched) throw std::invalid_argument("wave_multid: H3 violated for the requested branch");

    const double lambda_r = rep.q_eigenvalues[static_cast<std::size_t>(r)];
    // Inside a degenerate eigenspace that contains M nu, align the polarization
    // with M nu so the reduced coupling m^r is exact.
    Vec xi_r = rep.q_eigenvectors[static_cast<std::size_t>(r)];
    const Vec Mnu = sys.M * nu;
    if (Mnu.norm() > 0.0 && std::fabs(std::fabs(m_r) - Mnu.norm()) > 1e-12 * Mnu.norm()) {
        int count = 0;
        for (auto [idx, m] : rep.h3_matches) {
            (void)m;
            if (std::fabs(rep.q_eigenvalues[static_cast<std::size_t>(idx)] - lambda_r) <= 1e-9)
                ++count;
        }
        if (count > 1) {
            xi_r = Mnu.normalized();
            m_r = xi_r.dot(Mnu);
        }
    }

    LinearTVParams reduced;
    reduced.lambda = lambda_r;
    reduced.m = m_r;
    reduced.mu = sys.mu;
    reduced.kappa = sys.kappa;
    reduced.n = n;
    WaveField base = wave_1d(reduced, Branch::slow);

    WaveField f = base;
    f.system = WaveSystem::multid;
    f.d = sys.d;
    f.nu = nu.normalized();
    f.zeta = xi_r;
    f.sys = sys;
    f.has_sys = true;
    return f;
}

WaveField wave_adiabatic(const ElasticSystem& sys, const Vec& nu, int r, int n) {
    sys.validate();
    if (sys.kappa != 0.0) throw std::invalid_argument("wave_adiabatic: kappa must be 0");
    if (r < 0 || r >= sys.d)
        throw std::invalid_argument("wave_adiabatic: branch index out of range");
    auto mod = dispersion::modified_acoustic_tensor(sys, nu);
    for (double s : mod.eig.values)
        if (!(s > 0.0)) throw std::invalid_argument("wave_adiabatic: Q^m not positive definite");
    const double sigma_r = mod.eig.values[static_cast<std::size_t>(r)];
    const Vec zeta = mod.eig.vectors[static_cast<std::size_t>(r)];
    const double coupling = zeta.dot(sys.M * nu);

    auto ad = amplitude::adiabatic_amplitude(sigma_r, sys.mu, n, coupling);
    if (ad.roots.rho_plus.imag() != 0.0)
        throw std::invalid_argument("wave_adiabatic: slow root is complex at this n");

    WaveField f;
    f.system = WaveSystem::adiabatic;
    f.branch = Branch::slow;
    f.n = n;
    f.d = sys.d;
    f.nu = nu.normalized();
    f.rho = ad.roots.rho_plus.real();
    f.a0 = sys.mu;                 // alpha(0) = mu, matching the 1-d normalization
    f.b0 = ad.b_coeff * f.a0;      // b(t) = -(zeta . M nu) alpha(t)
    f.zeta = zeta;
    f.sys = sys;
    f.has_sys = true;
    f.params_1d = LinearTVParams{sigma_r, 0.0, sys.mu, 0.0, n};
    return f;
}

namespace {

// centered stencils on a complex-valued function of (t, x in R^d)
struct Stencil {
    double ht, hx;

    template <typename F>
    Complex d_t(F f, double t) const {
        return (f(t + ht) - f(t - ht)) / (2.0 * ht);
    }
    template <typename F>
    Complex d_tt(F f, double t) const {
        return (f(t + ht) - 2.0 * f(t) + f(t - ht)) / (ht * ht);
    }
};

double residual_1d(const WaveField& f, double h_t, double h_x) {
    const auto& p = f.params_1d;
    auto U = [&](double t, double x) { return f.u(t, x); };
    auto TH = [&](double t, double x) { return f.theta1d(t, x); };

    double worst = 0.0;
    const double ts[] = {0.15, 0.45, 0.75};
    const int nx = 7;
    for (double t : ts)
        for (int ix = 0; ix < nx; ++ix) {
            double x = 2.0 * M_PI * ix / nx + 0.1;
            auto u_tt = (U(t + h_t, x) - 2.0 * U(t, x) + U(t - h_t, x)) / (h_t * h_t);
            auto u_xx = (U(t, x + h_x) - 2.0 * U(t, x) + U(t, x - h_x)) / (h_x * h_x);
            auto th_x = (TH(t, x + h_x) - TH(t, x - h_x)) / (2.0 * h_x);
            auto u_xx_p = (U(t + h_t, x + h_x) - 2.0 * U(t + h_t, x) + U(t + h_t, x - h_x)) / (h_x * h_x);
            auto u_xx_m = (U(t - h_t, x + h_x) - 2.0 * U(t - h_t, x) + U(t - h_t, x - h_x)) / (h_x * h_x);
            auto u_txx = (u_xx_p - u_xx_m) / (2.0 * h_t);
            Complex r1 = u_tt - p.lambda * u_xx - p.m * th_x - p.mu * u_txx;

            auto th_t = (TH(t + h_t, x) - TH(t - h_t, x)) / (2.0 * h_t);
            auto th_xx = (TH(t, x + h_x) - 2.0 * TH(t, x) + TH(t, x - h_x)) / (h_x * h_x);
            auto u_x_p = (U(t + h_t, x + h_x) - U(t + h_t, x - h_x)) / (2.0 * h_x);
            auto u_x_m = (U(t - h_t, x + h_x) - U(t - h_t, x - h_x)) / (2.0 * h_x);
            auto u_tx = (u_x_p - u_x_m) / (2.0 * h_t);
            Complex r2 = th_t - p.kappa * th_xx - p.m * u_tx;

            worst = std::max({worst, std::abs(r1), std::abs(r2)});
        }
    return worst;
}

double residual_multid(const WaveField& f, double h_t, double h_x) {
    const auto& sys = f.sys;
    const int d = sys.d;

    auto U = [&](double t, const Vec& x, int k) { return f.u_k(t, x, k); };
    auto TH = [&](double t, const Vec& x) { return f.theta(t, x); };
    auto shifted = [&](const Vec& x, int a, double h) {
        Vec y = x;
        y[a] += h;
        return y;
    };

    auto lap_u = [&](double t, const Vec& x, int k) {
        Complex s = 0.0;
        for (int a = 0; a < d; ++a)
            s += (U(t, shifted(x, a, h_x), k) - 2.0 * U(t, x, k) + U(t, shifted(x, a, -h_x), k)) /
                 (h_x * h_x);
        return s;
    };
    auto dab_u = [&](double t, const Vec& x, int l, int a, int b) {
        if (a == b)
            return (U(t, shifted(x, a, h_x), l) - 2.0 * U(t, x, l) + U(t, shifted(x, a, -h_x), l)) /
                   (h_x * h_x);
        Vec pp = shifted(shifted(x, a, h_x), b, h_x), pm = shifted(shifted(x, a, h_x), b, -h_x);
        Vec mp = shifted(shifted(x, a, -h_x), b, h_x), mm = shifted(shifted(x, a, -h_x), b, -h_x);
        return (U(t, pp, l) - U(t, pm, l) - U(t, mp, l) + U(t, mm, l)) / (4.0 * h_x * h_x);
    };

    double worst = 0.0;
    const double ts[] = {0.2, 0.6};
    std::vector<Vec> xs;
    for (int i = 0; i < 4; ++i) {
        Vec x(d);
        for (int a = 0; a < d; ++a) x[a] = 0.37 + 1.13 * i + 0.29 * a;
        xs.push_back(x);
    }

    for (double t : ts)
        for (const Vec& x : xs) {
            for (int k = 0; k < d; ++k) {
                Complex u_tt =
                    (U(t + h_t, x, k) - 2.0 * U(t, x, k) + U(t - h_t, x, k)) / (h_t * h_t);
                Complex elastic = 0.0;
                for (int l = 0; l < d; ++l)
                    for (int a = 0; a < d; ++a)
                        for (int b = 0; b < d; ++b) elastic += sys.A(k, l, a, b) * dab_u(t, x, l, a, b);
                Complex coupling = 0.0;
                for (int a = 0; a < d; ++a)
                    coupling += sys.M(k, a) *
                                (TH(t, shifted(x, a, h_x)) - TH(t, shifted(x, a, -h_x))) / (2.0 * h_x);
                Complex visc = (lap_u(t + h_t, x, k) - lap_u(t - h_t, x, k)) / (2.0 * h_t);
                Complex r1 = u_tt - elastic - coupling - sys.mu * visc;
                worst = std::max(worst, std::abs(r1));
            }
            Complex th_t = (TH(t + h_t, x) - TH(t - h_t, x)) / (2.0 * h_t);
            Complex lap_th = 0.0;
            for (int a = 0; a < d; ++a)
                lap_th += (TH(t, shifted(x, a, h_x)) - 2.0 * TH(t, x) + TH(t, shifted(x, a, -h_x))) /
                          (h_x * h_x);
            Complex coupl = 0.0;
            for (int k = 0; k < d; ++k)
                for (int a = 0; a < d; ++a) {
                    Complex u_x_p = (U(t + h_t, shifted(x, a, h_x), k) -
                                     U(t + h_t, shifted(x, a, -h_x), k)) /
                                    (2.0 * h_x);
                    Complex u_x_m = (U(t - h_t, shifted(x, a, h_x), k) -
                                     U(t - h_t, shifted(x, a, -h_x), k)) /
                                    (2.0 * h_x);
                    coupl += sys.M(k, a) * (u_x_p - u_x_m) / (2.0 * h_t);
                }
            Complex r2 = th_t - sys.kappa * lap_th - coupl;
            worst = std::max(worst, std::abs(r2));
        }
    return worst;
}

}  // namespace

double pde_residual(const WaveField& f, double h_t, double h_x) {
    if (f.d == 1) return residual_1d(f, h_t, h_x);
    if (!f.has_sys) throw std::invalid_argument("pde_residual: multid field lacks system data");
    return residual_multid(f, h_t, h_x);
}

PersistenceTable persistence_metric(const std::function<WaveField(int)>& make_field, Quantity q,
                                    const std::vector<int>& n_list) {
    PersistenceTable tab;
    tab.quantity = q;
    std::vector<double> ns, a0s, a1s;
    for (int n : n_list) {
        WaveField f = make_field(n);
        PersistenceRow row;
        row.n = n;
        row.amp_t0 = f.amplitude(q, 0.0);
        row.amp_t1 = f.amplitude(q, 1.0);
        tab.rows.push_back(row);
        ns.push_back(static_cast<double>(n));
        a0s.push_back(row.amp_t0);
        a1s.push_back(row.amp_t1);
    }
    tab.slope_t0 = loglog_slope(ns, a0s);
    tab.slope_t1 = loglog_slope(ns, a1s);
    return tab;
}

}  // namespace oscilab::linearwaves
