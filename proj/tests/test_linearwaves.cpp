// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oscilab/linearwaves.hpp"

using namespace oscilab;
using namespace oscilab::linearwaves;
using dispersion::ElasticSystem;
using dispersion::LinearTVParams;

namespace {

ElasticSystem isotropic_system(int d, double lam, double m_coupling, double mu, double kappa) {
    ElasticSystem sys;
    sys.d = d;
    sys.A = Tensor4::isotropic(d, lam);
    sys.M = m_coupling * Mat::identity(d);
    sys.mu = mu;
    sys.kappa = kappa;
    return sys;
}

}  // namespace

TEST_CASE("wave_1d slow branch: decoupling, amplitudes and time decay") {
    // m = 0: temperature identically zero, viscoelastic wave
    {
        LinearTVParams p{1.0, 0.0, 2.0, 1.0, 8};
        auto f = wave_1d(p, Branch::slow);
        CHECK(std::abs(f.theta1d(0.3, 1.1)) == 0.0);
        auto roots = amplitude::viscoelastic_roots(p.lambda, p.mu, p.n);
        CHECK(f.rho == doctest::Approx(roots.rho_plus.real()).epsilon(1e-12));
    }

    LinearTVParams p{1.0, 1.0, 2.0, 1.0, 32};
    auto f = wave_1d(p, Branch::slow);
    // |u(0,.)| = mu/n, |w(0,.)| = mu with the (mu, -lambda, 0) normalization
    CHECK(f.amplitude(Quantity::u, 0.0) == doctest::Approx(p.mu / p.n).epsilon(1e-12));
    CHECK(f.amplitude(Quantity::w, 0.0) == doctest::Approx(p.mu).epsilon(1e-12));

    // time decay is exactly exponential with the exact slow root
    double ratio = f.amplitude(Quantity::w, 1.0) / f.amplitude(Quantity::w, 0.0);
    CHECK(std::fabs(ratio - std::exp(f.rho)) < 1e-6);
    CHECK(f.rho == doctest::Approx(-0.5).epsilon(2e-3));

    // requesting a complex branch is an error (small n makes fast pair complex)
    LinearTVParams tiny{10.0, 0.0, 0.5, 0.1, 1};
    CHECK_THROWS_AS(wave_1d(tiny, Branch::fast2), std::invalid_argument);
}

TEST_CASE("pde residual: exact wave is second-order clean, wrong pairing detected") {
    LinearTVParams p{1.0, 1.0, 2.0, 1.0, 4};
    auto f = wave_1d(p, Branch::slow);
    double r1 = pde_residual(f, 4e-3, 4e-3);
    double r2 = pde_residual(f, 2e-3, 2e-3);
    CHECK(r1 / r2 > 3.0);
    CHECK(r1 / r2 < 5.0);

    // zero field
    auto zero = f;
    zero.a0 = 0.0;
    zero.b0 = 0.0;
    CHECK(pde_residual(zero, 1e-3, 1e-3) == 0.0);

    // rho1 with the fast eigenvector: O(1) residual must be detected
    auto roots = dispersion::solve_cubic(dispersion::characteristic_cubic(p));
    Vec fast_vec = dispersion::amplitude_eigenvector(p, roots.roots[2].real(), p.mu);
    auto wrong = f;
    wrong.a0 = fast_vec[0];
    wrong.b0 = fast_vec[2];
    // keep rho = rho1 but the amplitudes of the fast branch
    double rw = pde_residual(wrong, 4e-3, 4e-3);
    CHECK(rw > 1.0);
}

TEST_CASE("wave_multid reduces to wave_1d for isotropic data") {
    auto sys = isotropic_system(2, 2.0, 1.0, 2.0, 1.0);
    Vec e1(1.0, 0.0);
    const int n = 8;
    auto fm = wave_multid(sys, e1, 0, n);

    LinearTVParams reduced{2.0, 1.0, 2.0, 1.0, n};
    auto f1 = wave_1d(reduced, Branch::slow);

    for (double t : {0.0, 0.4, 1.0})
        for (double x1 : {0.1, 0.7, 2.3}) {
            Vec x(x1, 0.55);
            auto um = fm.u_k(t, x, 0);
            auto u1 = f1.u(t, x1);
            CHECK(std::abs(um - u1) < 1e-12);
            CHECK(std::abs(fm.u_k(t, x, 1)) < 1e-12);  // polarization along e1
            CHECK(std::abs(fm.theta(t, x) - f1.theta1d(t, x1)) < 1e-12);
        }

    // multid PDE residual of the exact wave: second-order in the stencil
    double r1 = pde_residual(fm, 4e-3, 4e-3);
    double r2 = pde_residual(fm, 2e-3, 2e-3);
    CHECK(r1 / r2 > 3.0);
    CHECK(r1 / r2 < 5.0);
}

TEST_CASE("wave_multid gradient and temperature-Laplacian leading amplitudes") {
    auto sys = isotropic_system(2, 2.0, 1.0, 2.0, 1.0);
    Vec nu = Vec(0.6, 0.8);
    const int n = 64;
    auto f = wave_multid(sys, nu, 0, n);
    // grad u ~ i mu (zeta (x) nu): modulus of each component
    double w_amp = f.amplitude(Quantity::w, 0.0);
    CHECK(w_amp == doctest::Approx(sys.mu).epsilon(1e-2));
    // Delta theta -> m^r lambda^r / kappa with m^r = 1, lambda^r = 2
    double th_xx = f.amplitude(Quantity::theta_xx, 0.0);
    CHECK(th_xx == doctest::Approx(1.0 * 2.0 / 1.0).epsilon(2e-2));

    // H3 violated: M nu not parallel to any eigenvector of a generic anisotropic A
    ElasticSystem bad = sys;
    bad.A = Tensor4::from_symmetric_products(
        {{Mat::identity(2), Mat::identity(2)}});
    bad.A(0, 0, 0, 0) = 3.0;  // still H1-symmetric, anisotropic
    bad.M = Mat(2);
    bad.M(0, 0) = 1.0;
    bad.M(1, 0) = 2.0;  // M nu along (1,2) for nu = e1, eigenvectors are axes
    CHECK_THROWS_AS(wave_multid(bad, Vec(1.0, 0.0), 0, 4), std::invalid_argument);
}

TEST_CASE("adiabatic wave: leading-order temperature oscillation") {
    auto sys = isotropic_system(2, 1.0, 0.5, 2.0, 0.0);
    Vec e1(1.0, 0.0);

    // M = 0: pure viscoelastic wave, theta = 0
    auto sys0 = sys;
    sys0.M = Mat(2);
    auto f0 = wave_adiabatic(sys0, e1, 0, 8);
    CHECK(f0.amplitude(Quantity::theta, 0.0) == 0.0);

    // theta amplitude = |zeta . M nu| * alpha(0), independent of n
    std::vector<double> amps;
    for (int n : {8, 16, 32}) {
        auto f = wave_adiabatic(sys, e1, 1, n);  // branch 1 carries the M nu direction here
        amps.push_back(f.amplitude(Quantity::theta, 0.0) / f.a0);
    }
    for (double a : amps) CHECK(a == doctest::Approx(0.5).epsilon(1e-10));

    // kappa > 0 wave has theta = O(1/n^2); the adiabatic one stays O(1)
    auto sys_k = isotropic_system(2, 1.0, 0.5, 2.0, 1.0);
    double ratio8 = wave_adiabatic(sys, e1, 1, 8).amplitude(Quantity::theta, 0.0) /
                    wave_multid(sys_k, e1, 0, 8).amplitude(Quantity::theta, 0.0);
    double ratio32 = wave_adiabatic(sys, e1, 1, 32).amplitude(Quantity::theta, 0.0) /
                     wave_multid(sys_k, e1, 0, 32).amplitude(Quantity::theta, 0.0);
    CHECK(ratio32 / ratio8 == doctest::Approx(16.0).epsilon(0.15));

    // the adiabatic wave satisfies its PDE (stencil ratio check)
    auto fa = wave_adiabatic(sys, e1, 1, 8);
    double r1 = pde_residual(fa, 4e-3, 4e-3);
    double r2 = pde_residual(fa, 2e-3, 2e-3);
    CHECK(r1 / r2 > 3.0);
    CHECK(r1 / r2 < 5.0);
}

TEST_CASE("scaled pde residual stays bounded across n") {
    // with the stencil resolving the wavelength (h ~ 1/n), the residual scaled
    // by n^2 * strain amplitude is bounded uniformly in n
    LinearTVParams base{1.0, 1.0, 2.0, 1.0, 1};
    double first = 0.0;
    for (int n : {4, 8, 16, 32}) {
        LinearTVParams p = base;
        p.n = n;
        auto f = wave_1d(p, Branch::slow);
        double h = 0.2 / n;
        double scaled = pde_residual(f, h, h) /
                        (static_cast<double>(n) * n * f.amplitude(Quantity::w, 0.0));
        if (n == 4) first = scaled;
        CHECK(scaled <= 2.0 * first);
    }
}

TEST_CASE("persistence slopes across n") {
    LinearTVParams base{1.0, 1.0, 2.0, 1.0, 1};
    std::vector<int> ns{8, 16, 32, 64};
    auto make = [&](int n) {
        LinearTVParams p = base;
        p.n = n;
        return wave_1d(p, Branch::slow);
    };

    auto tu = persistence_metric(make, Quantity::u, ns);
    CHECK(std::fabs(tu.slope_t0 + 1.0) < 0.05);
    auto tv = persistence_metric(make, Quantity::v, ns);
    CHECK(std::fabs(tv.slope_t0 + 1.0) < 0.1);
    auto tw = persistence_metric(make, Quantity::w, ns);
    CHECK(std::fabs(tw.slope_t0) < 0.05);
    auto tvx = persistence_metric(make, Quantity::v_x, ns);
    CHECK(std::fabs(tvx.slope_t0) < 0.1);
    auto tth = persistence_metric(make, Quantity::theta, ns);
    CHECK(std::fabs(tth.slope_t0 + 2.0) < 0.1);

    // amplitudes at t = 1 obey the same slopes (uniform decay factor)
    CHECK(std::fabs(tu.slope_t1 + 1.0) < 0.1);
    CHECK(std::fabs(tw.slope_t1) < 0.1);

    // adiabatic theta slope is 0
    auto sys = isotropic_system(2, 1.0, 0.5, 2.0, 0.0);
    auto make_ad = [&](int n) { return wave_adiabatic(sys, Vec(1.0, 0.0), 1, n); };
    auto tad = persistence_metric(make_ad, Quantity::theta, ns);
    CHECK(std::fabs(tad.slope_t0) < 0.1);
}
