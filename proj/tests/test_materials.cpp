// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oscilab/materials.hpp"

using namespace oscilab;
using namespace oscilab::materials;

TEST_CASE("build_sigma transports the base profile between windows") {
    PhasePair pair{1.0, 3.0};
    auto sigma = build_sigma(pair, ScalarC1::linear(1.0));

    // on [a,2a] equals the base exactly
    for (double u : {1.0, 1.3, 1.7, 2.0}) CHECK(sigma.value(u) == u);
    // on [b,2b]: sigma(u) = u/3
    CHECK(sigma.value(4.5) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(sigma.value(1.5) == doctest::Approx(sigma.value(4.5)).epsilon(1e-15));
    // nonmonotone: decrease across the bridge
    CHECK(sigma.value(2.0) > sigma.value(3.0));

    // identity on the tau-grid to 1e-10 (exact by construction)
    CHECK(sigma.constraint_residual() < 1e-14);
    // C1 consistency
    CHECK(sigma.derivative_consistency() < 1e-6);

    // constant base: globally constant on windows and bridge
    auto flat = build_sigma(pair, ScalarC1::constant(2.5));
    for (double u : {1.0, 2.5, 3.7, 5.9}) CHECK(flat.value(u) == doctest::Approx(2.5));

    // overlapping windows rejected
    CHECK_THROWS_AS(build_sigma(PhasePair{1.0, 1.5}, ScalarC1::linear(1.0)),
                    std::invalid_argument);
    // evaluation outside the domain
    CHECK_THROWS_AS(sigma.value(100.0), std::domain_error);
}

TEST_CASE("common stress of the two phases") {
    PhasePair pair{1.0, 3.0};
    auto sigma = build_sigma(pair, ScalarC1::linear(1.0));
    auto c1 = common_stress(pair, sigma, 1.0, 1.0);
    CHECK(c1.value == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(c1.mismatch < 1e-14);
    auto c2 = common_stress(pair, sigma, 1.0, 2.0);
    CHECK(c2.value == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(c2.mismatch < 1e-14);

    // a monotone law violates the identity: mismatch is strictly positive
    auto mono = law_from_callable(LawKind::sigma, pair, 0.5, 9.0, ScalarC1::linear(1.0));
    CHECK(common_stress(pair, mono, 1.0, 1.5).mismatch > 1.0);

    CHECK_THROWS_AS(common_stress(pair, sigma, 1.0, 2.5), std::invalid_argument);
}

TEST_CASE("build_phi: multiplicative transport with positive bridge") {
    PhasePair pair{1.0, 3.0};
    auto phi = build_phi(pair, 1.0, ScalarC1::constant(3.0));
    CHECK(phi.value(1.5) == doctest::Approx(3.0));
    CHECK(phi.value(4.5) == doctest::Approx(1.0));
    CHECK(phi.value(1.5) == doctest::Approx(phi.value(4.5) * 3.0));
    CHECK(phi.constraint_residual() < 1e-12);

    // q = 0 reduces to the sigma semantics (ratio 1)
    auto phi0 = build_phi(pair, 0.0, ScalarC1::constant(3.0));
    CHECK(phi0.value(4.5) == doctest::Approx(3.0));

    // induced viscoplastic stress satisfies sigma(ta, a) = sigma(tb, b) on a fine grid
    auto phi1 = build_phi(pair, 1.5, ScalarC1::linear(0.5, 1.0));
    for (int i = 0; i <= 100; ++i) {
        double t = 1.0 + i / 100.0;
        double lhs = phi1.value(t * pair.a) * std::pow(pair.a, 1.5);
        double rhs = phi1.value(t * pair.b) * std::pow(pair.b, 1.5);
        CHECK(std::fabs(lhs - rhs) < 1e-12);
    }

    // positivity everywhere (log bridge)
    for (int i = 0; i <= 200; ++i) {
        double u = phi1.lo() + (phi1.hi() - phi1.lo()) * i / 200.0;
        CHECK(phi1.value(u) > 0.0);
    }

    CHECK_THROWS_AS(build_phi(pair, 1.0, ScalarC1::linear(1.0, -10.0)), std::invalid_argument);
}

TEST_CASE("build_pressure: reciprocal-window transport") {
    PhasePair pair{1.0, 3.0};
    auto p = build_pressure(pair, ScalarC1::linear(1.0));
    // base p(r) = r on [1/2, 1]; on [1/6, 1/3]: p(r) = 3r
    CHECK(p.value(0.25) == doctest::Approx(0.75).epsilon(1e-14));
    for (double t : {1.0, 1.4, 2.0})
        CHECK(p.value(1.0 / (pair.a * t)) ==
              doctest::Approx(p.value(1.0 / (pair.b * t))).epsilon(1e-14));
    CHECK(p.constraint_residual() < 1e-14);

    // constant base: globally constant
    auto flat = build_pressure(pair, ScalarC1::constant(0.7));
    CHECK(flat.value(0.2) == doctest::Approx(0.7));
    CHECK(flat.value(0.9) == doctest::Approx(0.7));

    // negative control: monotone pressure violates the identity
    auto mono = law_from_callable(LawKind::pressure, pair, 0.05, 2.0, ScalarC1::linear(1.0));
    CHECK(mono.constraint_residual() > 0.1);
}

TEST_CASE("material law JSON round-trip") {
    PhasePair pair{1.0, 3.0};
    auto sigma = build_sigma(pair, ScalarC1::linear(1.0));
    auto text = sigma.to_json_string();
    auto back = MaterialLaw::from_json_string(text);
    CHECK(back.kind() == LawKind::sigma);
    CHECK(back.lo() == doctest::Approx(sigma.lo()));
    CHECK(back.hi() == doctest::Approx(sigma.hi()));
    // values agree on a fine grid (knots exact, in-between via Hermite)
    for (int i = 0; i <= 500; ++i) {
        double u = sigma.lo() + (sigma.hi() - sigma.lo()) * i / 500.0;
        CHECK(std::fabs(back.value(u) - sigma.value(u)) < 1e-8);
    }
    // the reconstructed law still satisfies the defining identity tightly
    CHECK(back.constraint_residual() < 1e-8);
}

TEST_CASE("shear energy derivatives are consistent") {
    ScalarC2 dw{[](double e) { return sq(e * e - 1.0); },
                [](double e) { return 4.0 * e * (e * e - 1.0); },
                [](double e) { return 12.0 * e * e - 4.0; }};
    Vec xi(1.0, 0.0), nu(0.0, 1.0);
    auto W = shear_energy(dw, xi, nu, 0.3);

    Mat F = Mat::identity(2);
    F(0, 1) = 0.4;
    F(1, 0) = -0.2;
    CHECK(W.fd_first_derivative_error(F) < 1e-6);
    CHECK(W.fd_quadratic_form_error(F, Vec(0.3, 0.7), Vec(0.6, 0.8)) < 1e-5);
}

TEST_CASE("roc quadratic form") {
    // convex quadratic: form = c |xi|^2 |nu|^2 > 0
    auto Wq = quadratic_energy(2, 1.0);
    Vec xi(1.0, 2.0), nu(0.5, -0.5);
    CHECK(roc_quadratic_form(Wq, Mat::identity(2), xi, nu) ==
          doctest::Approx(xi.dot(xi) * nu.dot(nu)).epsilon(1e-14));

    // double-well h(e) = (e^2-1)^2 at e = 0: h'' = -4, ROC fails
    ScalarC2 dw{[](double e) { return sq(e * e - 1.0); },
                [](double e) { return 4.0 * e * (e * e - 1.0); },
                [](double e) { return 12.0 * e * e - 4.0; }};
    Vec ex(1.0, 0.0), ey(0.0, 1.0);
    auto W = shear_energy(dw, ex, ey, 0.0);
    double form = roc_quadratic_form(W, Mat(2), ex, ey);
    CHECK(form == doctest::Approx(-4.0).epsilon(1e-14));

    // homogeneity degree 2 in each argument
    double f1 = roc_quadratic_form(W, Mat(2), 2.0 * ex, ey);
    double f2 = roc_quadratic_form(W, Mat(2), ex, 3.0 * ey);
    CHECK(f1 == doctest::Approx(4.0 * form));
    CHECK(f2 == doctest::Approx(9.0 * form));

    CHECK_THROWS_AS(roc_quadratic_form(W, Mat(2), Vec(2), ey), std::invalid_argument);
}

TEST_CASE("condition (C) residual for the transported shear energy") {
    Vec xi(1.0, 0.0), nu(0.0, 1.0);
    TwinningPair pair{Mat::identity(2), xi, 3.0 * xi, nu};
    auto W = make_condition_C_energy(pair, ScalarC1::linear(1.0));

    std::vector<double> grid;
    for (int i = 0; i < 33; ++i) grid.push_back(1.0 + i / 32.0);
    CHECK(condition_C_residual(W, pair, grid) < 1e-9);

    // quadratic stress cannot cancel the viscous jump: residual |b-a| |1 + c t|
    auto Wq = quadratic_energy(2, 0.5);
    double r = condition_C_residual(Wq, pair, {1.0});
    CHECK(r == doctest::Approx(2.0 * std::fabs(1.0 + 0.5)).epsilon(1e-12));

    // a_vec = b_vec: no jump, zero residual
    TwinningPair same{Mat::identity(2), xi, xi, nu};
    CHECK_THROWS_AS(same.validate(), std::invalid_argument);
}

TEST_CASE("twinning lemma certification") {
    Vec xi(1.0, 0.0), nu(0.0, 1.0);
    TwinningPair pair{Mat::identity(2), xi, 3.0 * xi, nu};
    auto W = make_condition_C_energy(pair, ScalarC1::linear(1.0));

    for (double t : {1.0, 1.5, 2.0}) {
        auto rep = lemma_contradiction_check(W, pair, t);
        CHECK(rep.precondition_residual < 1e-9);
        CHECK(rep.identity_residual < 1e-6);
        CHECK(rep.rayleigh == doctest::Approx(-1.0 / t).epsilon(1e-6));
        CHECK(rep.roc_violated);
    }

    // Rayleigh quotient <= -1/2 across the window certifies ROC failure
    for (int i = 0; i < 9; ++i) {
        double t = 1.0 + i / 8.0;
        auto rep = lemma_contradiction_check(W, pair, t);
        CHECK(rep.rayleigh <= -0.5 + 1e-6);
    }

    // convex energy: the gate refuses to certify
    auto Wq = quadratic_energy(2, 1.0);
    CHECK_THROWS_AS(lemma_contradiction_check(Wq, pair, 1.5), std::invalid_argument);
}

TEST_CASE("condition (C) energy with an offset baseline") {
    // exercise a nonzero e0 = xi . F0 nu and non-unit amplitudes
    Vec xi(1.0, 0.0), nu(0.0, 1.0);
    Mat F0 = Mat::identity(2);
    F0(0, 1) = 0.5;  // e0 = 0.5
    TwinningPair pair{F0, 0.7 * xi, 3.1 * xi, nu};  // e- = 1.2, e+ = 3.6
    auto W = make_condition_C_energy(pair, ScalarC1::linear(0.8, 0.3));
    std::vector<double> grid;
    for (int i = 0; i < 33; ++i) grid.push_back(1.0 + i / 32.0);
    CHECK(condition_C_residual(W, pair, grid) < 1e-9);
    auto rep = lemma_contradiction_check(W, pair, 1.25);
    CHECK(rep.rayleigh == doctest::Approx(-0.8).epsilon(1e-6));
}
