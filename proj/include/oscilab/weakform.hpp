// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0
//
// Generic certification of the constructed weak solutions: Rankine-Hugoniot
// residuals, weak-form residuals against compactly supported bump test
// functions with interface-split quadrature, interior classical residuals,
// entropy production, and weak-convergence rate measurement.
//
// Sign conventions: every conservation law is written q_t = d_x H and its weak
// residual against a test function phi supported in [1,2) x R is
//   R(phi) = int int (q phi_t - H phi_x) dt dx + int q(1,x) phi(1,x) dx,
// which vanishes for exact weak solutions. (For the Euler mass law, H = -rho u,
// so the residual reads int int (rho phi_t + rho u phi_y) + trace, matching the
// standard convention.)

#pragma once

#include <map>
#include <string>
#include <vector>

#include "oscilab/constructors.hpp"
#include "oscilab/core.hpp"

namespace oscilab::weakform {

using constructors::PiecewisePeriodicSolution;
using constructors::TwinningSolution;

// Standard mollifier bump, normalized to unit maximum:
// B(s) = exp(1 - 1/(1-s^2)) for |s| < 1, else 0.
double bump(double s);
double bump_derivative(double s);

// Product bump in (t, x); amp scales the whole function.
struct TestFunction {
    double t0 = 1.5, x0 = 0.0;
    double r_t = 0.2, r_x = 0.3;
    double amp = 1.0;

    double value(double t, double x) const;
    double d_t(double t, double x) const;
    double d_x(double t, double x) const;
};

// Product bump in (t, x in R^d).
struct TestFunctionND {
    double t0 = 1.5;
    Vec x0;
    double r_t = 0.2, r_x = 0.5;
    double amp = 1.0;

    double value(double t, const Vec& x) const;
    double d_t(double t, const Vec& x) const;
    double d_xi(int i, double t, const Vec& x) const;
};

// Deterministic seeded placement inside [1,2) x (-1,1).
std::vector<TestFunction> make_random_tests(int count, unsigned long long seed);
std::vector<TestFunctionND> make_random_tests_nd(int d, int count, unsigned long long seed);

// The transported test phi(t,y) = (1/n) phi0(t, y/n) used by the rescaling
// identity of the weak form.
TestFunction transported_test(const TestFunction& phi0, int n);

struct QuadratureSpec {
    int gauss_order = 8;        // points per panel per direction
    bool split_interfaces = true;
    int refinement = 4;         // target panel width = radius / 2^refinement
};

// One conservation law q_t = d_x H of the piecewise solution.
struct ConservationLaw {
    std::string name;
    std::function<double(double, double)> density;
    std::function<double(double, double)> flux;
};
std::vector<ConservationLaw> conservation_laws(const PiecewisePeriodicSolution& sol);

// Weak residual of one law against one test function.
double weak_residual_single(const PiecewisePeriodicSolution& sol, const ConservationLaw& law,
                            const TestFunction& phi, const QuadratureSpec& quad);

struct WeakReport {
    std::vector<std::string> law_names;
    std::vector<std::vector<double>> residuals;  // [law][test]
    double max_residual = 0.0;
};
WeakReport weak_residual(const PiecewisePeriodicSolution& sol,
                         const std::vector<TestFunction>& tests, const QuadratureSpec& quad);

// Rankine-Hugoniot residuals on a t-grid for one interface (k, which).
struct RHReport {
    std::vector<std::string> condition_names;
    std::vector<double> max_residuals;  // per condition, max over the t-grid
    double max_residual = 0.0;
};
RHReport rh_residual(const PiecewisePeriodicSolution& sol, long k, int which, int t_pts = 33);
RHReport rh_residual(const PiecewisePeriodicSolution& sol, int t_pts = 33);  // worst interface

// Max classical (strong-form) residual at phase-interior sample points,
// centered finite differences with interface-safe spacing.
double interior_residual(const PiecewisePeriodicSolution& sol);

// Entropy production identity for adiabatic gas solutions:
// d/dt eta(u,theta) = (mu/u) v_x^2 / theta inside phases; also reports the
// minimum of the (nonnegative) production term.
struct EntropyReport {
    double max_identity_residual = 0.0;
    double min_production = 0.0;
};
EntropyReport entropy_production(const PiecewisePeriodicSolution& gas_sol);

// ---------------------------------------------------------------------------
// Twinning (multi-d) certification
// ---------------------------------------------------------------------------

struct TwinningWeakReport {
    double max_momentum = 0.0;
    double max_kinematic = 0.0;
    double max_involution = 0.0;
    double max_residual = 0.0;
};
TwinningWeakReport weak_residual(const TwinningSolution& sol,
                                 const std::vector<TestFunctionND>& tests,
                                 const QuadratureSpec& quad);
RHReport rh_residual(const TwinningSolution& sol, int t_pts = 33);
double interior_residual(const TwinningSolution& sol);

// ---------------------------------------------------------------------------
// Certification bundle
// ---------------------------------------------------------------------------

struct Tolerances {
    double rh = 1e-10;
    double weak = 1e-6;
    double interior = 1e-8;
};

struct Certification {
    RHReport rh;
    double weak_max = 0.0;
    double interior_max = 0.0;
    Tolerances tol;
    bool rh_pass = false, weak_pass = false, interior_pass = false;
    bool pass() const { return rh_pass && weak_pass && interior_pass; }
};

Certification certify(const PiecewisePeriodicSolution& sol, const std::vector<TestFunction>& tests,
                      const QuadratureSpec& quad = {}, const Tolerances& tol = {});
Certification certify(const TwinningSolution& sol, const std::vector<TestFunctionND>& tests,
                      const QuadratureSpec& quad = {}, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Weak-convergence rates
// ---------------------------------------------------------------------------

struct RateReport {
    std::vector<int> n_list;
    std::map<std::string, std::vector<double>> gaps;   // weak gaps per quantity
    std::map<std::string, double> slopes;              // log-log slopes
    std::vector<double> v_l2_errors;                   // ||v_n - v_bar||_{L2(Q)}
    double v_l2_slope = 0.0;
};

// Weak gaps max over tests of |int (q_n - q_bar) phi| for the fields of the
// base solution (strain/density, v_x, temperature), plus the strong L2 rate of
// the velocity. Needs >= 3 mode values.
RateReport weak_convergence_rate(const PiecewisePeriodicSolution& base,
                                 const std::vector<int>& n_list,
                                 const std::vector<TestFunction>& tests,
                                 const QuadratureSpec& quad = {});

// Composition gap of the weak limit with the nonlinearity:
// sup over a t-grid of |th s(at) + (1-th) s(bt) - s(c_th t)| together with the
// weak-integral gap seen by a mass-normalized bump.
struct CompositionGap {
    double sup_gap = 0.0;
    double weak_gap = 0.0;
};
CompositionGap sigma_composition_gap(const PiecewisePeriodicSolution& bar_sol);

}  // namespace oscilab::weakform
