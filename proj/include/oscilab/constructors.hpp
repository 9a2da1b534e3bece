// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0
//
// Exact oscillating weak solutions: the two-phase bar and viscoplastic
// laminates, the adiabatic gas construction with its interface lemma, the
// time-dependent twinning solutions, the Lagrangian->Eulerian transform and
// the compressible Navier-Stokes oscillation, plus rescaled sequences, weak
// limits and Young measures.

#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "oscilab/core.hpp"
#include "oscilab/materials.hpp"

namespace oscilab::constructors {

using materials::MaterialLaw;
using materials::PhasePair;
using materials::StoredEnergy;
using materials::TwinningPair;

enum class SystemTag { bar, viscoplastic, gas, twinning, euler };

// Temperature history with its exact ODE derivative.
struct TemperatureTrajectory {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

struct FieldSample {
    int phase = 0;       // 0 = 'a' phase, 1 = 'b' phase
    double u = 0.0;      // strain (Lagrangian) or density (Eulerian)
    double v = 0.0;      // velocity
    double v_x = 0.0;    // strain rate (Lagrangian) or du/dy (Eulerian)
    double u_t = 0.0;    // time derivative of u (or rho)
    double theta = 0.0;  // temperature (gas systems)
    double theta_t = 0.0;
};

// One-dimensional piecewise periodic exact solution. Interfaces are kept as
// closed-form loci: a point is classified by exact arithmetic on x (Lagrangian)
// or y/t (Eulerian) modulo the cell; points exactly on an interface evaluate to
// the right-limit phase.
class PiecewisePeriodicSolution {
public:
    SystemTag tag = SystemTag::bar;
    double a = 1.0, b = 3.0;    // phase rates
    double fraction = 0.5;      // phase fraction in (0,1]; 1 = single phase
    int mode = 1;               // rescale index n >= 1
    double mu = 1.0;
    double exponent = 1.0;      // viscoplastic strain-rate exponent q
    std::optional<MaterialLaw> law;  // sigma | phi | pressure | tau
    TemperatureTrajectory thetaA, thetaB;  // gas only
    std::array<double, 2> time_window{1.0, 2.0};

    double v0() const { return fraction * a + (1.0 - fraction) * b; }  // c_theta
    bool lagrangian() const { return tag != SystemTag::euler; }
    bool has_temperature() const { return tag == SystemTag::gas; }

    FieldSample eval(double t, double z) const;
    // sigma(u)+ (mu/u) v_x | phi(u) v_x^q | theta tau(u) + (mu/u) v_x | -p(rho) + mu u_y
    double stress_of(const FieldSample& s) const;
    double total_stress(double t, double z) const { return stress_of(eval(t, z)); }
    double displacement(double t, double x) const;  // Lagrangian Y_n

    // interface bookkeeping: interface (k, which) sits at x = (k + which*fraction)/n
    // (Lagrangian) or y = t (k v0 + which*a*fraction)/n (Eulerian)
    double interface_position(long k, int which, double t) const;
    double interface_speed(long k, int which) const;
    FieldSample left_limit(long k, int which, double t) const;
    FieldSample right_limit(long k, int which, double t) const;
    // all interface positions inside [zlo, zhi] at time t
    std::vector<double> interface_positions(double t, double zlo, double zhi) const;
    // enumerate (k, which) pairs whose position lies in [zlo, zhi]
    std::vector<std::pair<long, int>> interfaces_in(double t, double zlo, double zhi) const;

    struct Loc {
        long cell = 0;
        int phase = 0;
        double local = 0.0;  // coordinate within the cell
    };
    Loc classify(double t, double z) const;
};

// --------------------------------------------------------------------------
// Lagrangian two-phase laminates
// --------------------------------------------------------------------------

// Exact weak solution of the viscoelastic bar from a sigma satisfying the
// two-phase stress identity (mismatch checked to < 1e-10 on a 33-point grid).
PiecewisePeriodicSolution bar_solution(const PhasePair& pair, double fraction,
                                       const MaterialLaw& sigma, double mu = 1.0);

// Same kinematics with viscoplastic stress phi(u) v_x^q; the induced interface
// identity phi(ta) a^q = phi(tb) b^q is checked to < 1e-10.
PiecewisePeriodicSolution viscoplastic_solution(const PhasePair& pair, double fraction,
                                                const MaterialLaw& phi, double exponent);

// u_n(t,x) = U(t, n x), v_n = V(t, n x)/n; an exact weak solution with period 1/n.
PiecewisePeriodicSolution rescale(const PiecewisePeriodicSolution& sol, int n);

// --------------------------------------------------------------------------
// Weak limits and Young measures
// --------------------------------------------------------------------------

struct YoungMeasure {
    struct Atom {
        double weight = 0.0;
        std::function<double(double)> support;  // support point as a function of t
    };
    std::vector<Atom> atoms;
    double weight_sum() const;
};

struct WeakLimits {
    std::function<double(double)> u_limit;      // c_theta t
    std::function<double(double)> v_limit;      // c_theta x
    double vx_limit = 0.0;                      // c_theta
    std::function<double(double)> sigma_limit;  // th sigma(at) + (1-th) sigma(bt)
    std::function<double(double)> theta_limit;  // gas: th thetaA + (1-th) thetaB
    YoungMeasure strain_measure;
};

WeakLimits weak_limits(const PhasePair& pair, double fraction,
                       const MaterialLaw* sigma = nullptr);
WeakLimits weak_limits(const PiecewisePeriodicSolution& sol);

// --------------------------------------------------------------------------
// Adiabatic gas (constitutive class psi = theta W(u) - (theta ln theta - theta))
// --------------------------------------------------------------------------

class GasConstitutive {
public:
    explicit GasConstitutive(MaterialLaw tau_law);

    const MaterialLaw& tau() const { return tau_; }
    double W(double u) const;  // cumulative integral of tau (reference point 1 when in domain)
    double psi(double u, double th) const;
    double sigma(double u, double th) const { return th * tau_.value(u); }
    double eta(double u, double th) const;
    double energy(double u, double th) const;  // psi + theta eta (= theta for this class)

    // max relative finite-difference residual of the three Maxwell relations
    double maxwell_residual(double u, double th) const;

    struct Hyperbolicity {
        double e_theta = 0.0, sigma_u = 0.0, eta_theta = 0.0;
        bool holds = false;
    };
    Hyperbolicity hyperbolicity_report(double u, double th) const;

private:
    MaterialLaw tau_;
    std::function<double(double)> W_;
};

// theta_bar(t; a, phi) from the closed form; the integral term is evaluated by
// adaptive Simpson to tol. Throws on nonpositive inputs.
double gas_uniform_extension_theta(const GasConstitutive& law, double rate, double phi0,
                                   double mu, double t, double tol = 1e-10);

// Dense trajectory of the closed form on [1,2] (cubic Hermite on a fine grid,
// derivative from the defining ODE).
TemperatureTrajectory gas_uniform_extension(const GasConstitutive& law, double rate, double phi0,
                                            double mu);

// RK4 reference integration of d theta/dt = rate tau(rate t) theta + mu rate/t.
TemperatureTrajectory gas_theta_rk4(const std::function<double(double)>& tau_at_rate_t,
                                    double rate, double phi0, double mu, double dt = 1e-3);

// Single-phase uniform extension as a certifiable gas solution (fraction = 1).
PiecewisePeriodicSolution uniform_extension_solution(double rate, double phi0,
                                                     const GasConstitutive& law, double mu);

struct GasInterface {
    MaterialLaw tau;  // extended onto [B, 2B] with a positive bridge
    TemperatureTrajectory thetaA, thetaB, theta_hat;
    double identity_residual = 0.0;  // max_t |tau(At) thetaA - tau(Bt) thetaB|
    double theta_hat_min = 0.0;
};

// Extends tau from [A,2A] to [B,2B] so that the interface identity
// tau(At) thetaA(t) = tau(Bt) thetaB(t) holds on [1,2]; thetaB re-solves the
// uniform-extension ODE with the extended tau as an independent consistency check.
GasInterface gas_interface_construct(double A, double B, double phiA, double phiB,
                                     const MaterialLaw& tau_on_A_window, double mu);

// Two-phase oscillating gas solution; throws if the interface residual of the
// supplied construction exceeds 1e-8.
PiecewisePeriodicSolution gas_oscillatory(double A, double B, double fraction,
                                          const GasInterface& iface, double mu);

// --------------------------------------------------------------------------
// Eulerian side
// --------------------------------------------------------------------------

struct EulerianFields {
    // evaluated by exact per-cell inversion of the Lagrangian flow map
    std::function<double(double, double)> rho;
    std::function<double(double, double)> u;
    PiecewisePeriodicSolution as_solution;  // direct-formula Euler solution
};

// Transforms a bar-type solution to Eulerian coordinates; the pressure of the
// returned Euler solution is p(r) = -sigma(1/r).
EulerianFields lagrangian_to_eulerian(const PiecewisePeriodicSolution& bar);

// u_n = y/t, rho_n piecewise 1/(ta), 1/(tb) on 1/n-scaled strips; requires the
// pressure to satisfy the two-phase identity to < 1e-10.
PiecewisePeriodicSolution ns_oscillatory(const PhasePair& pair, double fraction,
                                         const MaterialLaw& pressure, double mu, int n);

// --------------------------------------------------------------------------
// Multi-dimensional twinning
// --------------------------------------------------------------------------

// y(t,x) = (t F0 + F1) x; universal solution for every stored energy.
struct UniformShearMotion {
    Mat F0, F1;
    Vec y(double t, const Vec& x) const { return (t * F0 + F1) * x; }
    Vec v(const Vec& x) const { return F0 * x; }
    Mat gradient(double t) const { return t * F0 + F1; }
};
UniformShearMotion uniform_shear_motion(const Mat& F0, const Mat& F1);

class TwinningSolution {
public:
    int d = 2;
    bool dynamic = false;
    double fraction = 0.5;
    Mat F0;           // steady: F_minus; dynamic: baseline F0
    Vec a_vec, b_vec; // steady: a_vec = jump amplitude, b_vec unused
    Vec nu;
    StoredEnergy W;

    // phase indicator on s = x.nu: 0 on (k, k+fraction), 1 on the rest
    int phase_of(double s) const;
    Vec amplitude(int phase) const;  // gradient amplitude of the phase
    Vec profile(double s) const;     // continuous accumulated amplitude integral

    Vec y(double t, const Vec& x) const;
    Vec v(double t, const Vec& x) const;
    Mat grad_y(double t, const Vec& x) const;
    Mat grad_v(double t, const Vec& x) const;
    Mat total_stress(double t, const Vec& x) const;  // dW/dF(grad y) + grad v

    std::vector<double> interface_positions_s(double slo, double shi) const;
    struct SideStates {
        Mat F_left, F_right;
        Mat gradV_left, gradV_right;
        Vec v_left, v_right;
    };
    SideStates interface_states(double s0, double t) const;
};

// Steady elastic twin: v = 0, deformation gradient alternating between F_minus
// and F_minus + a (x) nu; requires vanishing traction jump (checked to 1e-8).
TwinningSolution twinning_steady(const Mat& F_minus, const Vec& a_vec, const Vec& nu,
                                 const StoredEnergy& W, double fraction = 0.5);

// Interlaced dynamic twinning solution; requires condition (C) on [1,2]
// (residual checked to < 1e-8 on a 33-point grid).
TwinningSolution twinning_dynamic(const Mat& F0, const Vec& a_vec, const Vec& b_vec, const Vec& nu,
                                  const StoredEnergy& W, double fraction = 0.5);

}  // namespace oscilab::constructors
