// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0
//
// Linear spectral analysis of the thermoviscoelastic mode system: characteristic
// cubics, Vieta identities, large-n root expansions, acoustic tensors and their
// eigenstructure, hypothesis checking.

#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "oscilab/core.hpp"

namespace oscilab::dispersion {

// Coefficients (lambda, m, mu, kappa) and mode number n of the linear system.
struct LinearTVParams {
    double lambda = 1.0;  // elastic modulus, > 0
    double m = 0.0;       // thermoelastic coupling
    double mu = 1.0;      // viscosity, > 0
    double kappa = 0.0;   // heat diffusivity, >= 0
    int n = 1;            // mode number, >= 1

    void validate() const;
};

// rho^3 + c2 rho^2 + c1 rho + c0
struct CubicCoeffs {
    double c2 = 0.0, c1 = 0.0, c0 = 0.0;
};

// Three roots sorted by descending real part; roots[0] is the slow branch.
struct RootTriple {
    std::array<Complex, 3> roots{};
};

CubicCoeffs characteristic_cubic(const LinearTVParams& p);

// Cardano/trigonometric solve with one guarded Newton polish per root; roots
// whose imaginary part is below 1e-10 * max(1,|rho|) are snapped to the real axis.
RootTriple solve_cubic(const CubicCoeffs& c);

// Relative residuals of the three Vieta identities (sum, pair sum, product).
std::array<double, 3> vieta_residual(const RootTriple& r, const CubicCoeffs& c);

// Truncations of the large-n expansions, computed from the order-by-order
// recursion in r = rho/n^2. order 0 gives (-lambda/mu, -kappa n^2, -mu n^2).
// Requires mu != kappa.
std::array<double, 3> asymptotic_roots(const LinearTVParams& p, int order);

// Recursion coefficients r^0..r^3 for one branch (r0 in {0, -kappa, -mu}).
std::array<double, 4> expansion_coefficients(const LinearTVParams& p, int branch);

// First-order eigenpair expansion of the slow branch.
struct EigExpansion {
    double r1 = 0.0, r2 = 0.0;  // rho1(n) = r1 + r2/n^2 + O(1/n^4)
    Vec xi0{0.0, 0.0, 0.0};     // (mu, -lambda, 0)
    Vec xi1{0.0, 0.0, 0.0};     // (-lambda/mu, m^2 lambda/(kappa mu), m lambda/kappa)
};
EigExpansion slow_eigen_expansion(const LinearTVParams& p);  // requires mu != kappa, kappa > 0

// The 3x3 amplitude system matrix A(n) acting on (a, v, b).
Mat amplitude_matrix(const LinearTVParams& p);

// Exact eigenvector of A(n) for a (real) root rho, scaled so the first
// component equals `first_component`.
Vec amplitude_eigenvector(const LinearTVParams& p, double rho, double first_component);

// ---------------------------------------------------------------------------
// Multi-dimensional elastic system
// ---------------------------------------------------------------------------

struct ElasticSystem {
    int d = 2;
    Tensor4 A;   // elastic tensor A_{klab}, H1-symmetric
    Mat M;       // thermoelastic coupling M_{ka}
    double mu = 1.0;
    double kappa = 0.0;

    void validate() const;  // throws if H1 violated beyond 1e-14 or mu <= 0 or kappa < 0
};

// Q_{kl} = A_{klab} nu_a nu_b; requires |nu| = 1 within 1e-12.
Mat acoustic_tensor(const ElasticSystem& sys, const Vec& nu);

// Orthonormal eigenpairs of a symmetric d x d matrix (d in {2,3}), eigenvalues
// ascending. Closed-form: direct 2x2, trigonometric 3x3. Throws on asymmetric
// input (tolerance 1e-12 * scale).
struct EigenPairs {
    std::vector<double> values;
    std::vector<Vec> vectors;
};
EigenPairs symmetric_eigen(const Mat& Q);

struct HypothesisReport {
    bool h1 = false;
    bool h2 = false;
    std::vector<double> q_eigenvalues;
    std::vector<Vec> q_eigenvectors;
    // H3 matches: (branch index r, coupling m_r = xi^r . (M nu)).
    std::vector<std::pair<int, double>> h3_matches;
    bool h3_any() const { return !h3_matches.empty(); }
};

// H2 via eigenvalues of Q; H3 per eigenvalue group: M nu must lie in the
// eigenspace within angle 1e-8 (M nu = 0 matches every branch with m_r = 0).
HypothesisReport check_hypotheses(const ElasticSystem& sys, const Vec& nu);

// Q^m = Q + (M nu) (x) (M nu) with its eigenpairs; requires H2 at nu.
struct ModifiedAcoustic {
    Mat Qm;
    EigenPairs eig;  // sigma^r ascending, zeta^r orthonormal
};
ModifiedAcoustic modified_acoustic_tensor(const ElasticSystem& sys, const Vec& nu);

}  // namespace oscilab::dispersion
