// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0
//
// Constitutive-law constructors: nonmonotone stress laws built by transporting
// a base profile between phase windows so the two-phase interface identities
// hold exactly, viscoplastic and pressure variants, shear-reducible stored
// energies, rank-one convexity checks and the twinning-lemma certification.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "oscilab/core.hpp"

namespace oscilab::materials {

// C1 scalar profile (value + derivative).
struct ScalarC1 {
    std::function<double(double)> f;
    std::function<double(double)> df;

    static ScalarC1 linear(double slope = 1.0, double intercept = 0.0);
    static ScalarC1 constant(double c);
};

// C2 scalar profile.
struct ScalarC2 {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> d2f;
};

// Two positive phase states with 0 < a and 2a < b.
struct PhasePair {
    double a = 1.0;
    double b = 3.0;
    void validate() const;
};

enum class LawKind { sigma, phi, pressure, tau };

// Piecewise-C1 scalar law on a closed domain. Laws built by the window
// constructors satisfy their defining identity exactly by construction.
class MaterialLaw {
public:
    struct Piece {
        double lo = 0.0, hi = 0.0;
        std::function<double(double)> f, df;
    };

    MaterialLaw() = default;
    MaterialLaw(LawKind kind, PhasePair pair, double exponent, std::vector<Piece> pieces);

    LawKind kind() const { return kind_; }
    const PhasePair& pair() const { return pair_; }
    double exponent() const { return exponent_; }
    double lo() const { return pieces_.front().lo; }
    double hi() const { return pieces_.back().hi; }

    double value(double u) const;
    double derivative(double u) const;

    // Kind-specific identity residual on a grid of the tau window [1,2]:
    //   sigma:    max |s(ta) - s(tb)|
    //   phi:      max |p(ta) - p(tb) (b/a)^q|
    //   pressure: max |p(1/(a t)) - p(1/(b t))|
    //   tau:      max(0, -min value) over the domain (positivity)
    double constraint_residual(int grid_pts = 101) const;

    // Max relative mismatch between derivative() and a central difference of
    // value(), sampled inside each piece.
    double derivative_consistency(int per_piece = 25) const;

    // Positions where the second derivative may jump.
    std::vector<double> breakpoints() const;

    std::string to_json_string() const;
    static MaterialLaw from_json_string(const std::string& text);

private:
    const Piece& find(double u) const;

    LawKind kind_ = LawKind::sigma;
    PhasePair pair_;
    double exponent_ = 0.0;
    std::vector<Piece> pieces_;
};

// sigma on [a/2, 3b]: equals base on [a,2a]; sigma(u) = base(u a/b) on [b,2b];
// C1 cubic Hermite bridge on (2a,b); linear C1 extensions outside.
MaterialLaw build_sigma(const PhasePair& pair, const ScalarC1& base);

// phi > 0 with phi(tau a) = phi(tau b) (b/a)^q; the bridge interpolates in log
// space so the law stays positive.
MaterialLaw build_phi(const PhasePair& pair, double exponent, const ScalarC1& base);

// pressure with p(1/(a t)) = p(1/(b t)): base lives on [1/(2a), 1/a] and is
// transported to [1/(2b), 1/b] by p(r) = base(r b/a).
MaterialLaw build_pressure(const PhasePair& pair, const ScalarC1& base);

// Wrap a single callable as a law on [lo, hi] (negative controls, custom tau).
MaterialLaw law_from_callable(LawKind kind, const PhasePair& pair, double lo, double hi,
                              const ScalarC1& profile, double exponent = 0.0);

// Common total stress mu/t + sigma(a t) and the interface mismatch
// |sigma(a t) - sigma(b t)|. t must lie in [1,2].
struct CommonStress {
    double value = 0.0;
    double mismatch = 0.0;
};
CommonStress common_stress(const PhasePair& pair, const MaterialLaw& sigma, double mu, double t);

// ---------------------------------------------------------------------------
// Stored energies
// ---------------------------------------------------------------------------

class StoredEnergy {
public:
    int dim = 2;
    std::function<double(const Mat&)> value;
    std::function<Mat(const Mat&)> first_derivative;  // dW/dF
    // H(F, nu)_{ij} = sum_{a,b} W_{ia,jb}(F) nu_a nu_b
    std::function<Mat(const Mat&, const Vec&)> acoustic;
    // s-values in (0,1) where the integrand along F(s) = F_start + s * F_dir
    // loses smoothness (empty for globally smooth energies).
    std::function<std::vector<double>(const Mat&, const Mat&)> segment_breaks;

    double fd_first_derivative_error(const Mat& F) const;
    double fd_quadratic_form_error(const Mat& F, const Vec& xi, const Vec& nu) const;
};

// W(F) = h(xi . F nu_hat) + (c/2) |F|^2 with fixed unit vectors.
StoredEnergy shear_energy(const ScalarC2& h, const Vec& xi_dir, const Vec& nu_hat,
                          double quad_coeff = 0.0);

// Convex quadratic W(F) = (c/2)|F|^2 (negative control for condition (C)).
StoredEnergy quadratic_energy(int d, double c);

// Deformation pair for the twinning constructions: F± = F0 + {a,b} (x) nu.
struct TwinningPair {
    Mat F0;
    Vec a_vec, b_vec;
    Vec nu;  // |nu| = 1
    void validate() const;
};

// Shear-reducible energy whose h' is built by window transport with the offset
// -(|b - a|), so condition (C) holds for the pair on t in [1,2]. Requires
// b_vec - a_vec nonzero; base profile is h' on the minus window.
StoredEnergy make_condition_C_energy(const TwinningPair& pair, const ScalarC1& base,
                                     double quad_coeff = 0.0);

// Max over t_grid (subset of [1,2]) of |(dW/dF(tF+) - dW/dF(tF-)) nu + (b-a)|.
double condition_C_residual(const StoredEnergy& W, const TwinningPair& pair,
                            const std::vector<double>& t_grid);

// Rank-one quadratic form xi . H(F, nu) xi.
double roc_quadratic_form(const StoredEnergy& W, const Mat& F, const Vec& xi, const Vec& nu);

struct LemmaReport {
    double precondition_residual = 0.0;  // condition (C) residual at t
    double identity_residual = 0.0;      // |t M_int (b-a) + (b-a)|
    double rayleigh = 0.0;               // (b-a) . M_int (b-a) / |b-a|^2, equals -1/t
    bool roc_violated = false;
};

// Certifies that condition (C) forces failure of rank-one convexity on the
// segment: integrates the acoustic form of D^2 W along s in [0,1] with
// Gauss-Legendre and checks t M_int (b-a) = -(b-a). Throws if the condition
// (C) precondition fails at t (residual >= 1e-8).
LemmaReport lemma_contradiction_check(const StoredEnergy& W, const TwinningPair& pair, double t);

}  // namespace oscilab::materials
