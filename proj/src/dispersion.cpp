// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0

#include "oscilab/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oscilab::dispersion {

void LinearTVParams::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("LinearTVParams: lambda must be > 0");
    if (!(mu > 0.0)) throw std::invalid_argument("LinearTVParams: mu must be > 0");
    if (!(kappa >= 0.0)) throw std::invalid_argument("LinearTVParams: kappa must be >= 0");
    if (n < 1) throw std::invalid_argument("LinearTVParams: n must be >= 1");
    if (!std::isfinite(lambda) || !std::isfinite(m) || !std::isfinite(mu) || !std::isfinite(kappa))
        throw std::invalid_argument("LinearTVParams: nonfinite coefficient");
}

CubicCoeffs characteristic_cubic(const LinearTVParams& p) {
    p.validate();
    double n2 = sq(static_cast<double>(p.n));
    CubicCoeffs c;
    c.c2 = (p.kappa + p.mu) * n2;
    c.c1 = p.kappa * p.mu * n2 * n2 + (p.lambda + p.m * p.m) * n2;
    c.c0 = p.kappa * p.lambda * n2 * n2;
    return c;
}

namespace {

Complex eval_cubic(const CubicCoeffs& c, Complex z) {
    return ((z + c.c2) * z + c.c1) * z + c.c0;
}
Complex eval_cubic_deriv(const CubicCoeffs& c, Complex z) {
    return (3.0 * z + 2.0 * c.c2) * z + c.c1;
}

}  // namespace

namespace {

double newton_polish_real(const CubicCoeffs& c, double z) {
    for (int it = 0; it < 12; ++it) {
        Complex d = eval_cubic_deriv(c, z);
        if (std::abs(d) < 1e-300) break;
        double step = (eval_cubic(c, z) / d).real();
        double cap = 0.25 * std::max(1.0, std::fabs(z));
        step = std::clamp(step, -cap, cap);
        z -= step;
        if (std::fabs(step) < 1e-16 * std::max(1.0, std::fabs(z))) break;
    }
    return z;
}

}  // namespace

RootTriple solve_cubic(const CubicCoeffs& c) {
    if (!std::isfinite(c.c2) || !std::isfinite(c.c1) || !std::isfinite(c.c0))
        throw std::invalid_argument("solve_cubic: nonfinite coefficients");

    // Depressed form t^3 + p t + q, rho = t - c2/3.
    const double shift = c.c2 / 3.0;
    const double p = c.c1 - c.c2 * c.c2 / 3.0;
    const double q = 2.0 * c.c2 * c.c2 * c.c2 / 27.0 - c.c2 * c.c1 / 3.0 + c.c0;

    const double scale = std::max({std::fabs(p), std::cbrt(std::fabs(q)), 1.0});
    const double disc = -4.0 * p * p * p - 27.0 * q * q;

    double seed;  // one robust real root to polish and deflate against
    bool three_real = false;
    if (std::fabs(p) < 1e-14 * scale && std::fabs(q) < 1e-14 * scale * scale * scale) {
        RootTriple out;  // triple root, exact
        out.roots = {Complex(-shift), Complex(-shift), Complex(-shift)};
        return out;
    } else if (disc > 0.0) {
        three_real = true;
        double r = 2.0 * std::sqrt(-p / 3.0);
        double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
        double phi = std::acos(arg) / 3.0;
        // pick the best-separated (largest magnitude) of the three candidates
        seed = r * std::cos(phi);
        for (int k = 1; k < 3; ++k) {
            double cand = r * std::cos(phi - 2.0 * M_PI * k / 3.0);
            if (std::fabs(cand) > std::fabs(seed)) seed = cand;
        }
    } else {
        double s = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
        seed = std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s);
    }

    const double r_big = newton_polish_real(c, seed - shift);

    // Deflate through the Vieta relations: the remaining pair solves
    // rho^2 + B rho + C with B = c2 + r_big, C = -c0 / r_big (or c1 - ... when
    // r_big is tiny).
    const double B = c.c2 + r_big;
    const double C = (std::fabs(r_big) > 1e-100) ? -c.c0 / r_big : c.c1 - r_big * B;
    const double qdisc = B * B - 4.0 * C;

    std::array<Complex, 3> roots;
    roots[0] = Complex(r_big, 0.0);
    if (qdisc >= 0.0 || three_real) {
        double sq = std::sqrt(std::max(0.0, qdisc));
        double t1 = (B >= 0.0) ? -0.5 * (B + sq) : -0.5 * (B - sq);
        double t2 = (std::fabs(t1) > 1e-300) ? C / t1 : -B - t1;
        roots[1] = Complex(newton_polish_real(c, t1), 0.0);
        roots[2] = Complex(newton_polish_real(c, t2), 0.0);
    } else {
        double re = -0.5 * B;
        double im = 0.5 * std::sqrt(-qdisc);
        roots[1] = Complex(re, im);
        roots[2] = Complex(re, -im);
        // one complex Newton step sharpens the pair
        for (int i = 1; i <= 2; ++i) {
            Complex z = roots[static_cast<std::size_t>(i)];
            for (int it = 0; it < 4; ++it) {
                Complex d = eval_cubic_deriv(c, z);
                if (std::abs(d) < 1e-300) break;
                z -= eval_cubic(c, z) / d;
            }
            roots[static_cast<std::size_t>(i)] = z;
        }
    }

    RootTriple out;
    for (int i = 0; i < 3; ++i) {
        Complex z = roots[static_cast<std::size_t>(i)];
        if (std::fabs(z.imag()) < 1e-10 * std::max(1.0, std::abs(z))) z = Complex(z.real(), 0.0);
        out.roots[static_cast<std::size_t>(i)] = z;
    }
    std::sort(out.roots.begin(), out.roots.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return out;
}

std::array<double, 3> vieta_residual(const RootTriple& r, const CubicCoeffs& c) {
    const Complex s1 = r.roots[0] + r.roots[1] + r.roots[2];
    const Complex s2 = r.roots[0] * r.roots[1] + r.roots[1] * r.roots[2] + r.roots[2] * r.roots[0];
    const Complex s3 = r.roots[0] * r.roots[1] * r.roots[2];
    return {std::abs(s1 + c.c2) / std::max(1.0, std::fabs(c.c2)),
            std::abs(s2 - c.c1) / std::max(1.0, std::fabs(c.c1)),
            std::abs(s3 + c.c0) / std::max(1.0, std::fabs(c.c0))};
}

std::array<double, 4> expansion_coefficients(const LinearTVParams& p, int branch) {
    p.validate();
    if (p.mu == p.kappa)
        throw std::invalid_argument("expansion_coefficients: degenerate expansion (mu == kappa)");
    if (branch < 0 || branch > 2) throw std::invalid_argument("expansion_coefficients: branch 0..2");

    const double lam = p.lambda, m2 = p.m * p.m, mu = p.mu, kap = p.kappa;
    const double r0 = (branch == 0) ? 0.0 : (branch == 1 ? -kap : -mu);
    const double D = 3.0 * r0 * r0 + 2.0 * (kap + mu) * r0 + kap * mu;
    if (std::fabs(D) < 1e-300)
        throw std::invalid_argument("expansion_coefficients: degenerate leading root");
    const double r1 = (-(lam + m2) * r0 - kap * lam) / D;
    const double r2 = (-3.0 * r0 * r1 * r1 - (kap + mu) * r1 * r1 - (lam + m2) * r1) / D;
    const double r3 =
        (-(6.0 * r0 * r1 * r2 + r1 * r1 * r1) - 2.0 * (kap + mu) * r1 * r2 - (lam + m2) * r2) / D;
    return {r0, r1, r2, r3};
}

std::array<double, 3> asymptotic_roots(const LinearTVParams& p, int order) {
    if (order < 0 || order > 2) throw std::invalid_argument("asymptotic_roots: order must be 0..2");
    const double n2 = sq(static_cast<double>(p.n));
    std::array<double, 3> out{};
    for (int b = 0; b < 3; ++b) {
        auto r = expansion_coefficients(p, b);
        double v;
        if (b == 0) {
            // rho1 = r1 + r2/n^2 + r3/n^4 (leading r0 vanishes)
            v = r[1];
            if (order >= 1) v += r[2] / n2;
            if (order >= 2) v += r[3] / (n2 * n2);
        } else {
            v = r[0] * n2;
            if (order >= 1) v += r[1];
            if (order >= 2) v += r[2] / n2;
        }
        out[static_cast<std::size_t>(b)] = v;
    }
    return out;
}

EigExpansion slow_eigen_expansion(const LinearTVParams& p) {
    p.validate();
    if (p.mu == p.kappa)
        throw std::invalid_argument("slow_eigen_expansion: degenerate expansion (mu == kappa)");
    if (p.kappa <= 0.0)
        throw std::invalid_argument("slow_eigen_expansion: kappa = 0 (use the adiabatic path)");
    EigExpansion e;
    auto r = expansion_coefficients(p, 0);
    e.r1 = r[1];
    e.r2 = r[2];
    e.xi0 = Vec(p.mu, -p.lambda, 0.0);
    e.xi1 = Vec(-p.lambda / p.mu, p.m * p.m * p.lambda / (p.kappa * p.mu),
                p.m * p.lambda / p.kappa);
    return e;
}

Mat amplitude_matrix(const LinearTVParams& p) {
    p.validate();
    const double n2 = sq(static_cast<double>(p.n));
    Mat A(3);
    A(0, 0) = 0.0;
    A(0, 1) = 1.0;
    A(0, 2) = 0.0;
    A(1, 0) = -p.lambda * n2;
    A(1, 1) = -p.mu * n2;
    A(1, 2) = p.m * n2;
    A(2, 0) = 0.0;
    A(2, 1) = -p.m;
    A(2, 2) = -p.kappa * n2;
    return A;
}

Vec amplitude_eigenvector(const LinearTVParams& p, double rho, double first_component) {
    p.validate();
    const double n2 = sq(static_cast<double>(p.n));
    const double denom = rho + p.kappa * n2;
    if (std::fabs(denom) < 1e-12 * std::max(1.0, std::fabs(rho))) {
        // rho = -kappa n^2 is a root only when m = 0: pure temperature mode.
        if (p.m != 0.0)
            throw std::invalid_argument("amplitude_eigenvector: degenerate temperature branch");
        return Vec(0.0, 0.0, 1.0);
    }
    Vec xi(1.0, rho, -p.m * rho / denom);
    xi *= first_component / xi[0];
    return xi;
}

// ---------------------------------------------------------------------------

void ElasticSystem::validate() const {
    if (d != 2 && d != 3) throw std::invalid_argument("ElasticSystem: d must be 2 or 3");
    if (A.dim() != d || M.dim() != d) throw std::invalid_argument("ElasticSystem: dim mismatch");
    if (!(mu > 0.0)) throw std::invalid_argument("ElasticSystem: mu must be > 0");
    if (!(kappa >= 0.0)) throw std::invalid_argument("ElasticSystem: kappa must be >= 0");
    if (A.max_h1_violation() > 1e-14)
        throw std::invalid_argument("ElasticSystem: H1 symmetry violated");
}

Mat acoustic_tensor(const ElasticSystem& sys, const Vec& nu) {
    sys.validate();
    if (std::fabs(nu.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("acoustic_tensor: nu must be a unit vector");
    Mat Q(sys.d);
    for (int k = 0; k < sys.d; ++k)
        for (int l = 0; l < sys.d; ++l) {
            double s = 0.0;
            for (int a = 0; a < sys.d; ++a)
                for (int b = 0; b < sys.d; ++b) s += sys.A(k, l, a, b) * nu[a] * nu[b];
            Q(k, l) = s;
        }
    return Q;
}

namespace {

EigenPairs eigen2(const Mat& Q) {
    EigenPairs e;
    const double a = Q(0, 0), b = Q(0, 1), c = Q(1, 1);
    const double tr = a + c;
    const double disc = std::sqrt(std::max(0.0, sq(a - c) + 4.0 * b * b));
    double l1 = 0.5 * (tr - disc), l2 = 0.5 * (tr + disc);
    Vec v1(2), v2(2);
    if (std::fabs(b) < 1e-300 * std::max(1.0, std::fabs(tr))) {
        if (a <= c) {
            v1 = Vec(1.0, 0.0);
            v2 = Vec(0.0, 1.0);
        } else {
            v1 = Vec(0.0, 1.0);
            v2 = Vec(1.0, 0.0);
        }
    } else {
        v1 = Vec(b, l1 - a).normalized();
        v2 = Vec(-v1[1], v1[0]);
    }
    e.values = {l1, l2};
    e.vectors = {v1, v2};
    return e;
}

Vec cross3(const Vec& a, const Vec& b) {
    return Vec(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

// Eigenvector for a known eigenvalue of a symmetric 3x3 via the largest cross
// product of rows of Q - lam I; falls back to an arbitrary complement on
// (near-)degenerate eigenvalues.
Vec eigvec3(const Mat& Q, double lam, const std::vector<Vec>& already) {
    Mat B = Q;
    for (int i = 0; i < 3; ++i) B(i, i) -= lam;
    Vec rows[3] = {Vec(B(0, 0), B(0, 1), B(0, 2)), Vec(B(1, 0), B(1, 1), B(1, 2)),
                   Vec(B(2, 0), B(2, 1), B(2, 2))};
    Vec best(3);
    double bn = -1.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            Vec c = cross3(rows[i], rows[j]);
            if (c.norm() > bn) {
                bn = c.norm();
                best = c;
            }
        }
    double scale = std::max(1.0, Q.frobenius_norm());
    if (bn > 1e-12 * scale * scale) {
        Vec v = best.normalized();
        // Gram-Schmidt against previously found vectors for near-degenerate clusters
        for (const Vec& u : already) v -= u.dot(v) * u;
        if (v.norm() > 1e-8) return v.normalized();
    }
    // degenerate: pick any unit vector orthogonal to the ones we have
    for (int axis = 0; axis < 3; ++axis) {
        Vec v = Vec::unit(3, axis);
        for (const Vec& u : already) v -= u.dot(v) * u;
        if (v.norm() > 1e-6) return v.normalized();
    }
    throw std::runtime_error("eigvec3: failed to build orthonormal basis");
}

EigenPairs eigen3(const Mat& Q) {
    EigenPairs e;
    const double q = (Q(0, 0) + Q(1, 1) + Q(2, 2)) / 3.0;
    Mat B = Q;
    for (int i = 0; i < 3; ++i) B(i, i) -= q;
    double p2 = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) p2 += sq(B(i, j));
    const double p = std::sqrt(p2 / 6.0);
    std::array<double, 3> lam{};
    if (p < 1e-14 * std::max(1.0, std::fabs(q))) {
        lam = {q, q, q};
        e.values = {q, q, q};
        e.vectors = {Vec::unit(3, 0), Vec::unit(3, 1), Vec::unit(3, 2)};
        return e;
    }
    Mat C = B * (1.0 / p);
    double detC = C(0, 0) * (C(1, 1) * C(2, 2) - C(1, 2) * C(2, 1)) -
                  C(0, 1) * (C(1, 0) * C(2, 2) - C(1, 2) * C(2, 0)) +
                  C(0, 2) * (C(1, 0) * C(2, 1) - C(1, 1) * C(2, 0));
    double r = std::clamp(detC / 2.0, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    lam[2] = q + 2.0 * p * std::cos(phi);
    lam[0] = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    lam[1] = 3.0 * q - lam[0] - lam[2];
    std::sort(lam.begin(), lam.end());
    // Extract eigenvectors in order of decreasing eigenvalue separation so that
    // degenerate pairs are completed orthogonally instead of from a rank-poor
    // nullspace extraction.
    std::array<int, 3> proc{0, 1, 2};
    auto sep = [&](int i) {
        double s = std::numeric_limits<double>::max();
        for (int j = 0; j < 3; ++j)
            if (j != i)
                s = std::min(s, std::fabs(lam[static_cast<std::size_t>(i)] -
                                          lam[static_cast<std::size_t>(j)]));
        return s;
    };
    std::sort(proc.begin(), proc.end(), [&](int i, int j) { return sep(i) > sep(j); });
    std::array<Vec, 3> vs{Vec(3), Vec(3), Vec(3)};
    std::vector<Vec> found;
    for (int i : proc) {
        Vec v = eigvec3(Q, lam[static_cast<std::size_t>(i)], found);
        vs[static_cast<std::size_t>(i)] = v;
        found.push_back(v);
    }
    // Rayleigh-quotient polish: second-order accurate in the eigenvector error,
    // which repairs the acos sensitivity near degenerate eigenvalues.
    std::array<double, 3> polished{};
    for (int i = 0; i < 3; ++i)
        polished[static_cast<std::size_t>(i)] =
            vs[static_cast<std::size_t>(i)].dot(Q * vs[static_cast<std::size_t>(i)]);
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return polished[static_cast<std::size_t>(i)] < polished[static_cast<std::size_t>(j)];
    });
    for (int i : order) {
        e.values.push_back(polished[static_cast<std::size_t>(i)]);
        e.vectors.push_back(vs[static_cast<std::size_t>(i)]);
    }
    return e;
}

}  // namespace

EigenPairs symmetric_eigen(const Mat& Q) {
    const int d = Q.dim();
    if (d != 2 && d != 3) throw std::invalid_argument("symmetric_eigen: d must be 2 or 3");
    if (Q.max_asymmetry() > 1e-12 * std::max(1.0, Q.frobenius_norm()))
        throw std::invalid_argument("symmetric_eigen: asymmetric input");
    return (d == 2) ? eigen2(Q) : eigen3(Q);
}

HypothesisReport check_hypotheses(const ElasticSystem& sys, const Vec& nu) {
    HypothesisReport rep;
    rep.h1 = sys.A.max_h1_violation() <= 1e-14;
    // report-style: an H1 violation is recorded, and the remaining hypotheses
    // are evaluated against the symmetric part
    ElasticSystem checked = sys;
    if (!rep.h1) checked.A = sys.A.h1_symmetrized();
    Mat Q = acoustic_tensor(checked, nu);
    EigenPairs eig = symmetric_eigen(Q);
    rep.q_eigenvalues = eig.values;
    rep.q_eigenvectors = eig.vectors;
    rep.h2 = true;
    for (double v : eig.values)
        if (!(v > 0.0)) rep.h2 = false;

    const Vec Mnu = sys.M * nu;
    const double mnorm = Mnu.norm();
    const double qscale = std::max(1.0, Q.frobenius_norm());

    if (mnorm == 0.0) {
        for (int r = 0; r < sys.d; ++r) rep.h3_matches.emplace_back(r, 0.0);
        return rep;
    }

    // Group (near-)equal eigenvalues; M nu must lie in an eigenspace.
    std::size_t i = 0;
    while (i < eig.values.size()) {
        std::size_t j = i;
        while (j + 1 < eig.values.size() &&
               std::fabs(eig.values[j + 1] - eig.values[i]) <= 1e-9 * qscale)
            ++j;
        Vec proj(sys.d);
        for (std::size_t k = i; k <= j; ++k) proj += eig.vectors[k].dot(Mnu) * eig.vectors[k];
        const Vec residual = Mnu - proj;
        // angle between M nu and the eigenspace
        if (residual.norm() <= 1e-8 * mnorm) {
            if (j > i && proj.norm() > 0.0) {
                // adapt the basis of a degenerate eigenspace so the first vector
                // is aligned with M nu; the remaining ones decouple (m = 0)
                Vec lead = proj.normalized();
                std::vector<Vec> adapted{lead};
                for (std::size_t k = i; k <= j && adapted.size() <= j - i; ++k) {
                    Vec w = eig.vectors[k];
                    for (const Vec& u : adapted) w -= u.dot(w) * u;
                    if (w.norm() > 1e-8) adapted.push_back(w.normalized());
                }
                for (std::size_t k = i; k <= j; ++k) rep.q_eigenvectors[k] = adapted[k - i];
                rep.h3_matches.emplace_back(static_cast<int>(i), lead.dot(Mnu));
                for (std::size_t k = i + 1; k <= j; ++k)
                    rep.h3_matches.emplace_back(static_cast<int>(k), 0.0);
            } else {
                for (std::size_t k = i; k <= j; ++k)
                    rep.h3_matches.emplace_back(static_cast<int>(k), eig.vectors[k].dot(Mnu));
            }
        }
        i = j + 1;
    }
    return rep;
}

ModifiedAcoustic modified_acoustic_tensor(const ElasticSystem& sys, const Vec& nu) {
    Mat Q = acoustic_tensor(sys, nu);
    EigenPairs qe = symmetric_eigen(Q);
    for (double v : qe.values)
        if (!(v > 0.0)) throw std::invalid_argument("modified_acoustic_tensor: H2 fails at nu");
    ModifiedAcoustic out;
    const Vec Mnu = sys.M * nu;
    out.Qm = Q + Mat::outer(Mnu, Mnu);
    out.eig = symmetric_eigen(out.Qm);
    return out;
}

}  // namespace oscilab::dispersion
