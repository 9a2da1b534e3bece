// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0

#include "oscilab/constructors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace oscilab::constructors {

namespace {

constexpr int kCheckGrid = 33;

std::vector<double> t_grid(double t0 = 1.0, double t1 = 2.0, int pts = kCheckGrid) {
    std::vector<double> g;
    for (int i = 0; i < pts; ++i) g.push_back(t0 + (t1 - t0) * i / (pts - 1));
    return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// PiecewisePeriodicSolution
// ---------------------------------------------------------------------------

PiecewisePeriodicSolution::Loc PiecewisePeriodicSolution::classify(double t, double z) const {
    Loc loc;
    if (lagrangian()) {
        const double s = z * mode;
        loc.cell = static_cast<long>(std::floor(s));
        loc.local = s - static_cast<double>(loc.cell);
        loc.phase = (loc.local < fraction) ? 0 : 1;
    } else {
        const double q = z * mode / t;  // interfaces sit at fixed q = k v0 + which a th
        const double c = v0();
        loc.cell = static_cast<long>(std::floor(q / c));
        loc.local = q - static_cast<double>(loc.cell) * c;
        loc.phase = (loc.local < a * fraction) ? 0 : 1;
    }
    return loc;
}

FieldSample PiecewisePeriodicSolution::eval(double t, double z) const {
    Loc loc = classify(t, z);
    FieldSample s;
    s.phase = loc.phase;
    const double rate = (loc.phase == 0) ? a : b;
    if (lagrangian()) {
        s.u = rate * t;
        s.u_t = rate;
        s.v_x = rate;
        const double c = v0();
        const double vbase = static_cast<double>(loc.cell) * c +
                             std::min(loc.local, fraction) * a +
                             std::max(loc.local - fraction, 0.0) * b;
        s.v = vbase / mode;
        if (has_temperature()) {
            const auto& th = (loc.phase == 0) ? thetaA : thetaB;
            s.theta = th.value(t);
            s.theta_t = th.derivative(t);
        }
    } else {
        s.u = 1.0 / (t * rate);  // density
        s.u_t = -s.u / t;
        s.v = z / t;
        s.v_x = 1.0 / t;  // du/dy
    }
    return s;
}

double PiecewisePeriodicSolution::stress_of(const FieldSample& s) const {
    switch (tag) {
        case SystemTag::bar:
            return law->value(s.u) + (mu / s.u) * s.v_x;
        case SystemTag::viscoplastic:
            return law->value(s.u) * std::pow(s.v_x, exponent);
        case SystemTag::gas:
            return s.theta * law->value(s.u) + (mu / s.u) * s.v_x;
        case SystemTag::euler:
            return -law->value(s.u) + mu * s.v_x;
        case SystemTag::twinning:
            break;
    }
    throw std::logic_error("stress_of: unsupported tag");
}

double PiecewisePeriodicSolution::displacement(double t, double x) const {
    if (!lagrangian()) throw std::logic_error("displacement: Lagrangian systems only");
    return t * eval(t, x).v;
}

double PiecewisePeriodicSolution::interface_position(long k, int which, double t) const {
    const double kk = static_cast<double>(k);
    if (lagrangian()) return (kk + which * fraction) / mode;
    return t * (kk * v0() + which * a * fraction) / mode;
}

double PiecewisePeriodicSolution::interface_speed(long k, int which) const {
    if (lagrangian()) return 0.0;
    return (static_cast<double>(k) * v0() + which * a * fraction) / mode;
}

FieldSample PiecewisePeriodicSolution::right_limit(long k, int which, double t) const {
    // right of (k,0) is phase 0 of cell k; right of (k,1) is phase 1
    FieldSample s;
    const int phase = which;
    const double rate = (phase == 0) ? a : b;
    s.phase = phase;
    if (lagrangian()) {
        s.u = rate * t;
        s.u_t = rate;
        s.v_x = rate;
        const double vbase = static_cast<double>(k) * v0() + which * fraction * a;
        s.v = vbase / mode;
        if (has_temperature()) {
            const auto& th = (phase == 0) ? thetaA : thetaB;
            s.theta = th.value(t);
            s.theta_t = th.derivative(t);
        }
    } else {
        s.u = 1.0 / (t * rate);
        s.u_t = -s.u / t;
        s.v = interface_speed(k, which);
        s.v_x = 1.0 / t;
    }
    return s;
}

FieldSample PiecewisePeriodicSolution::left_limit(long k, int which, double t) const {
    FieldSample s;
    const int phase = 1 - which;
    const double rate = (phase == 0) ? a : b;
    s.phase = phase;
    if (lagrangian()) {
        s.u = rate * t;
        s.u_t = rate;
        s.v_x = rate;
        const double vbase = static_cast<double>(k) * v0() + which * fraction * a;
        s.v = vbase / mode;  // velocity is continuous: same value as the right limit
        if (has_temperature()) {
            const auto& th = (phase == 0) ? thetaA : thetaB;
            s.theta = th.value(t);
            s.theta_t = th.derivative(t);
        }
    } else {
        s.u = 1.0 / (t * rate);
        s.u_t = -s.u / t;
        s.v = interface_speed(k, which);
        s.v_x = 1.0 / t;
    }
    return s;
}

std::vector<std::pair<long, int>> PiecewisePeriodicSolution::interfaces_in(double t, double zlo,
                                                                           double zhi) const {
    std::vector<std::pair<long, int>> out;
    if (fraction >= 1.0) return out;  // single phase
    // positions are monotone in (k, which); scan a safe k-range
    double unit = lagrangian() ? 1.0 / mode : t * v0() / mode;
    long k0 = static_cast<long>(std::floor(zlo / unit)) - 1;
    long k1 = static_cast<long>(std::ceil(zhi / unit)) + 1;
    for (long k = k0; k <= k1; ++k)
        for (int w : {0, 1}) {
            double p = interface_position(k, w, t);
            if (p >= zlo && p <= zhi) out.emplace_back(k, w);
        }
    return out;
}

std::vector<double> PiecewisePeriodicSolution::interface_positions(double t, double zlo,
                                                                   double zhi) const {
    std::vector<double> out;
    for (auto [k, w] : interfaces_in(t, zlo, zhi)) out.push_back(interface_position(k, w, t));
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Lagrangian laminates
// ---------------------------------------------------------------------------

PiecewisePeriodicSolution bar_solution(const PhasePair& pair, double fraction,
                                       const MaterialLaw& sigma, double mu) {
    pair.validate();
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("bar_solution: fraction must lie in (0,1)");
    for (double t : t_grid()) {
        auto cs = materials::common_stress(pair, sigma, mu, t);
        if (cs.mismatch >= 1e-10)
            throw std::invalid_argument(
                "bar_solution: sigma violates the two-phase stress identity");
    }
    PiecewisePeriodicSolution sol;
    sol.tag = SystemTag::bar;
    sol.a = pair.a;
    sol.b = pair.b;
    sol.fraction = fraction;
    sol.mu = mu;
    sol.law = sigma;
    return sol;
}

PiecewisePeriodicSolution viscoplastic_solution(const PhasePair& pair, double fraction,
                                                const MaterialLaw& phi, double exponent) {
    pair.validate();
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("viscoplastic_solution: fraction must lie in (0,1)");
    for (double t : t_grid()) {
        double lhs = phi.value(t * pair.a) * std::pow(pair.a, exponent);
        double rhs = phi.value(t * pair.b) * std::pow(pair.b, exponent);
        if (std::fabs(lhs - rhs) > 1e-10)
            throw std::invalid_argument(
                "viscoplastic_solution: phi violates the interface identity");
    }
    PiecewisePeriodicSolution sol;
    sol.tag = SystemTag::viscoplastic;
    sol.a = pair.a;
    sol.b = pair.b;
    sol.fraction = fraction;
    sol.mu = 1.0;
    sol.exponent = exponent;
    sol.law = phi;
    return sol;
}

PiecewisePeriodicSolution rescale(const PiecewisePeriodicSolution& sol, int n) {
    if (n < 1) throw std::invalid_argument("rescale: n must be >= 1");
    PiecewisePeriodicSolution out = sol;
    out.mode = sol.mode * n;
    return out;
}

// ---------------------------------------------------------------------------
// Weak limits
// ---------------------------------------------------------------------------

double YoungMeasure::weight_sum() const {
    double s = 0.0;
    for (const auto& atom : atoms) s += atom.weight;
    return s;
}

WeakLimits weak_limits(const PhasePair& pair, double fraction, const MaterialLaw* sigma) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("weak_limits: fraction must lie in (0,1]");
    WeakLimits wl;
    const double a = pair.a, b = pair.b, th = fraction;
    const double c = th * a + (1.0 - th) * b;
    wl.u_limit = [c](double t) { return c * t; };
    wl.v_limit = [c](double x) { return c * x; };
    wl.vx_limit = c;
    if (sigma) {
        MaterialLaw s = *sigma;
        wl.sigma_limit = [s, th, a, b](double t) {
            return th * s.value(a * t) + (1.0 - th) * s.value(b * t);
        };
    }
    wl.strain_measure.atoms.push_back({th, [a](double t) { return a * t; }});
    if (th < 1.0) wl.strain_measure.atoms.push_back({1.0 - th, [b](double t) { return b * t; }});
    return wl;
}

WeakLimits weak_limits(const PiecewisePeriodicSolution& sol) {
    PhasePair pair{sol.a, sol.b};
    if (sol.tag == SystemTag::euler) {
        // In Eulerian coordinates the phases occupy volume fractions
        // a th / v0 and (1-th) b / v0 of each cell, so the density converges
        // weakly-* to lamA/(ta) + lamB/(tb) = 1/(t v0).
        WeakLimits wl;
        const double a = sol.a, b = sol.b;
        const double lamA = sol.a * sol.fraction / sol.v0();
        const double lamB = 1.0 - lamA;
        wl.u_limit = [a, b, lamA, lamB](double t) {
            return lamA / (t * a) + lamB / (t * b);
        };
        wl.v_limit = [](double y) { return y; };  // u(t,y) = y/t converges strongly
        wl.vx_limit = 0.0;
        wl.strain_measure.atoms.push_back({lamA, [a](double t) { return 1.0 / (t * a); }});
        if (lamB > 0.0)
            wl.strain_measure.atoms.push_back({lamB, [b](double t) { return 1.0 / (t * b); }});
        return wl;
    }
    WeakLimits wl = weak_limits(pair, sol.fraction, sol.law ? &*sol.law : nullptr);
    if (sol.has_temperature()) {
        auto ta = sol.thetaA, tb = sol.thetaB;
        const double th = sol.fraction;
        wl.theta_limit = [ta, tb, th](double t) {
            return th * ta.value(t) + (1.0 - th) * tb.value(t);
        };
    }
    return wl;
}

// ---------------------------------------------------------------------------
// Gas constitutive class and uniform extension
// ---------------------------------------------------------------------------

GasConstitutive::GasConstitutive(MaterialLaw tau_law) : tau_(std::move(tau_law)) {
    std::vector<double> knots = tau_.breakpoints();
    knots.push_back(tau_.lo());
    knots.push_back(tau_.hi());
    double ref = (tau_.lo() <= 1.0 && 1.0 <= tau_.hi()) ? 1.0 : tau_.lo();
    MaterialLaw t = tau_;
    W_ = cumulative_integral([t](double u) { return t.value(u); }, std::move(knots), ref);
}

double GasConstitutive::W(double u) const { return W_(u); }
double GasConstitutive::psi(double u, double th) const {
    return th * W_(u) - (th * std::log(th) - th);
}
double GasConstitutive::eta(double u, double th) const { return std::log(th) - W_(u); }
double GasConstitutive::energy(double u, double th) const {
    return psi(u, th) + th * eta(u, th);
}

double GasConstitutive::maxwell_residual(double u, double th) const {
    const double hu = 1e-6 * std::max(1.0, std::fabs(u));
    const double ht = 1e-6 * std::max(1.0, std::fabs(th));
    auto sig = [&](double uu, double tt) { return sigma(uu, tt); };
    auto ee = [&](double uu, double tt) { return energy(uu, tt); };
    auto et = [&](double uu, double tt) { return eta(uu, tt); };

    double sigma_theta = (sig(u, th + ht) - sig(u, th - ht)) / (2.0 * ht);
    double eta_u = (et(u + hu, th) - et(u - hu, th)) / (2.0 * hu);
    double e_theta = (ee(u, th + ht) - ee(u, th - ht)) / (2.0 * ht);
    double eta_theta = (et(u, th + ht) - et(u, th - ht)) / (2.0 * ht);
    double e_u = (ee(u + hu, th) - ee(u - hu, th)) / (2.0 * hu);

    double r1 = std::fabs(sigma_theta + eta_u);
    double r2 = std::fabs(e_theta - th * eta_theta);
    double r3 = std::fabs(e_u - (sigma(u, th) - th * sigma_theta));
    return std::max({r1, r2, r3});
}

GasConstitutive::Hyperbolicity GasConstitutive::hyperbolicity_report(double u, double th) const {
    Hyperbolicity h;
    const double ht = 1e-6 * std::max(1.0, std::fabs(th));
    h.e_theta = (energy(u, th + ht) - energy(u, th - ht)) / (2.0 * ht);
    h.sigma_u = th * tau_.derivative(u);
    h.eta_theta = 1.0 / th;
    h.holds = h.e_theta > 0.0 && h.sigma_u > 0.0 && h.eta_theta > 0.0;
    return h;
}

double gas_uniform_extension_theta(const GasConstitutive& law, double rate, double phi0, double mu,
                                   double t, double tol) {
    if (!(rate > 0.0) || !(phi0 > 0.0) || !(mu > 0.0))
        throw std::invalid_argument("gas_uniform_extension_theta: inputs must be positive");
    auto g = [&](double s) { return (mu * rate / s) * std::exp(-law.W(rate * s)); };
    double integral = (t > 1.0) ? adaptive_simpson(g, 1.0, t, tol) : 0.0;
    return phi0 * std::exp(law.W(rate * t) - law.W(rate)) + std::exp(law.W(rate * t)) * integral;
}

namespace {

// dense Hermite trajectory from nodes/values/derivatives on [1,2]
TemperatureTrajectory make_dense(std::vector<double> ts, std::vector<double> vals,
                                 std::function<double(double, double)> ode_rhs) {
    auto nodes = std::make_shared<std::vector<double>>(std::move(ts));
    auto values = std::make_shared<std::vector<double>>(std::move(vals));
    auto rhs = std::make_shared<std::function<double(double, double)>>(std::move(ode_rhs));
    auto derivs = std::make_shared<std::vector<double>>();
    for (std::size_t i = 0; i < nodes->size(); ++i)
        derivs->push_back((*rhs)((*nodes)[i], (*values)[i]));

    auto interp = [nodes, values, derivs](double t) {
        const auto& tn = *nodes;
        if (t < tn.front() - 1e-9 || t > tn.back() + 1e-9)
            throw std::domain_error("TemperatureTrajectory: t outside [1,2]");
        t = std::clamp(t, tn.front(), tn.back());
        auto it = std::upper_bound(tn.begin(), tn.end(), t);
        std::size_t i = (it == tn.begin()) ? 0 : static_cast<std::size_t>(it - tn.begin()) - 1;
        if (i + 1 >= tn.size()) i = tn.size() - 2;
        HermiteSegment seg{tn[i], tn[i + 1], (*values)[i], (*values)[i + 1], (*derivs)[i],
                           (*derivs)[i + 1]};
        return seg.value(t);
    };
    TemperatureTrajectory traj;
    traj.value = interp;
    traj.derivative = [interp, rhs](double t) { return (*rhs)(t, interp(t)); };
    return traj;
}

}  // namespace

TemperatureTrajectory gas_uniform_extension(const GasConstitutive& law, double rate, double phi0,
                                            double mu) {
    if (!(rate > 0.0) || !(phi0 > 0.0) || !(mu > 0.0))
        throw std::invalid_argument("gas_uniform_extension: inputs must be positive");
    const int N = 512;
    std::vector<double> ts, vals;
    // cumulative integral of g on the node grid, then the closed form per node
    auto g = [&](double s) { return (mu * rate / s) * std::exp(-law.W(rate * s)); };
    double acc = 0.0;
    double Wa = law.W(rate);
    for (int i = 0; i <= N; ++i) {
        double t = 1.0 + static_cast<double>(i) / N;
        if (i > 0) acc += gauss_integrate(g, 1.0 + (i - 1.0) / N, t, 16);
        ts.push_back(t);
        vals.push_back(phi0 * std::exp(law.W(rate * t) - Wa) + std::exp(law.W(rate * t)) * acc);
    }
    GasConstitutive lcopy = law;
    auto rhs = [lcopy, rate, mu](double t, double th) {
        return rate * lcopy.tau().value(rate * t) * th + mu * rate / t;
    };
    return make_dense(std::move(ts), std::move(vals), rhs);
}

TemperatureTrajectory gas_theta_rk4(const std::function<double(double)>& tau_at_rate_t,
                                    double rate, double phi0, double mu, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("gas_theta_rk4: dt must be > 0");
    auto rhs = [tau_at_rate_t, rate, mu](double t, double th) {
        return rate * tau_at_rate_t(t) * th + mu * rate / t;
    };
    const int N = static_cast<int>(std::ceil(1.0 / dt));
    const double h = 1.0 / N;
    std::vector<double> ts, vals;
    double t = 1.0, th = phi0;
    ts.push_back(t);
    vals.push_back(th);
    for (int i = 0; i < N; ++i) {
        double k1 = rhs(t, th);
        double k2 = rhs(t + 0.5 * h, th + 0.5 * h * k1);
        double k3 = rhs(t + 0.5 * h, th + 0.5 * h * k2);
        double k4 = rhs(t + h, th + h * k3);
        th += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        t = 1.0 + (i + 1.0) * h;
        ts.push_back(t);
        vals.push_back(th);
    }
    return make_dense(std::move(ts), std::move(vals), rhs);
}

PiecewisePeriodicSolution uniform_extension_solution(double rate, double phi0,
                                                     const GasConstitutive& law, double mu) {
    PiecewisePeriodicSolution sol;
    sol.tag = SystemTag::gas;
    sol.a = rate;
    sol.b = rate;
    sol.fraction = 1.0;
    sol.mu = mu;
    sol.law = law.tau();
    sol.thetaA = gas_uniform_extension(law, rate, phi0, mu);
    sol.thetaB = sol.thetaA;
    return sol;
}

GasInterface gas_interface_construct(double A, double B, double phiA, double phiB,
                                     const MaterialLaw& tau_on_A_window, double mu) {
    if (!(A > 0.0) || !(B > 2.0 * A))
        throw std::invalid_argument("gas_interface_construct: need 0 < A and 2A < B");
    if (!(phiA > 0.0) || !(phiB > 0.0) || !(mu > 0.0))
        throw std::invalid_argument("gas_interface_construct: scalars must be positive");
    for (double t : t_grid())
        if (tau_on_A_window.value(A * t) < 0.0)
            throw std::invalid_argument("gas_interface_construct: tau < 0 on the A window");

    GasInterface out;

    // theta_A from the closed form with the base tau
    GasConstitutive lawA(tau_on_A_window);
    out.thetaA = gas_uniform_extension(lawA, A, phiA, mu);

    // theta_hat: d theta/dt = mu B / t + B tau(At) theta_A(t)
    {
        MaterialLaw tb = tau_on_A_window;
        auto thA = out.thetaA;
        auto rhs = [tb, thA, A, B, mu](double t, double) {
            return mu * B / t + B * tb.value(A * t) * thA.value(t);
        };
        const int N = 2048;
        const double h = 1.0 / N;
        std::vector<double> ts, vals;
        double t = 1.0, th = phiB;
        ts.push_back(t);
        vals.push_back(th);
        for (int i = 0; i < N; ++i) {
            double k1 = rhs(t, th);
            double k2 = rhs(t + 0.5 * h, th);
            double k3 = k2;
            double k4 = rhs(t + h, th);
            th += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            t = 1.0 + (i + 1.0) * h;
            ts.push_back(t);
            vals.push_back(th);
        }
        out.theta_hat = make_dense(std::move(ts), std::move(vals), rhs);
    }

    // extended tau on [B, 2B]: tau(Bt) = tau(At) theta_A(t) / theta_hat(t)
    {
        MaterialLaw tbase = tau_on_A_window;
        auto thA = out.thetaA;
        auto thH = out.theta_hat;
        auto fB = [tbase, thA, thH, A, B](double u) {
            double t = u / B;
            return tbase.value(A * t) * thA.value(t) / thH.value(t);
        };
        auto dB = [fB, B](double u) {
            double h = 1e-6 * std::max(1.0, std::fabs(u));
            double lo = std::max(u - h, B * (1.0 + 1e-12)), hi = std::min(u + h, 2.0 * B);
            return (fB(hi) - fB(lo)) / (hi - lo);
        };
        auto fA = [tbase](double u) { return tbase.value(u); };
        auto dA = [tbase](double u) { return tbase.derivative(u); };

        std::vector<MaterialLaw::Piece> pieces;
        pieces.push_back({0.5 * A, A,
                          [fA, dA, A](double u) { return fA(A) + dA(A) * (u - A); },
                          [dA, A](double) { return dA(A); }});
        pieces.push_back({A, 2.0 * A, fA, dA});
        const double v2A = fA(2.0 * A), d2A = dA(2.0 * A);
        const double vB = fB(B), dBv = dB(B);
        if (v2A > 0.0 && vB > 0.0) {
            HermiteSegment seg{2.0 * A, B, std::log(v2A), std::log(vB), d2A / v2A, dBv / vB};
            pieces.push_back({2.0 * A, B, [seg](double u) { return std::exp(seg.value(u)); },
                              [seg](double u) { return std::exp(seg.value(u)) * seg.derivative(u); }});
        } else {
            HermiteSegment seg{2.0 * A, B, v2A, vB, d2A, dBv};
            pieces.push_back({2.0 * A, B, [seg](double u) { return seg.value(u); },
                              [seg](double u) { return seg.derivative(u); }});
        }
        pieces.push_back({B, 2.0 * B, fB, dB});
        const double v2B = fB(2.0 * B), d2B = dB(2.0 * B);
        pieces.push_back({2.0 * B, 3.0 * B,
                          [v2B, d2B, B](double u) { return v2B + d2B * (u - 2.0 * B); },
                          [d2B](double) { return d2B; }});
        out.tau = MaterialLaw(materials::LawKind::tau, PhasePair{A, B}, 0.0, std::move(pieces));
    }

    // theta_B re-solves the uniform-extension ODE with the extended tau
    {
        MaterialLaw text = out.tau;
        out.thetaB = gas_theta_rk4([text, B](double t) { return text.value(B * t); }, B, phiB, mu,
                                   1.0 / 2048);
    }

    double worst = 0.0, thmin = std::numeric_limits<double>::max();
    for (double t : t_grid()) {
        double lhs = tau_on_A_window.value(A * t) * out.thetaA.value(t);
        double rhs = out.tau.value(B * t) * out.thetaB.value(t);
        worst = std::max(worst, std::fabs(lhs - rhs));
        thmin = std::min(thmin, out.theta_hat.value(t));
    }
    out.identity_residual = worst;
    out.theta_hat_min = thmin;
    return out;
}

PiecewisePeriodicSolution gas_oscillatory(double A, double B, double fraction,
                                          const GasInterface& iface, double mu) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("gas_oscillatory: fraction must lie in (0,1)");
    PiecewisePeriodicSolution sol;
    sol.tag = SystemTag::gas;
    sol.a = A;
    sol.b = B;
    sol.fraction = fraction;
    sol.mu = mu;
    sol.law = iface.tau;
    sol.thetaA = iface.thetaA;
    sol.thetaB = iface.thetaB;

    double worst = 0.0;
    for (double t : t_grid()) {
        double jump = std::fabs(sol.total_stress(t, fraction * 0.5 / sol.mode) -
                                sol.total_stress(t, (fraction + 1.0) * 0.5 / sol.mode));
        worst = std::max(worst, jump);
    }
    if (worst > 1e-8)
        throw std::invalid_argument("gas_oscillatory: interface residual exceeds 1e-8");
    return sol;
}

// ---------------------------------------------------------------------------
// Eulerian side
// ---------------------------------------------------------------------------

EulerianFields lagrangian_to_eulerian(const PiecewisePeriodicSolution& bar) {
    if (bar.tag != SystemTag::bar && bar.tag != SystemTag::viscoplastic)
        throw std::invalid_argument("lagrangian_to_eulerian: bar-type solution required");
    if (!(std::min(bar.a, bar.b) * bar.time_window[0] > 0.0))
        throw std::invalid_argument("lagrangian_to_eulerian: degenerate strain");

    const double a = bar.a, b = bar.b, th = bar.fraction;
    const double c = bar.v0();
    const int n = bar.mode;

    auto invert = [a, b, th, c, n](double t, double y) {
        // base coordinates: Y(t, x_base) = n * y
        const double target = static_cast<double>(n) * y;
        const double cell = c * t;
        double k = std::floor(target / cell);
        double r = target - k * cell;  // in [0, cell)
        double x_base;
        if (r <= a * th * t)
            x_base = k + r / (a * t);
        else
            x_base = k + th + (r - a * th * t) / (b * t);
        return x_base;
    };

    EulerianFields out;
    PiecewisePeriodicSolution lag = bar;
    out.u = [lag, invert, n](double t, double y) {
        return lag.eval(t, invert(t, y) / static_cast<double>(n)).v;
    };
    out.rho = [lag, invert, n](double t, double y) {
        return 1.0 / lag.eval(t, invert(t, y) / static_cast<double>(n)).u;
    };

    PiecewisePeriodicSolution eul;
    eul.tag = SystemTag::euler;
    eul.a = a;
    eul.b = b;
    eul.fraction = th;
    eul.mode = n;
    eul.mu = bar.mu;
    if (bar.law) {
        // Eulerian pressure p(r) = -sigma(1/r)
        MaterialLaw sig = *bar.law;
        double rlo = 1.0 / sig.hi(), rhi = 1.0 / sig.lo();
        std::vector<MaterialLaw::Piece> pieces;
        pieces.push_back({rlo, rhi, [sig](double r) { return -sig.value(1.0 / r); },
                          [sig](double r) { return sig.derivative(1.0 / r) / (r * r); }});
        eul.law = MaterialLaw(materials::LawKind::pressure, PhasePair{a, b}, 0.0,
                              std::move(pieces));
    }
    out.as_solution = eul;
    return out;
}

PiecewisePeriodicSolution ns_oscillatory(const PhasePair& pair, double fraction,
                                         const MaterialLaw& pressure, double mu, int n) {
    pair.validate();
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("ns_oscillatory: fraction must lie in (0,1)");
    if (pressure.constraint_residual() >= 1e-10)
        throw std::invalid_argument("ns_oscillatory: pressure violates the two-phase identity");
    PiecewisePeriodicSolution sol;
    sol.tag = SystemTag::euler;
    sol.a = pair.a;
    sol.b = pair.b;
    sol.fraction = fraction;
    sol.mode = n;
    sol.mu = mu;
    sol.law = pressure;
    return sol;
}

// ---------------------------------------------------------------------------
// Twinning
// ---------------------------------------------------------------------------

UniformShearMotion uniform_shear_motion(const Mat& F0, const Mat& F1) {
    return UniformShearMotion{F0, F1};
}

int TwinningSolution::phase_of(double s) const {
    double local = s - std::floor(s);
    return (local < fraction) ? 0 : 1;
}

Vec TwinningSolution::amplitude(int phase) const {
    if (dynamic) return (phase == 0) ? a_vec : b_vec;
    return (phase == 0) ? Vec(d) : a_vec;  // steady: F_minus then F_minus + a (x) nu
}

Vec TwinningSolution::profile(double s) const {
    const double k = std::floor(s);
    const double local = s - k;
    const Vec amp0 = amplitude(0), amp1 = amplitude(1);
    Vec cell = fraction * amp0 + (1.0 - fraction) * amp1;
    return k * cell + std::min(local, fraction) * amp0 + std::max(local - fraction, 0.0) * amp1;
}

Vec TwinningSolution::y(double t, const Vec& x) const {
    Vec base = F0 * x + profile(x.dot(nu));
    return dynamic ? t * base : base;
}

Vec TwinningSolution::v(double t, const Vec& x) const {
    (void)t;
    if (!dynamic) return Vec(d);
    return F0 * x + profile(x.dot(nu));
}

Mat TwinningSolution::grad_y(double t, const Vec& x) const {
    Mat g = F0 + Mat::outer(amplitude(phase_of(x.dot(nu))), nu);
    return dynamic ? t * g : g;
}

Mat TwinningSolution::grad_v(double t, const Vec& x) const {
    (void)t;
    if (!dynamic) return Mat(d);
    return F0 + Mat::outer(amplitude(phase_of(x.dot(nu))), nu);
}

Mat TwinningSolution::total_stress(double t, const Vec& x) const {
    return W.first_derivative(grad_y(t, x)) + grad_v(t, x);
}

std::vector<double> TwinningSolution::interface_positions_s(double slo, double shi) const {
    std::vector<double> out;
    long k0 = static_cast<long>(std::floor(slo)) - 1;
    long k1 = static_cast<long>(std::ceil(shi)) + 1;
    for (long k = k0; k <= k1; ++k)
        for (double p : {static_cast<double>(k), static_cast<double>(k) + fraction})
            if (p >= slo && p <= shi) out.push_back(p);
    std::sort(out.begin(), out.end());
    return out;
}

TwinningSolution::SideStates TwinningSolution::interface_states(double s0, double t) const {
    SideStates st;
    const double local = s0 - std::floor(s0);
    const bool at_fraction = std::fabs(local - fraction) < 1e-9;
    const int left_phase = at_fraction ? 0 : 1;
    const int right_phase = at_fraction ? 1 : 0;
    Mat gl = F0 + Mat::outer(amplitude(left_phase), nu);
    Mat gr = F0 + Mat::outer(amplitude(right_phase), nu);
    st.F_left = dynamic ? t * gl : gl;
    st.F_right = dynamic ? t * gr : gr;
    st.gradV_left = dynamic ? gl : Mat(d);
    st.gradV_right = dynamic ? gr : Mat(d);
    // v is continuous; evaluate on the locus via the profile
    Vec x0 = s0 * nu;
    st.v_left = v(t, x0);
    st.v_right = st.v_left;
    return st;
}

TwinningSolution twinning_steady(const Mat& F_minus, const Vec& a_vec, const Vec& nu,
                                 const StoredEnergy& W, double fraction) {
    if (std::fabs(nu.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("twinning_steady: nu must be a unit vector");
    Mat Fp = F_minus + Mat::outer(a_vec, nu);
    Vec jump = (W.first_derivative(Fp) - W.first_derivative(F_minus)) * nu;
    if (jump.norm() > 1e-8)
        throw std::invalid_argument("twinning_steady: traction jump precondition fails");
    TwinningSolution sol;
    sol.d = F_minus.dim();
    sol.dynamic = false;
    sol.fraction = fraction;
    sol.F0 = F_minus;
    sol.a_vec = a_vec;
    sol.b_vec = Vec(sol.d);
    sol.nu = nu;
    sol.W = W;
    return sol;
}

TwinningSolution twinning_dynamic(const Mat& F0, const Vec& a_vec, const Vec& b_vec, const Vec& nu,
                                  const StoredEnergy& W, double fraction) {
    TwinningPair pair{F0, a_vec, b_vec, nu};
    if ((b_vec - a_vec).norm() > 0.0) {
        double res = materials::condition_C_residual(W, pair, t_grid());
        if (res >= 1e-8)
            throw std::invalid_argument("twinning_dynamic: condition (C) fails for the pair");
    }
    TwinningSolution sol;
    sol.d = F0.dim();
    sol.dynamic = true;
    sol.fraction = fraction;
    sol.F0 = F0;
    sol.a_vec = a_vec;
    sol.b_vec = b_vec;
    sol.nu = nu;
    sol.W = W;
    return sol;
}

}  // namespace oscilab::constructors
