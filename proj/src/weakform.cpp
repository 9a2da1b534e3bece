// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0

#include "oscilab/weakform.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace oscilab::weakform {

double bump(double s) {
    if (std::fabs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double bump_derivative(double s) {
    if (std::fabs(s) >= 1.0) return 0.0;
    const double d = 1.0 - s * s;
    return bump(s) * (-2.0 * s / (d * d));
}

double TestFunction::value(double t, double x) const {
    return amp * bump((t - t0) / r_t) * bump((x - x0) / r_x);
}
double TestFunction::d_t(double t, double x) const {
    return amp * bump_derivative((t - t0) / r_t) / r_t * bump((x - x0) / r_x);
}
double TestFunction::d_x(double t, double x) const {
    return amp * bump((t - t0) / r_t) * bump_derivative((x - x0) / r_x) / r_x;
}

double TestFunctionND::value(double t, const Vec& x) const {
    double v = amp * bump((t - t0) / r_t);
    for (int i = 0; i < x0.dim(); ++i) v *= bump((x[i] - x0[i]) / r_x);
    return v;
}
double TestFunctionND::d_t(double t, const Vec& x) const {
    double v = amp * bump_derivative((t - t0) / r_t) / r_t;
    for (int i = 0; i < x0.dim(); ++i) v *= bump((x[i] - x0[i]) / r_x);
    return v;
}
double TestFunctionND::d_xi(int i, double t, const Vec& x) const {
    double v = amp * bump((t - t0) / r_t);
    for (int j = 0; j < x0.dim(); ++j)
        v *= (j == i) ? bump_derivative((x[j] - x0[j]) / r_x) / r_x
                      : bump((x[j] - x0[j]) / r_x);
    return v;
}

namespace {

// deterministic uniform in [0,1) independent of library distributions
double u01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<TestFunction> make_random_tests(int count, unsigned long long seed) {
    std::mt19937_64 gen(seed);
    std::vector<TestFunction> out;
    for (int i = 0; i < count; ++i) {
        TestFunction f;
        f.t0 = 1.05 + 0.75 * u01(gen);
        f.r_t = 0.08 + 0.10 * u01(gen);
        f.x0 = -0.5 + 1.0 * u01(gen);
        f.r_x = 0.12 + 0.25 * u01(gen);
        out.push_back(f);
    }
    return out;
}

std::vector<TestFunctionND> make_random_tests_nd(int d, int count, unsigned long long seed) {
    std::mt19937_64 gen(seed);
    std::vector<TestFunctionND> out;
    for (int i = 0; i < count; ++i) {
        TestFunctionND f;
        f.t0 = 1.05 + 0.75 * u01(gen);
        f.r_t = 0.08 + 0.10 * u01(gen);
        f.x0 = Vec(d);
        for (int j = 0; j < d; ++j) f.x0[j] = -0.4 + 0.8 * u01(gen);
        f.r_x = 0.30 + 0.20 * u01(gen);
        out.push_back(f);
    }
    return out;
}

TestFunction transported_test(const TestFunction& phi0, int n) {
    TestFunction f = phi0;
    f.x0 = phi0.x0 * n;
    f.r_x = phi0.r_x * n;
    f.amp = phi0.amp / n;
    return f;
}

// ---------------------------------------------------------------------------
// Conservation laws
// ---------------------------------------------------------------------------

std::vector<ConservationLaw> conservation_laws(const PiecewisePeriodicSolution& sol) {
    using constructors::SystemTag;
    std::vector<ConservationLaw> laws;
    PiecewisePeriodicSolution s = sol;
    switch (sol.tag) {
        case SystemTag::bar:
        case SystemTag::viscoplastic:
            laws.push_back({"kinematic", [s](double t, double x) { return s.eval(t, x).u; },
                            [s](double t, double x) { return s.eval(t, x).v; }});
            laws.push_back({"momentum", [s](double t, double x) { return s.eval(t, x).v; },
                            [s](double t, double x) { return s.total_stress(t, x); }});
            break;
        case SystemTag::gas:
            laws.push_back({"kinematic", [s](double t, double x) { return s.eval(t, x).u; },
                            [s](double t, double x) { return s.eval(t, x).v; }});
            laws.push_back({"momentum", [s](double t, double x) { return s.eval(t, x).v; },
                            [s](double t, double x) { return s.total_stress(t, x); }});
            laws.push_back({"energy",
                            [s](double t, double x) {
                                auto e = s.eval(t, x);
                                return 0.5 * e.v * e.v + e.theta;
                            },
                            [s](double t, double x) {
                                auto e = s.eval(t, x);
                                return s.stress_of(e) * e.v;
                            }});
            break;
        case SystemTag::euler:
            laws.push_back({"mass", [s](double t, double y) { return s.eval(t, y).u; },
                            [s](double t, double y) {
                                auto e = s.eval(t, y);
                                return -e.u * e.v;
                            }});
            laws.push_back({"momentum",
                            [s](double t, double y) {
                                auto e = s.eval(t, y);
                                return e.u * e.v;
                            },
                            [s](double t, double y) {
                                auto e = s.eval(t, y);
                                double p = s.law->value(e.u);
                                return -(e.u * e.v * e.v + p) + s.mu * e.v_x;
                            }});
            break;
        case SystemTag::twinning:
            throw std::invalid_argument("conservation_laws: use the twinning overloads");
    }
    return laws;
}

// ---------------------------------------------------------------------------
// Quadrature sweeps
// ---------------------------------------------------------------------------

namespace {

std::vector<double> panelize(double a, double b, double target) {
    std::vector<double> pts;
    int n = std::max(1, static_cast<int>(std::ceil((b - a) / std::max(target, 1e-12))));
    for (int i = 0; i <= n; ++i) pts.push_back(a + (b - a) * i / n);
    return pts;
}

// composite Gauss over [a,b] split first at `breaks`, then into panels of
// (at most) width `target`.
template <typename F>
double composite(const F& f, double a, double b, const std::vector<double>& breaks, double target,
                 int order) {
    if (!(b > a)) return 0.0;
    std::vector<double> seg{a, b};
    for (double x : breaks)
        if (x > a && x < b) seg.push_back(x);
    std::sort(seg.begin(), seg.end());
    const GaussRule& rule = gauss_legendre(order);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < seg.size(); ++i) {
        auto panels = panelize(seg[i], seg[i + 1], target);
        for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
            double mid = 0.5 * (panels[p] + panels[p + 1]);
            double half = 0.5 * (panels[p + 1] - panels[p]);
            for (std::size_t g = 0; g < rule.nodes.size(); ++g)
                total += half * rule.weights[g] * f(mid + half * rule.nodes[g]);
        }
    }
    return total;
}

struct Support {
    double ta, tb, xa, xb;
    bool touches_initial;
};

Support clip_support(const TestFunction& phi) {
    Support s;
    s.ta = phi.t0 - phi.r_t;
    s.tb = phi.t0 + phi.r_t;
    s.xa = phi.x0 - phi.r_x;
    s.xb = phi.x0 + phi.r_x;
    if (s.tb >= 2.0)
        throw std::invalid_argument("test function support escapes the time domain [1,2)");
    s.touches_initial = s.ta < 1.0;
    s.ta = std::max(s.ta, 1.0);
    return s;
}

}  // namespace

// Single sweep accumulating every law's bulk + trace residual for one test.
static std::vector<double> sweep_residuals(const PiecewisePeriodicSolution& sol,
                                           const std::vector<ConservationLaw>& laws,
                                           const TestFunction& phi, const QuadratureSpec& quad) {
    Support sup = clip_support(phi);
    const double target_t = phi.r_t / std::pow(2.0, quad.refinement);
    const double target_x = phi.r_x / std::pow(2.0, quad.refinement);

    std::vector<double> acc(laws.size(), 0.0);

    auto x_integrand_all = [&](double t, double x, bool trace) {
        const double pt = trace ? 0.0 : phi.d_t(t, x);
        const double px = trace ? 0.0 : phi.d_x(t, x);
        const double pv = trace ? phi.value(t, x) : 0.0;
        std::vector<double> vals(laws.size());
        for (std::size_t j = 0; j < laws.size(); ++j) {
            if (trace)
                vals[j] = laws[j].density(t, x) * pv;
            else
                vals[j] = laws[j].density(t, x) * pt - laws[j].flux(t, x) * px;
        }
        return vals;
    };

    // bulk: outer t, inner x with interface splits at each t node
    {
        auto panels_t = panelize(sup.ta, sup.tb, target_t);
        const GaussRule& rt = gauss_legendre(quad.gauss_order);
        for (std::size_t p = 0; p + 1 < panels_t.size(); ++p) {
            double mid = 0.5 * (panels_t[p] + panels_t[p + 1]);
            double half = 0.5 * (panels_t[p + 1] - panels_t[p]);
            for (std::size_t g = 0; g < rt.nodes.size(); ++g) {
                double t = mid + half * rt.nodes[g];
                double wt = half * rt.weights[g];
                std::vector<double> breaks =
                    quad.split_interfaces ? sol.interface_positions(t, sup.xa, sup.xb)
                                          : std::vector<double>{};
                // inner composite over x accumulating all laws
                std::vector<double> xs{sup.xa, sup.xb};
                for (double bx : breaks)
                    if (bx > sup.xa && bx < sup.xb) xs.push_back(bx);
                std::sort(xs.begin(), xs.end());
                const GaussRule& rx = gauss_legendre(quad.gauss_order);
                for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
                    auto panels_x = panelize(xs[i], xs[i + 1], target_x);
                    for (std::size_t q = 0; q + 1 < panels_x.size(); ++q) {
                        double xmid = 0.5 * (panels_x[q] + panels_x[q + 1]);
                        double xhalf = 0.5 * (panels_x[q + 1] - panels_x[q]);
                        for (std::size_t gg = 0; gg < rx.nodes.size(); ++gg) {
                            double x = xmid + xhalf * rx.nodes[gg];
                            double w = wt * xhalf * rx.weights[gg];
                            auto vals = x_integrand_all(t, x, false);
                            for (std::size_t j = 0; j < laws.size(); ++j) acc[j] += w * vals[j];
                        }
                    }
                }
            }
        }
    }

    // initial trace along t = 1
    if (sup.touches_initial) {
        std::vector<double> breaks = quad.split_interfaces
                                         ? sol.interface_positions(1.0, sup.xa, sup.xb)
                                         : std::vector<double>{};
        for (std::size_t j = 0; j < laws.size(); ++j) {
            auto f = [&](double x) { return x_integrand_all(1.0, x, true)[j]; };
            acc[j] += composite(f, sup.xa, sup.xb, breaks, target_x, quad.gauss_order);
        }
    }
    return acc;
}

double weak_residual_single(const PiecewisePeriodicSolution& sol, const ConservationLaw& law,
                            const TestFunction& phi, const QuadratureSpec& quad) {
    auto acc = sweep_residuals(sol, {law}, phi, quad);
    return std::fabs(acc[0]);
}

WeakReport weak_residual(const PiecewisePeriodicSolution& sol,
                         const std::vector<TestFunction>& tests, const QuadratureSpec& quad) {
    auto laws = conservation_laws(sol);
    WeakReport rep;
    for (const auto& l : laws) rep.law_names.push_back(l.name);
    rep.residuals.assign(laws.size(), std::vector<double>(tests.size(), 0.0));
    for (std::size_t ti = 0; ti < tests.size(); ++ti) {
        auto acc = sweep_residuals(sol, laws, tests[ti], quad);
        for (std::size_t j = 0; j < laws.size(); ++j) {
            rep.residuals[j][ti] = std::fabs(acc[j]);
            rep.max_residual = std::max(rep.max_residual, rep.residuals[j][ti]);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Rankine-Hugoniot
// ---------------------------------------------------------------------------

RHReport rh_residual(const PiecewisePeriodicSolution& sol, long k, int which, int t_pts) {
    using constructors::SystemTag;
    RHReport rep;
    switch (sol.tag) {
        case SystemTag::bar:
        case SystemTag::viscoplastic:
            rep.condition_names = {"velocity_jump", "stress_jump"};
            break;
        case SystemTag::gas:
            rep.condition_names = {"velocity_jump", "stress_jump", "energy_flux_jump"};
            break;
        case SystemTag::euler:
            rep.condition_names = {"mass_flux", "momentum_flux"};
            break;
        case SystemTag::twinning:
            throw std::invalid_argument("rh_residual: use the twinning overload");
    }
    rep.max_residuals.assign(rep.condition_names.size(), 0.0);

    for (int i = 0; i < t_pts; ++i) {
        double t = 1.0 + static_cast<double>(i) / (t_pts - 1);
        auto L = sol.left_limit(k, which, t);
        auto R = sol.right_limit(k, which, t);
        std::vector<double> r;
        if (sol.tag == SystemTag::euler) {
            double speed = sol.interface_speed(k, which);
            double mass = R.u * (R.v - speed) - L.u * (L.v - speed);
            double mom = (R.u * R.v * (R.v - speed) - L.u * L.v * (L.v - speed)) +
                         (sol.law->value(R.u) - sol.law->value(L.u)) - sol.mu * (R.v_x - L.v_x);
            r = {std::fabs(mass), std::fabs(mom)};
        } else {
            double vjump = R.v - L.v;
            double sjump = sol.stress_of(R) - sol.stress_of(L);
            r = {std::fabs(vjump), std::fabs(sjump)};
            if (sol.tag == SystemTag::gas) {
                double ejump = sol.stress_of(R) * R.v - sol.stress_of(L) * L.v;
                r.push_back(std::fabs(ejump));
            }
        }
        for (std::size_t j = 0; j < r.size(); ++j) {
            rep.max_residuals[j] = std::max(rep.max_residuals[j], r[j]);
            rep.max_residual = std::max(rep.max_residual, r[j]);
        }
    }
    return rep;
}

RHReport rh_residual(const PiecewisePeriodicSolution& sol, int t_pts) {
    RHReport worst;
    for (long k : {0L, 1L})
        for (int w : {0, 1}) {
            RHReport r = rh_residual(sol, k, w, t_pts);
            if (worst.condition_names.empty()) worst = r;
            for (std::size_t j = 0; j < r.max_residuals.size(); ++j)
                worst.max_residuals[j] = std::max(worst.max_residuals[j], r.max_residuals[j]);
            worst.max_residual = std::max(worst.max_residual, r.max_residual);
        }
    return worst;
}

// ---------------------------------------------------------------------------
// Interior classical residual
// ---------------------------------------------------------------------------

namespace {

// 4th-order centered first derivative
template <typename F>
double d1_4(const F& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}
template <typename F>
double d2_2(const F& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

}  // namespace

double interior_residual(const PiecewisePeriodicSolution& sol) {
    using constructors::SystemTag;
    const double ht = 1e-3;
    double worst = 0.0;
    std::vector<double> ts{1.05, 1.3, 1.5, 1.7, 1.95};

    for (double t : ts) {
        // sample both phase interiors of cells 0 and 1
        std::vector<double> zs;
        for (long k : {0L, 1L}) {
            if (sol.lagrangian()) {
                double base = static_cast<double>(k);
                zs.push_back((base + 0.5 * sol.fraction) / sol.mode);
                if (sol.fraction < 1.0)
                    zs.push_back((base + 0.5 * (1.0 + sol.fraction)) / sol.mode);
            } else {
                double c = sol.v0();
                zs.push_back(t * (k * c + 0.5 * sol.a * sol.fraction) / sol.mode);
                if (sol.fraction < 1.0)
                    zs.push_back(t * (k * c + 0.5 * (sol.a * sol.fraction + c)) / sol.mode);
            }
        }
        for (double z : zs) {
            // spacing safe against the nearest interface over the t-stencil
            double dist = std::numeric_limits<double>::max();
            for (double dt : {-2 * ht, 0.0, 2 * ht}) {
                auto ifs = sol.interface_positions(t + dt, z - 1.0, z + 1.0);
                for (double p : ifs) dist = std::min(dist, std::fabs(p - z));
            }
            double hx = std::min(1e-3, dist / 4.0);
            if (!(hx > 1e-8)) continue;

            if (sol.tag == SystemTag::euler) {
                auto rho = [&](double tt, double yy) { return sol.eval(tt, yy).u; };
                auto mom = [&](double tt, double yy) {
                    auto e = sol.eval(tt, yy);
                    return e.u * e.v;
                };
                auto u = [&](double tt, double yy) { return sol.eval(tt, yy).v; };
                double r1 = d1_4([&](double tt) { return rho(tt, z); }, t, ht) +
                            d1_4([&](double yy) { return rho(t, yy) * u(t, yy); }, z, hx);
                double flux = 0.0;
                {
                    auto f = [&](double yy) {
                        auto e = sol.eval(t, yy);
                        return e.u * e.v * e.v + sol.law->value(e.u);
                    };
                    flux = d1_4(f, z, hx);
                }
                double r2 = d1_4([&](double tt) { return mom(tt, z); }, t, ht) + flux -
                            sol.mu * d2_2([&](double yy) { return u(t, yy); }, z, hx);
                worst = std::max({worst, std::fabs(r1), std::fabs(r2)});
            } else {
                auto u = [&](double tt, double xx) { return sol.eval(tt, xx).u; };
                auto v = [&](double tt, double xx) { return sol.eval(tt, xx).v; };
                auto S = [&](double tt, double xx) { return sol.total_stress(tt, xx); };
                double r1 = d1_4([&](double tt) { return u(tt, z); }, t, ht) -
                            d1_4([&](double xx) { return v(t, xx); }, z, hx);
                double r2 = d1_4([&](double tt) { return v(tt, z); }, t, ht) -
                            d1_4([&](double xx) { return S(t, xx); }, z, hx);
                worst = std::max({worst, std::fabs(r1), std::fabs(r2)});
                if (sol.tag == SystemTag::gas) {
                    auto en = [&](double tt, double xx) {
                        auto e = sol.eval(tt, xx);
                        return 0.5 * e.v * e.v + e.theta;
                    };
                    auto Sv = [&](double xx) {
                        auto e = sol.eval(t, xx);
                        return sol.stress_of(e) * e.v;
                    };
                    double r3 = d1_4([&](double tt) { return en(tt, z); }, t, ht) - d1_4(Sv, z, hx);
                    worst = std::max(worst, std::fabs(r3));
                }
            }
        }
    }
    return worst;
}

EntropyReport entropy_production(const PiecewisePeriodicSolution& gas_sol) {
    using constructors::SystemTag;
    if (gas_sol.tag != SystemTag::gas)
        throw std::invalid_argument("entropy_production: gas-type solution required");
    constructors::GasConstitutive law(*gas_sol.law);
    const double ht = 1e-3;
    EntropyReport rep;
    rep.min_production = std::numeric_limits<double>::max();
    for (double t : {1.05, 1.25, 1.5, 1.75, 1.95})
        for (long k : {0L})
            for (int phase = 0; phase < (gas_sol.fraction < 1.0 ? 2 : 1); ++phase) {
                double z = (static_cast<double>(k) +
                            (phase == 0 ? 0.5 * gas_sol.fraction
                                        : 0.5 * (1.0 + gas_sol.fraction))) /
                           gas_sol.mode;
                auto e = gas_sol.eval(t, z);
                if (!(e.theta > 0.0))
                    throw std::invalid_argument("entropy_production: nonpositive temperature");
                auto eta_of_t = [&](double tt) {
                    auto s = gas_sol.eval(tt, z);
                    return law.eta(s.u, s.theta);
                };
                double lhs = d1_4(eta_of_t, t, ht);
                double rhs = (gas_sol.mu / e.u) * (e.v_x * e.v_x / e.theta);
                rep.max_identity_residual =
                    std::max(rep.max_identity_residual, std::fabs(lhs - rhs));
                rep.min_production = std::min(rep.min_production, rhs);
            }
    return rep;
}

// ---------------------------------------------------------------------------
// Twinning certification
// ---------------------------------------------------------------------------

namespace {

std::vector<Vec> tangent_basis(const Vec& nu) {
    const int d = nu.dim();
    std::vector<Vec> tans;
    if (d == 2) {
        tans.push_back(Vec(-nu[1], nu[0]));
    } else {
        Vec seed = (std::fabs(nu[0]) < 0.9) ? Vec::unit(3, 0) : Vec::unit(3, 1);
        Vec t1 = seed - nu.dot(seed) * nu;
        t1 = t1.normalized();
        Vec t2(3);
        t2[0] = nu[1] * t1[2] - nu[2] * t1[1];
        t2[1] = nu[2] * t1[0] - nu[0] * t1[2];
        t2[2] = nu[0] * t1[1] - nu[1] * t1[0];
        tans.push_back(t1);
        tans.push_back(t2);
    }
    return tans;
}

struct TwinLaw {
    std::string kind;  // momentum_i | kinematic_ia | involution_iab
    int i = 0, a = 0, b = 0;
};

}  // namespace

TwinningWeakReport weak_residual(const TwinningSolution& sol,
                                 const std::vector<TestFunctionND>& tests,
                                 const QuadratureSpec& quad) {
    const int d = sol.d;
    std::vector<TwinLaw> laws;
    for (int i = 0; i < d; ++i) laws.push_back({"momentum", i, 0, 0});
    for (int i = 0; i < d; ++i)
        for (int a = 0; a < d; ++a) laws.push_back({"kinematic", i, a, 0});
    for (int i = 0; i < d; ++i)
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b) laws.push_back({"involution", i, a, b});

    auto tans = tangent_basis(sol.nu);
    TwinningWeakReport rep;

    for (const auto& phi : tests) {
        if (phi.t0 + phi.r_t >= 2.0)
            throw std::invalid_argument("test function support escapes the time domain [1,2)");
        const double ta = std::max(1.0, phi.t0 - phi.r_t), tb = phi.t0 + phi.r_t;
        const bool touches = phi.t0 - phi.r_t < 1.0;

        // rotated-frame ranges covering the support box
        double wide = 0.0;
        for (int i = 0; i < d; ++i) wide += std::fabs(sol.nu[i]) * phi.r_x;
        const double sc = sol.nu.dot(phi.x0);
        const double sa = sc - wide, sb = sc + wide;
        std::vector<std::pair<double, double>> tau_ranges;
        for (const auto& tv : tans) {
            double w = 0.0;
            for (int i = 0; i < d; ++i) w += std::fabs(tv[i]) * phi.r_x;
            tau_ranges.emplace_back(tv.dot(phi.x0) - w, tv.dot(phi.x0) + w);
        }

        const double target_t = phi.r_t / std::pow(2.0, quad.refinement);
        const double target_x = phi.r_x / std::pow(2.0, quad.refinement);
        std::vector<double> sbreaks =
            quad.split_interfaces ? sol.interface_positions_s(sa, sb) : std::vector<double>{};

        std::vector<double> acc(laws.size(), 0.0);

        auto point = [&](double s, const std::vector<double>& taus) {
            Vec x = s * sol.nu;
            for (std::size_t j = 0; j < tans.size(); ++j) x += taus[j] * tans[j];
            return x;
        };

        // fields depend on (t, s) only; cache them across the tangential sweep
        struct NodeFields {
            Mat F, T;
            bool valid = false;
        };
        NodeFields cache;
        double cache_t = 0.0, cache_s = 0.0;
        auto fields_at = [&](double t, double s) -> NodeFields& {
            if (!cache.valid || t != cache_t || s != cache_s) {
                Vec x0 = s * sol.nu;
                cache.F = sol.grad_y(t, x0);
                cache.T = sol.total_stress(t, x0);
                cache.valid = true;
                cache_t = t;
                cache_s = s;
            }
            return cache;
        };

        // accumulate all laws at one space-time node; the bump factors along
        // every axis are evaluated once and combined into all partials
        auto add_node = [&](double w, double t, double s, const Vec& x, bool trace) {
            const NodeFields& nf = fields_at(trace ? 1.0 : t, s);
            const Mat& F = nf.F;
            const Mat& T = nf.T;
            Vec vv = sol.v(trace ? 1.0 : t, x);
            double bt = bump(((trace ? 1.0 : t) - phi.t0) / phi.r_t);
            double dbt = bump_derivative(((trace ? 1.0 : t) - phi.t0) / phi.r_t) / phi.r_t;
            double bx[3], dbx[3];
            for (int i = 0; i < d; ++i) {
                double si = (x[i] - phi.x0[i]) / phi.r_x;
                bx[i] = bump(si);
                dbx[i] = bump_derivative(si) / phi.r_x;
            }
            double prod_x = phi.amp;
            for (int i = 0; i < d; ++i) prod_x *= bx[i];
            if (trace) {
                double pv = bt * prod_x;
                for (std::size_t j = 0; j < laws.size(); ++j) {
                    const auto& L = laws[j];
                    if (L.kind == "momentum") acc[j] += w * vv[L.i] * pv;
                    else if (L.kind == "kinematic") acc[j] += w * F(L.i, L.a) * pv;
                }
                return;
            }
            double pt = dbt * prod_x;
            double px[3];
            for (int i = 0; i < d; ++i) {
                double p = phi.amp * bt * dbx[i];
                for (int k = 0; k < d; ++k)
                    if (k != i) p *= bx[k];
                px[i] = p;
            }
            for (std::size_t j = 0; j < laws.size(); ++j) {
                const auto& L = laws[j];
                if (L.kind == "momentum") {
                    double flux = 0.0;
                    for (int a = 0; a < d; ++a) flux += T(L.i, a) * px[a];
                    acc[j] += w * (vv[L.i] * pt - flux);
                } else if (L.kind == "kinematic") {
                    acc[j] += w * (F(L.i, L.a) * pt - vv[L.i] * px[L.a]);
                } else {
                    acc[j] += w * (F(L.i, L.a) * px[L.b] - F(L.i, L.b) * px[L.a]);
                }
            }
        };

        // iterated composite Gauss: t x s x tau1 (x tau2)
        const GaussRule& rule = gauss_legendre(quad.gauss_order);
        auto for_axis = [&rule](double a, double b, const std::vector<double>& brk, double target,
                                auto&& body) {
            std::vector<double> seg{a, b};
            for (double x : brk)
                if (x > a && x < b) seg.push_back(x);
            std::sort(seg.begin(), seg.end());
            for (std::size_t i = 0; i + 1 < seg.size(); ++i) {
                auto panels = panelize(seg[i], seg[i + 1], target);
                for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
                    double mid = 0.5 * (panels[p] + panels[p + 1]);
                    double half = 0.5 * (panels[p + 1] - panels[p]);
                    for (std::size_t g = 0; g < rule.nodes.size(); ++g)
                        body(mid + half * rule.nodes[g], half * rule.weights[g]);
                }
            }
        };

        for_axis(ta, tb, {}, target_t, [&](double t, double wt) {
            for_axis(sa, sb, sbreaks, target_x, [&](double s, double ws) {
                for_axis(tau_ranges[0].first, tau_ranges[0].second, {}, target_x,
                         [&](double q1, double w1) {
                             if (d == 2) {
                                 add_node(wt * ws * w1, t, s, point(s, {q1}), false);
                             } else {
                                 for_axis(tau_ranges[1].first, tau_ranges[1].second, {}, target_x,
                                          [&](double q2, double w2) {
                                              add_node(wt * ws * w1 * w2, t, s,
                                                       point(s, {q1, q2}), false);
                                          });
                             }
                         });
            });
        });

        if (touches) {
            for_axis(sa, sb, sbreaks, target_x, [&](double s, double ws) {
                for_axis(tau_ranges[0].first, tau_ranges[0].second, {}, target_x,
                         [&](double q1, double w1) {
                             if (d == 2) {
                                 add_node(ws * w1, 1.0, s, point(s, {q1}), true);
                             } else {
                                 for_axis(tau_ranges[1].first, tau_ranges[1].second, {}, target_x,
                                          [&](double q2, double w2) {
                                              add_node(ws * w1 * w2, 1.0, s, point(s, {q1, q2}),
                                                       true);
                                          });
                             }
                         });
            });
        }

        for (std::size_t j = 0; j < laws.size(); ++j) {
            double r = std::fabs(acc[j]);
            rep.max_residual = std::max(rep.max_residual, r);
            if (laws[j].kind == "momentum") rep.max_momentum = std::max(rep.max_momentum, r);
            else if (laws[j].kind == "kinematic")
                rep.max_kinematic = std::max(rep.max_kinematic, r);
            else
                rep.max_involution = std::max(rep.max_involution, r);
        }
    }
    return rep;
}

RHReport rh_residual(const TwinningSolution& sol, int t_pts) {
    RHReport rep;
    rep.condition_names = {"velocity_jump", "traction_jump", "rank_one_compat"};
    rep.max_residuals.assign(3, 0.0);
    for (double s0 : {0.0, static_cast<double>(sol.fraction)})
        for (int i = 0; i < t_pts; ++i) {
            double t = 1.0 + static_cast<double>(i) / (t_pts - 1);
            auto st = sol.interface_states(s0, t);
            double vj = (st.v_right - st.v_left).norm();
            Mat Tl = sol.W.first_derivative(st.F_left) + st.gradV_left;
            Mat Tr = sol.W.first_derivative(st.F_right) + st.gradV_right;
            double tj = ((Tr - Tl) * sol.nu).norm();
            Mat dF = st.F_right - st.F_left;
            double rc = 0.0;
            for (int ii = 0; ii < sol.d; ++ii)
                for (int a = 0; a < sol.d; ++a)
                    for (int b = 0; b < sol.d; ++b)
                        rc = std::max(rc, std::fabs(sol.nu[b] * dF(ii, a) - sol.nu[a] * dF(ii, b)));
            rep.max_residuals[0] = std::max(rep.max_residuals[0], vj);
            rep.max_residuals[1] = std::max(rep.max_residuals[1], tj);
            rep.max_residuals[2] = std::max(rep.max_residuals[2], rc);
        }
    rep.max_residual =
        std::max({rep.max_residuals[0], rep.max_residuals[1], rep.max_residuals[2]});
    return rep;
}

double interior_residual(const TwinningSolution& sol) {
    const double ht = 1e-3, hx = 1e-3;
    double worst = 0.0;
    auto tans = tangent_basis(sol.nu);
    for (double t : {1.05, 1.5, 1.95})
        for (double s : {0.5 * sol.fraction, 0.5 * (1.0 + sol.fraction)}) {
            Vec x = s * sol.nu + 0.37 * tans[0];
            // F_t = grad v
            for (int i = 0; i < sol.d; ++i)
                for (int a = 0; a < sol.d; ++a) {
                    auto f = [&](double tt) { return sol.grad_y(tt, x)(i, a); };
                    auto g = [&](double h) {
                        Vec xp = x;
                        xp[a] += h;
                        return sol.v(t, xp)[i];
                    };
                    double r = d1_4(f, t, ht) - (g(hx) - g(-hx)) / (2.0 * hx);
                    worst = std::max(worst, std::fabs(r));
                }
            // v_t = div T
            for (int i = 0; i < sol.d; ++i) {
                auto f = [&](double tt) { return sol.v(tt, x)[i]; };
                double divT = 0.0;
                for (int a = 0; a < sol.d; ++a) {
                    auto g = [&](double h) {
                        Vec xp = x;
                        xp[a] += h;
                        return sol.total_stress(t, xp)(i, a);
                    };
                    divT += (g(hx) - g(-hx)) / (2.0 * hx);
                }
                worst = std::max(worst, std::fabs(d1_4(f, t, ht) - divT));
            }
        }
    return worst;
}

// ---------------------------------------------------------------------------
// Certification bundles
// ---------------------------------------------------------------------------

Certification certify(const PiecewisePeriodicSolution& sol, const std::vector<TestFunction>& tests,
                      const QuadratureSpec& quad, const Tolerances& tol) {
    Certification c;
    c.tol = tol;
    c.rh = (sol.fraction < 1.0) ? rh_residual(sol) : RHReport{};
    c.weak_max = weak_residual(sol, tests, quad).max_residual;
    c.interior_max = interior_residual(sol);
    c.rh_pass = c.rh.max_residual < tol.rh;
    c.weak_pass = c.weak_max < tol.weak;
    c.interior_pass = c.interior_max < tol.interior;
    return c;
}

Certification certify(const TwinningSolution& sol, const std::vector<TestFunctionND>& tests,
                      const QuadratureSpec& quad, const Tolerances& tol) {
    Certification c;
    c.tol = tol;
    c.rh = rh_residual(sol);
    c.weak_max = weak_residual(sol, tests, quad).max_residual;
    c.interior_max = interior_residual(sol);
    c.rh_pass = c.rh.max_residual < tol.rh;
    c.weak_pass = c.weak_max < tol.weak;
    c.interior_pass = c.interior_max < tol.interior;
    return c;
}

// ---------------------------------------------------------------------------
// Weak-convergence rates
// ---------------------------------------------------------------------------

RateReport weak_convergence_rate(const PiecewisePeriodicSolution& base,
                                 const std::vector<int>& n_list,
                                 const std::vector<TestFunction>& tests,
                                 const QuadratureSpec& quad) {
    using constructors::SystemTag;
    if (n_list.size() < 3)
        throw std::invalid_argument("weak_convergence_rate: need >= 3 mode values");
    RateReport rep;
    rep.n_list = n_list;

    auto limits = constructors::weak_limits(base);

    // weak gap of one scalar field against its limit
    auto weak_gap = [&](const PiecewisePeriodicSolution& sol,
                        const std::function<double(double, double)>& field,
                        const std::function<double(double, double)>& limit) {
        double worst = 0.0;
        for (const auto& phi : tests) {
            Support sup = clip_support(phi);
            const double target_t = phi.r_t / std::pow(2.0, quad.refinement);
            const double target_x = phi.r_x / std::pow(2.0, quad.refinement);
            auto outer = [&](double t) {
                std::vector<double> breaks = sol.interface_positions(t, sup.xa, sup.xb);
                auto f = [&](double x) {
                    return (field(t, x) - limit(t, x)) * phi.value(t, x);
                };
                return composite(f, sup.xa, sup.xb, breaks, target_x, quad.gauss_order);
            };
            double val = composite(outer, sup.ta, sup.tb, {}, target_t, quad.gauss_order);
            worst = std::max(worst, std::fabs(val));
        }
        return worst;
    };

    std::vector<std::string> quantities;
    if (base.tag == SystemTag::euler) {
        quantities = {"rho"};
    } else {
        quantities = {"u", "v_x"};
        if (base.has_temperature()) quantities.push_back("theta");
    }
    for (const auto& q : quantities) rep.gaps[q] = {};

    for (int n : n_list) {
        auto sol = constructors::rescale(base, n);
        for (const auto& q : quantities) {
            std::function<double(double, double)> field, limit;
            if (q == "rho" || q == "u") {
                field = [sol](double t, double z) { return sol.eval(t, z).u; };
                limit = [&limits](double t, double) { return limits.u_limit(t); };
            } else if (q == "v_x") {
                field = [sol](double t, double z) { return sol.eval(t, z).v_x; };
                limit = [&limits](double, double) { return limits.vx_limit; };
            } else {
                field = [sol](double t, double z) { return sol.eval(t, z).theta; };
                limit = [&limits](double t, double) { return limits.theta_limit(t); };
            }
            rep.gaps[q].push_back(weak_gap(sol, field, limit));
        }
        // strong L2 of the velocity over Q = [1,2] x (-1,1)
        if (base.tag != SystemTag::euler) {
            auto sol_n = sol;
            auto vbar = limits.v_limit;
            auto f = [&](double x) {
                double dv = sol_n.eval(1.5, x).v - vbar(x);  // v is time-independent
                return dv * dv;
            };
            std::vector<double> breaks = sol_n.interface_positions(1.5, -1.0, 1.0);
            double sq_int = composite(f, -1.0, 1.0, breaks, 2.0 / (8.0 * n), quad.gauss_order);
            rep.v_l2_errors.push_back(std::sqrt(sq_int));  // time factor is 1
        }
    }

    std::vector<double> ns;
    for (int n : n_list) ns.push_back(static_cast<double>(n));
    for (const auto& q : quantities) rep.slopes[q] = loglog_slope(ns, rep.gaps[q]);
    if (!rep.v_l2_errors.empty()) rep.v_l2_slope = loglog_slope(ns, rep.v_l2_errors);
    return rep;
}

CompositionGap sigma_composition_gap(const PiecewisePeriodicSolution& bar_sol) {
    using constructors::SystemTag;
    if (bar_sol.tag != SystemTag::bar && bar_sol.tag != SystemTag::viscoplastic)
        throw std::invalid_argument("sigma_composition_gap: bar-type solution required");
    const auto& sigma = *bar_sol.law;
    const double a = bar_sol.a, b = bar_sol.b, th = bar_sol.fraction;
    const double c = bar_sol.v0();
    CompositionGap out;
    for (int i = 0; i < 33; ++i) {
        double t = 1.0 + static_cast<double>(i) / 32.0;
        double mix = th * sigma.value(a * t) + (1.0 - th) * sigma.value(b * t);
        out.sup_gap = std::max(out.sup_gap, std::fabs(mix - sigma.value(c * t)));
    }
    // mass-normalized bump placed in the early window where the gap is one-signed
    TestFunction phi;
    phi.t0 = 1.15;
    phi.r_t = 0.1;
    phi.x0 = 0.0;
    phi.r_x = 0.4;
    double mass = 0.0, integral = 0.0;
    auto outer = [&](double t, bool weigh) {
        auto f = [&](double x) {
            double mix = th * sigma.value(a * t) + (1.0 - th) * sigma.value(b * t);
            double g = mix - sigma.value(c * t);
            return (weigh ? g : 1.0) * phi.value(t, x);
        };
        return composite(f, phi.x0 - phi.r_x, phi.x0 + phi.r_x, {}, phi.r_x / 8.0, 8);
    };
    mass = composite([&](double t) { return outer(t, false); }, phi.t0 - phi.r_t, phi.t0 + phi.r_t,
                     {}, phi.r_t / 8.0, 8);
    integral = composite([&](double t) { return outer(t, true); }, phi.t0 - phi.r_t,
                         phi.t0 + phi.r_t, {}, phi.r_t / 8.0, 8);
    out.weak_gap = std::fabs(integral / mass);
    return out;
}

}  // namespace oscilab::weakform
