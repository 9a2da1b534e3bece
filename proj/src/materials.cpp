// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0

#include "oscilab/materials.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "json.hpp"

namespace oscilab::materials {

ScalarC1 ScalarC1::linear(double slope, double intercept) {
    return {[=](double u) { return slope * u + intercept; }, [=](double) { return slope; }};
}

ScalarC1 ScalarC1::constant(double c) {
    return {[=](double) { return c; }, [](double) { return 0.0; }};
}

void PhasePair::validate() const {
    if (!(a > 0.0)) throw std::invalid_argument("PhasePair: a must be > 0");
    if (!(2.0 * a < b)) throw std::invalid_argument("PhasePair: windows overlap (need 2a < b)");
}

MaterialLaw::MaterialLaw(LawKind kind, PhasePair pair, double exponent, std::vector<Piece> pieces)
    : kind_(kind), pair_(pair), exponent_(exponent), pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw std::invalid_argument("MaterialLaw: no pieces");
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i)
        if (std::fabs(pieces_[i].hi - pieces_[i + 1].lo) > 1e-12)
            throw std::invalid_argument("MaterialLaw: pieces not contiguous");
}

const MaterialLaw::Piece& MaterialLaw::find(double u) const {
    if (u < lo() - 1e-12 || u > hi() + 1e-12)
        throw std::domain_error("MaterialLaw: evaluation outside domain");
    for (const auto& p : pieces_)
        if (u <= p.hi || &p == &pieces_.back()) return p;
    return pieces_.back();
}

double MaterialLaw::value(double u) const { return find(u).f(u); }
double MaterialLaw::derivative(double u) const { return find(u).df(u); }

double MaterialLaw::constraint_residual(int grid_pts) const {
    double worst = 0.0;
    if (kind_ == LawKind::tau) {
        double mn = std::numeric_limits<double>::max();
        for (int i = 0; i < grid_pts; ++i) {
            double u = lo() + (hi() - lo()) * i / (grid_pts - 1);
            mn = std::min(mn, value(u));
        }
        return std::max(0.0, -mn);
    }
    for (int i = 0; i < grid_pts; ++i) {
        double t = 1.0 + static_cast<double>(i) / (grid_pts - 1);
        double r = 0.0;
        switch (kind_) {
            case LawKind::sigma:
                r = std::fabs(value(t * pair_.a) - value(t * pair_.b));
                break;
            case LawKind::phi:
                r = std::fabs(value(t * pair_.a) -
                              value(t * pair_.b) * std::pow(pair_.b / pair_.a, exponent_));
                break;
            case LawKind::pressure:
                r = std::fabs(value(1.0 / (pair_.a * t)) - value(1.0 / (pair_.b * t)));
                break;
            case LawKind::tau:
                break;
        }
        worst = std::max(worst, r);
    }
    return worst;
}

double MaterialLaw::derivative_consistency(int per_piece) const {
    double worst = 0.0;
    for (const auto& p : pieces_) {
        double w = p.hi - p.lo;
        if (w <= 0.0) continue;
        for (int i = 1; i <= per_piece; ++i) {
            double u = p.lo + w * i / (per_piece + 1);
            double h = 1e-6 * std::max(1.0, std::fabs(u));
            if (u - h < p.lo || u + h > p.hi) continue;
            double fd = (p.f(u + h) - p.f(u - h)) / (2.0 * h);
            double d = p.df(u);
            worst = std::max(worst, std::fabs(fd - d) / std::max(1.0, std::fabs(d)));
        }
    }
    return worst;
}

std::vector<double> MaterialLaw::breakpoints() const {
    std::vector<double> b;
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) b.push_back(pieces_[i].hi);
    return b;
}

namespace {

MaterialLaw::Piece linear_piece(double lo, double hi, double f0, double d0, double at) {
    return {lo, hi, [=](double u) { return f0 + d0 * (u - at); }, [=](double) { return d0; }};
}

MaterialLaw::Piece hermite_piece(double lo, double hi, double f0, double d0, double f1, double d1) {
    HermiteSegment seg{lo, hi, f0, f1, d0, d1};
    return {lo, hi, [seg](double u) { return seg.value(u); },
            [seg](double u) { return seg.derivative(u); }};
}

// positive bridge: exp of a Hermite interpolant of log f
MaterialLaw::Piece log_hermite_piece(double lo, double hi, double f0, double d0, double f1,
                                     double d1) {
    if (!(f0 > 0.0) || !(f1 > 0.0))
        throw std::invalid_argument("log bridge requires positive endpoint values");
    HermiteSegment seg{lo, hi, std::log(f0), std::log(f1), d0 / f0, d1 / f1};
    return {lo, hi, [seg](double u) { return std::exp(seg.value(u)); },
            [seg](double u) { return std::exp(seg.value(u)) * seg.derivative(u); }};
}

}  // namespace

MaterialLaw build_sigma(const PhasePair& pair, const ScalarC1& base) {
    pair.validate();
    const double a = pair.a, b = pair.b;
    const double ratio = a / b;
    auto fB = [base, ratio](double u) { return base.f(u * ratio); };
    auto dB = [base, ratio](double u) { return base.df(u * ratio) * ratio; };

    std::vector<MaterialLaw::Piece> pieces;
    pieces.push_back(linear_piece(0.5 * a, a, base.f(a), base.df(a), a));
    pieces.push_back({a, 2.0 * a, base.f, base.df});
    pieces.push_back(hermite_piece(2.0 * a, b, base.f(2.0 * a), base.df(2.0 * a), fB(b), dB(b)));
    pieces.push_back({b, 2.0 * b, fB, dB});
    pieces.push_back(linear_piece(2.0 * b, 3.0 * b, fB(2.0 * b), dB(2.0 * b), 2.0 * b));
    return MaterialLaw(LawKind::sigma, pair, 0.0, std::move(pieces));
}

MaterialLaw build_phi(const PhasePair& pair, double exponent, const ScalarC1& base) {
    pair.validate();
    if (!(exponent >= 0.0)) throw std::invalid_argument("build_phi: exponent must be >= 0");
    const double a = pair.a, b = pair.b;
    for (double u : {a, 1.5 * a, 2.0 * a})
        if (!(base.f(u) > 0.0)) throw std::invalid_argument("build_phi: base must be positive");
    const double ratio = a / b;
    const double scale = std::pow(ratio, exponent);
    auto fB = [base, ratio, scale](double u) { return scale * base.f(u * ratio); };
    auto dB = [base, ratio, scale](double u) { return scale * base.df(u * ratio) * ratio; };

    std::vector<MaterialLaw::Piece> pieces;
    pieces.push_back(linear_piece(0.5 * a, a, base.f(a), base.df(a), a));
    pieces.push_back({a, 2.0 * a, base.f, base.df});
    pieces.push_back(
        log_hermite_piece(2.0 * a, b, base.f(2.0 * a), base.df(2.0 * a), fB(b), dB(b)));
    pieces.push_back({b, 2.0 * b, fB, dB});
    pieces.push_back(linear_piece(2.0 * b, 3.0 * b, fB(2.0 * b), dB(2.0 * b), 2.0 * b));
    return MaterialLaw(LawKind::phi, pair, exponent, std::move(pieces));
}

MaterialLaw build_pressure(const PhasePair& pair, const ScalarC1& base) {
    pair.validate();
    const double a = pair.a, b = pair.b;
    const double ratio = b / a;  // window B -> window A
    auto fB = [base, ratio](double r) { return base.f(r * ratio); };
    auto dB = [base, ratio](double r) { return base.df(r * ratio) * ratio; };

    const double blo = 1.0 / (2.0 * b), bhi = 1.0 / b;
    const double alo = 1.0 / (2.0 * a), ahi = 1.0 / a;

    std::vector<MaterialLaw::Piece> pieces;
    pieces.push_back(linear_piece(0.25 * blo, blo, fB(blo), dB(blo), blo));
    pieces.push_back({blo, bhi, fB, dB});
    pieces.push_back(hermite_piece(bhi, alo, fB(bhi), dB(bhi), base.f(alo), base.df(alo)));
    pieces.push_back({alo, ahi, base.f, base.df});
    pieces.push_back(linear_piece(ahi, 2.0 * ahi, base.f(ahi), base.df(ahi), ahi));
    return MaterialLaw(LawKind::pressure, pair, 0.0, std::move(pieces));
}

MaterialLaw law_from_callable(LawKind kind, const PhasePair& pair, double lo, double hi,
                              const ScalarC1& profile, double exponent) {
    std::vector<MaterialLaw::Piece> pieces;
    pieces.push_back({lo, hi, profile.f, profile.df});
    return MaterialLaw(kind, pair, exponent, std::move(pieces));
}

CommonStress common_stress(const PhasePair& pair, const MaterialLaw& sigma, double mu, double t) {
    if (t < 1.0 || t > 2.0) throw std::invalid_argument("common_stress: t outside [1,2]");
    CommonStress cs;
    cs.value = mu / t + sigma.value(pair.a * t);
    cs.mismatch = std::fabs(sigma.value(pair.a * t) - sigma.value(pair.b * t));
    return cs;
}

// ---------------------------------------------------------------------------

double StoredEnergy::fd_first_derivative_error(const Mat& F) const {
    Mat S = first_derivative(F);
    double scale = std::max(1.0, S.frobenius_norm());
    double worst = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int a = 0; a < dim; ++a) {
            double h = 1e-6 * std::max(1.0, std::fabs(F(i, a)));
            Mat Fp = F, Fm = F;
            Fp(i, a) += h;
            Fm(i, a) -= h;
            double fd = (value(Fp) - value(Fm)) / (2.0 * h);
            worst = std::max(worst, std::fabs(fd - S(i, a)) / scale);
        }
    return worst;
}

double StoredEnergy::fd_quadratic_form_error(const Mat& F, const Vec& xi, const Vec& nu) const {
    Mat R = Mat::outer(xi, nu);
    double h = 1e-5;
    Mat Fp = F + h * R, Fm = F - h * R;
    Mat Sp = first_derivative(Fp), Sm = first_derivative(Fm);
    double fd = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int a = 0; a < dim; ++a) fd += (Sp(i, a) - Sm(i, a)) / (2.0 * h) * xi[i] * nu[a];
    double form = xi.dot(acoustic(F, nu) * xi);
    return std::fabs(fd - form) / std::max(1.0, std::fabs(form));
}

StoredEnergy shear_energy(const ScalarC2& h, const Vec& xi_dir, const Vec& nu_hat,
                          double quad_coeff) {
    const Vec xi = xi_dir.normalized();
    const Vec nh = nu_hat.normalized();
    const int d = xi.dim();
    StoredEnergy W;
    W.dim = d;
    auto strain = [xi, nh](const Mat& F) { return xi.dot(F * nh); };
    W.value = [h, strain, quad_coeff](const Mat& F) {
        return h.f(strain(F)) + 0.5 * quad_coeff * sq(F.frobenius_norm());
    };
    W.first_derivative = [h, strain, xi, nh, quad_coeff, d](const Mat& F) {
        Mat S = Mat::outer(xi, nh) * h.df(strain(F));
        (void)d;
        return S + quad_coeff * F;
    };
    W.acoustic = [h, strain, xi, quad_coeff, nh, d](const Mat& F, const Vec& nu) {
        double e = strain(F);
        double c = h.d2f(e) * sq(nh.dot(nu));
        Mat H = Mat::outer(xi, xi) * c;
        return H + (quad_coeff * nu.dot(nu)) * Mat::identity(d);
    };
    W.segment_breaks = [](const Mat&, const Mat&) { return std::vector<double>{}; };
    return W;
}

StoredEnergy quadratic_energy(int d, double c) {
    StoredEnergy W;
    W.dim = d;
    W.value = [c](const Mat& F) { return 0.5 * c * sq(F.frobenius_norm()); };
    W.first_derivative = [c](const Mat& F) { return c * F; };
    W.acoustic = [c, d](const Mat&, const Vec& nu) { return (c * nu.dot(nu)) * Mat::identity(d); };
    W.segment_breaks = [](const Mat&, const Mat&) { return std::vector<double>{}; };
    return W;
}

void TwinningPair::validate() const {
    if (std::fabs(nu.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("TwinningPair: nu must be a unit vector");
    if ((b_vec - a_vec).norm() == 0.0)
        throw std::invalid_argument("TwinningPair: amplitude jump is zero");
}

StoredEnergy make_condition_C_energy(const TwinningPair& pair, const ScalarC1& base,
                                     double quad_coeff) {
    pair.validate();
    if (quad_coeff != 0.0)
        throw std::invalid_argument(
            "make_condition_C_energy: only the pure shear family (c = 0) satisfies (C)");
    const Vec jump = pair.b_vec - pair.a_vec;
    const Vec xi = jump.normalized();
    const double e0 = xi.dot(pair.F0 * pair.nu);
    const double eA = e0 + xi.dot(pair.a_vec);
    const double eB = e0 + xi.dot(pair.b_vec);
    const double off = -jump.norm();  // shift carried by the viscous stress jump
    if (!(eA > 0.0) || !(2.0 * eA < eB))
        throw std::invalid_argument(
            "make_condition_C_energy: need 0 < e- and 2 e- < e+ for the window transport");

    // h' on [eA, 2eA] = base; on [eB, 2eB]: h'(u) = base(u eA/eB) + off.
    const double ratio = eA / eB;
    auto fB = [base, ratio, off](double u) { return base.f(u * ratio) + off; };
    auto dB = [base, ratio](double u) { return base.df(u * ratio) * ratio; };

    std::vector<MaterialLaw::Piece> pieces;
    pieces.push_back(linear_piece(0.5 * eA, eA, base.f(eA), base.df(eA), eA));
    pieces.push_back({eA, 2.0 * eA, base.f, base.df});
    pieces.push_back(
        hermite_piece(2.0 * eA, eB, base.f(2.0 * eA), base.df(2.0 * eA), fB(eB), dB(eB)));
    pieces.push_back({eB, 2.0 * eB, fB, dB});
    pieces.push_back(linear_piece(2.0 * eB, 3.0 * eB, fB(2.0 * eB), dB(2.0 * eB), 2.0 * eB));
    // reuse MaterialLaw as the piecewise container for h'
    auto hprime = std::make_shared<MaterialLaw>(LawKind::sigma, PhasePair{eA, eB}, 0.0,
                                                std::move(pieces));

    // cumulative integral of h' for the energy value
    auto breaks = hprime->breakpoints();
    std::vector<double> knots;
    knots.push_back(hprime->lo());
    for (double x : breaks) knots.push_back(x);
    knots.push_back(hprime->hi());
    auto cum = std::make_shared<std::vector<double>>();
    cum->push_back(0.0);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        cum->push_back(cum->back() +
                       gauss_integrate([&](double u) { return hprime->value(u); }, knots[i],
                                       knots[i + 1], 32));
    auto knots_sh = std::make_shared<std::vector<double>>(knots);

    ScalarC2 h;
    h.f = [hprime, knots_sh, cum](double e) {
        const auto& kn = *knots_sh;
        std::size_t i = 0;
        while (i + 2 < kn.size() && e > kn[i + 1]) ++i;
        return (*cum)[i] +
               gauss_integrate([&](double u) { return hprime->value(u); }, kn[i], e, 32);
    };
    h.df = [hprime](double e) { return hprime->value(e); };
    h.d2f = [hprime](double e) { return hprime->derivative(e); };

    StoredEnergy W = shear_energy(h, xi, pair.nu, 0.0);
    // breakpoints of h' in the shear coordinate, mapped onto segments
    Vec nu_hat = pair.nu;
    W.segment_breaks = [breaks, xi, nu_hat](const Mat& F_start, const Mat& F_dir) {
        double c0 = xi.dot(F_start * nu_hat);
        double c1 = xi.dot(F_dir * nu_hat);
        std::vector<double> out;
        if (std::fabs(c1) < 1e-300) return out;
        for (double bpt : breaks) {
            double s = (bpt - c0) / c1;
            if (s > 0.0 && s < 1.0) out.push_back(s);
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    return W;
}

double condition_C_residual(const StoredEnergy& W, const TwinningPair& pair,
                            const std::vector<double>& t_grid) {
    pair.validate();
    const Vec jump = pair.b_vec - pair.a_vec;
    const Mat Fm = pair.F0 + Mat::outer(pair.a_vec, pair.nu);
    const Mat Fp = pair.F0 + Mat::outer(pair.b_vec, pair.nu);
    double worst = 0.0;
    for (double t : t_grid) {
        Mat Sp = W.first_derivative(t * Fp);
        Mat Sm = W.first_derivative(t * Fm);
        Vec r = (Sp - Sm) * pair.nu + jump;
        worst = std::max(worst, r.norm());
    }
    return worst;
}

double roc_quadratic_form(const StoredEnergy& W, const Mat& F, const Vec& xi, const Vec& nu) {
    if (!(xi.norm() > 0.0) || !(nu.norm() > 0.0))
        throw std::invalid_argument("roc_quadratic_form: xi, nu must be nonzero");
    return xi.dot(W.acoustic(F, nu) * xi);
}

LemmaReport lemma_contradiction_check(const StoredEnergy& W, const TwinningPair& pair, double t) {
    LemmaReport rep;
    rep.precondition_residual = condition_C_residual(W, pair, {t});
    if (rep.precondition_residual >= 1e-8)
        throw std::invalid_argument(
            "lemma_contradiction_check: condition (C) precondition fails; nothing to certify");

    const Vec jump = pair.b_vec - pair.a_vec;
    const Mat Fm = pair.F0 + Mat::outer(pair.a_vec, pair.nu);
    const Mat Start = t * Fm;
    const Mat Dir = t * Mat::outer(jump, pair.nu);
    std::vector<double> breaks =
        W.segment_breaks ? W.segment_breaks(Start, Dir) : std::vector<double>{};

    const int d = W.dim;
    Mat M_int(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            auto f = [&](double s) {
                Mat F = Start + s * Dir;
                return W.acoustic(F, pair.nu)(i, j);
            };
            M_int(i, j) = gauss_integrate_split(f, 0.0, 1.0, breaks, 16);
        }

    Vec lhs = t * (M_int * jump) + jump;
    rep.identity_residual = lhs.norm();
    rep.rayleigh = jump.dot(M_int * jump) / jump.dot(jump);
    rep.roc_violated = rep.rayleigh < 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

const char* kind_name(LawKind k) {
    switch (k) {
        case LawKind::sigma: return "sigma";
        case LawKind::phi: return "phi";
        case LawKind::pressure: return "pressure";
        case LawKind::tau: return "tau";
    }
    return "?";
}

LawKind kind_from(const std::string& s) {
    if (s == "sigma") return LawKind::sigma;
    if (s == "phi") return LawKind::phi;
    if (s == "pressure") return LawKind::pressure;
    if (s == "tau") return LawKind::tau;
    throw std::invalid_argument("unknown law kind: " + s);
}

}  // namespace

std::string MaterialLaw::to_json_string() const {
    nlohmann::json j;
    j["kind"] = kind_name(kind_);
    j["pair"] = {{"a", pair_.a}, {"b", pair_.b}};
    j["exponent"] = exponent_;
    j["domain"] = {lo(), hi()};
    const int npts = 257;
    std::vector<double> us, vs, ds;
    // knots include all piece boundaries so the reconstruction is C1-faithful
    std::vector<double> bdry = breakpoints();
    for (int i = 0; i < npts; ++i) us.push_back(lo() + (hi() - lo()) * i / (npts - 1));
    us.insert(us.end(), bdry.begin(), bdry.end());
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end()), us.end());
    for (double u : us) {
        vs.push_back(value(u));
        ds.push_back(derivative(u));
    }
    j["samples"] = {{"u", us}, {"value", vs}, {"derivative", ds}};
    return j.dump();
}

MaterialLaw MaterialLaw::from_json_string(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    LawKind kind = kind_from(j.at("kind").get<std::string>());
    PhasePair pair{j.at("pair").at("a").get<double>(), j.at("pair").at("b").get<double>()};
    double expn = j.at("exponent").get<double>();
    auto us = j.at("samples").at("u").get<std::vector<double>>();
    auto vs = j.at("samples").at("value").get<std::vector<double>>();
    auto ds = j.at("samples").at("derivative").get<std::vector<double>>();
    if (us.size() != vs.size() || us.size() != ds.size() || us.size() < 2)
        throw std::invalid_argument("MaterialLaw::from_json_string: bad sample arrays");
    // Piecewise cubic Hermite through the serialized knots.
    auto knots = std::make_shared<std::vector<double>>(us);
    auto vals = std::make_shared<std::vector<double>>(vs);
    auto dervs = std::make_shared<std::vector<double>>(ds);
    auto segment = [knots, vals, dervs](double u) {
        const auto& k = *knots;
        auto it = std::upper_bound(k.begin(), k.end(), u);
        std::size_t i = (it == k.begin()) ? 0 : static_cast<std::size_t>(it - k.begin()) - 1;
        if (i + 1 >= k.size()) i = k.size() - 2;
        return HermiteSegment{k[i], k[i + 1], (*vals)[i], (*vals)[i + 1], (*dervs)[i],
                              (*dervs)[i + 1]};
    };
    std::vector<Piece> pieces;
    pieces.push_back({us.front(), us.back(),
                      [segment](double u) { return segment(u).value(u); },
                      [segment](double u) { return segment(u).derivative(u); }});
    return MaterialLaw(kind, pair, expn, std::move(pieces));
}

}  // namespace oscilab::materials
