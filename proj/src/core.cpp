// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0

#include "oscilab/core.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <memory>

namespace oscilab {

namespace {

// Nodes via Newton iteration on Legendre polynomials, computed once per order.
GaussRule compute_rule(int n) {
    GaussRule r;
    r.nodes.resize(static_cast<std::size_t>(n));
    r.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            if (n == 1) { p1 = x; }
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double pn = (n == 1) ? x : p1;
            double pm = (n == 1) ? 1.0 : p0;
            pp = n * (x * pn - pm) / (x * x - 1.0);
            double dx = pn / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        r.nodes[static_cast<std::size_t>(i)] = x;
        r.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    std::reverse(r.nodes.begin(), r.nodes.end());
    std::reverse(r.weights.begin(), r.weights.end());
    return r;
}

}  // namespace

const GaussRule& gauss_legendre(int npts) {
    if (npts < 1 || npts > 64) throw std::invalid_argument("gauss_legendre: order out of range");
    static std::map<int, GaussRule> cache;
    auto it = cache.find(npts);
    if (it == cache.end()) it = cache.emplace(npts, compute_rule(npts)).first;
    return it->second;
}

double gauss_integrate(const std::function<double(double)>& f, double a, double b, int npts) {
    const GaussRule& r = gauss_legendre(npts);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
    return s * half;
}

double gauss_integrate_split(const std::function<double(double)>& f, double a, double b,
                             const std::vector<double>& interior_breaks, int npts) {
    std::vector<double> pts;
    pts.push_back(a);
    for (double x : interior_breaks)
        if (x > a && x < b) pts.push_back(x);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        if (pts[i + 1] > pts[i]) s += gauss_integrate(f, pts[i], pts[i + 1], npts);
    return s;
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double fa, double b,
                            double fb, double m, double fm, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(a, fa, m, fm, flm);
    double right = simpson(m, fm, b, fb, frm);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    double whole = simpson(a, fa, b, fb, fm);
    return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

std::function<double(double)> cumulative_integral(std::function<double(double)> f,
                                                  std::vector<double> knots, double x_ref,
                                                  int gauss_pts) {
    if (knots.size() < 2) throw std::invalid_argument("cumulative_integral: need >= 2 knots");
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    auto cums = std::make_shared<std::vector<double>>();
    cums->push_back(0.0);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        cums->push_back(cums->back() + gauss_integrate(f, knots[i], knots[i + 1], gauss_pts));
    auto kn = std::make_shared<std::vector<double>>(std::move(knots));
    auto fn = std::make_shared<std::function<double(double)>>(std::move(f));
    auto raw = [kn, cums, fn, gauss_pts](double x) {
        const auto& k = *kn;
        std::size_t i = 0;
        while (i + 2 < k.size() && x > k[i + 1]) ++i;
        return (*cums)[i] + gauss_integrate(*fn, k[i], x, gauss_pts);
    };
    const double base = raw(x_ref);
    return [raw, base](double x) { return raw(x) - base; };
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("lsq_slope: need >= 2 points");
    double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double loglog_slope(const std::vector<double>& n, const std::vector<double>& e, double floor) {
    bool all_zero = true;
    for (double v : e)
        if (v > floor) all_zero = false;
    if (all_zero) return -std::numeric_limits<double>::infinity();
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < n.size(); ++i) {
        lx.push_back(std::log(n[i]));
        ly.push_back(std::log(std::max(e[i], floor)));
    }
    return lsq_slope(lx, ly);
}

}  // namespace oscilab
