// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscilab {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Small fixed-capacity vectors/matrices for d in {2,3} (value semantics, no heap).
// ---------------------------------------------------------------------------

class Vec {
public:
    Vec() = default;
    explicit Vec(int d) : d_(check_dim(d)) { a_.fill(0.0); }
    Vec(double x, double y) : d_(2), a_{x, y, 0.0} {}
    Vec(double x, double y, double z) : d_(3), a_{x, y, z} {}

    int dim() const { return d_; }
    double& operator[](int i) { return a_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return a_[static_cast<std::size_t>(i)]; }

    Vec& operator+=(const Vec& o) { for (int i = 0; i < d_; ++i) a_[i] += o[i]; return *this; }
    Vec& operator-=(const Vec& o) { for (int i = 0; i < d_; ++i) a_[i] -= o[i]; return *this; }
    Vec& operator*=(double s) { for (int i = 0; i < d_; ++i) a_[i] *= s; return *this; }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator*(Vec a, double s) { return a *= s; }

    double dot(const Vec& o) const {
        double s = 0.0;
        for (int i = 0; i < d_; ++i) s += a_[i] * o[i];
        return s;
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec normalized() const;

    static Vec unit(int d, int axis) { Vec v(d); v[axis] = 1.0; return v; }

private:
    static int check_dim(int d) {
        if (d < 1 || d > 3) throw std::invalid_argument("Vec: dimension must be 1..3");
        return d;
    }
    int d_ = 0;
    std::array<double, 3> a_{};
};

class Mat {
public:
    Mat() = default;
    explicit Mat(int d) : d_(check_dim(d)) { a_.fill(0.0); }

    int dim() const { return d_; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * d_ + j)]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * d_ + j)]; }

    Mat& operator+=(const Mat& o) { for (int k = 0; k < d_ * d_; ++k) a_[k] += o.a_[k]; return *this; }
    Mat& operator-=(const Mat& o) { for (int k = 0; k < d_ * d_; ++k) a_[k] -= o.a_[k]; return *this; }
    Mat& operator*=(double s) { for (int k = 0; k < d_ * d_; ++k) a_[k] *= s; return *this; }

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(double s, Mat a) { return a *= s; }
    friend Mat operator*(Mat a, double s) { return a *= s; }

    Vec operator*(const Vec& v) const {
        Vec r(d_);
        for (int i = 0; i < d_; ++i) {
            double s = 0.0;
            for (int j = 0; j < d_; ++j) s += (*this)(i, j) * v[j];
            r[i] = s;
        }
        return r;
    }
    Mat operator*(const Mat& o) const {
        Mat r(d_);
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) {
                double s = 0.0;
                for (int k = 0; k < d_; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }

    Mat transpose() const {
        Mat r(d_);
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (int k = 0; k < d_ * d_; ++k) s += a_[k] * a_[k];
        return std::sqrt(s);
    }

    double max_asymmetry() const {
        double m = 0.0;
        for (int i = 0; i < d_; ++i)
            for (int j = i + 1; j < d_; ++j) m = std::max(m, std::fabs((*this)(i, j) - (*this)(j, i)));
        return m;
    }

    static Mat identity(int d) {
        Mat m(d);
        for (int i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }
    static Mat outer(const Vec& a, const Vec& b) {
        Mat m(a.dim());
        for (int i = 0; i < a.dim(); ++i)
            for (int j = 0; j < b.dim(); ++j) m(i, j) = a[i] * b[j];
        return m;
    }

private:
    static int check_dim(int d) {
        if (d < 1 || d > 3) throw std::invalid_argument("Mat: dimension must be 1..3");
        return d;
    }
    int d_ = 0;
    std::array<double, 9> a_{};
};

inline Vec Vec::normalized() const {
    double n = norm();
    if (n == 0.0) throw std::invalid_argument("Vec::normalized: zero vector");
    Vec v = *this;
    v *= 1.0 / n;
    return v;
}

// Rank-4 tensor A_{klab}, d^4 entries, d in {2,3}.
class Tensor4 {
public:
    Tensor4() = default;
    explicit Tensor4(int d) : d_(d) {
        if (d < 2 || d > 3) throw std::invalid_argument("Tensor4: dimension must be 2 or 3");
        a_.assign(static_cast<std::size_t>(d * d * d * d), 0.0);
    }

    int dim() const { return d_; }
    double& operator()(int k, int l, int a, int b) { return a_[idx(k, l, a, b)]; }
    double operator()(int k, int l, int a, int b) const { return a_[idx(k, l, a, b)]; }

    // Enforce H1: symmetrize over k<->l and a<->b.
    Tensor4 h1_symmetrized() const {
        Tensor4 t(d_);
        for (int k = 0; k < d_; ++k)
            for (int l = 0; l < d_; ++l)
                for (int a = 0; a < d_; ++a)
                    for (int b = 0; b < d_; ++b)
                        t(k, l, a, b) = 0.25 * ((*this)(k, l, a, b) + (*this)(l, k, a, b) +
                                                (*this)(k, l, b, a) + (*this)(l, k, b, a));
        return t;
    }

    double max_h1_violation() const {
        double m = 0.0;
        for (int k = 0; k < d_; ++k)
            for (int l = 0; l < d_; ++l)
                for (int a = 0; a < d_; ++a)
                    for (int b = 0; b < d_; ++b) {
                        m = std::max(m, std::fabs((*this)(k, l, a, b) - (*this)(l, k, a, b)));
                        m = std::max(m, std::fabs((*this)(k, l, a, b) - (*this)(k, l, b, a)));
                    }
        return m;
    }

    // A_{klab} = c * delta_kl * delta_ab (acoustic tensor c*I for any unit nu).
    static Tensor4 isotropic(int d, double c) {
        Tensor4 t(d);
        for (int k = 0; k < d; ++k)
            for (int a = 0; a < d; ++a) t(k, k, a, a) = c;
        return t;
    }

    // A = sum_p S^p_{kl} T^p_{ab} with S, T symmetric; H1 holds by construction and
    // Q(nu) = sum_p (nu . T^p nu) S^p, positive definite when S^p are SPD and nu.T^p nu > 0.
    static Tensor4 from_symmetric_products(const std::vector<std::pair<Mat, Mat>>& terms) {
        if (terms.empty()) throw std::invalid_argument("from_symmetric_products: empty");
        int d = terms.front().first.dim();
        Tensor4 t(d);
        for (const auto& [S, T] : terms)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    for (int a = 0; a < d; ++a)
                        for (int b = 0; b < d; ++b) t(k, l, a, b) += S(k, l) * T(a, b);
        return t;
    }

private:
    std::size_t idx(int k, int l, int a, int b) const {
        return static_cast<std::size_t>(((k * d_ + l) * d_ + a) * d_ + b);
    }
    int d_ = 0;
    std::vector<double> a_;
};

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

// Gauss-Legendre nodes/weights on [-1,1]; supported orders 1..16 and 32.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int npts);

// Integrate f over [a,b] with a single n-point Gauss rule.
double gauss_integrate(const std::function<double(double)>& f, double a, double b, int npts);

// Composite: Gauss rule on each of the subintervals defined by sorted breakpoints.
double gauss_integrate_split(const std::function<double(double)>& f, double a, double b,
                             const std::vector<double>& interior_breaks, int npts);

// Adaptive Simpson to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

// F(x) = int_{x_ref}^x f with cached partial sums at the supplied knots
// (knots should include every smoothness breakpoint of f).
std::function<double(double)> cumulative_integral(std::function<double(double)> f,
                                                  std::vector<double> knots, double x_ref,
                                                  int gauss_pts = 32);

// ---------------------------------------------------------------------------
// Cubic Hermite segment on [x0,x1] with endpoint values/slopes.
// ---------------------------------------------------------------------------
struct HermiteSegment {
    double x0 = 0.0, x1 = 1.0;
    double f0 = 0.0, f1 = 0.0;
    double d0 = 0.0, d1 = 0.0;

    double value(double x) const {
        double h = x1 - x0, s = (x - x0) / h;
        double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * h * d0 +
               (-2 * s3 + 3 * s2) * f1 + (s3 - s2) * h * d1;
    }
    double derivative(double x) const {
        double h = x1 - x0, s = (x - x0) / h;
        double s2 = s * s;
        return ((6 * s2 - 6 * s) * f0 + (3 * s2 - 4 * s + 1) * h * d0 +
                (-6 * s2 + 6 * s) * f1 + (3 * s2 - 2 * s) * h * d1) / h;
    }
};

// ---------------------------------------------------------------------------
// Misc
// ---------------------------------------------------------------------------

// Least-squares slope of y vs x.
double lsq_slope(const std::vector<double>& x, const std::vector<double>& y);

// Slope of log|e_n| vs log n; returns -inf if all e below floor.
double loglog_slope(const std::vector<double>& n, const std::vector<double>& e,
                    double floor = 1e-14);

inline double sq(double x) { return x * x; }

}  // namespace oscilab
