#pragma once

#include <cmath>
#include <complex>

namespace loopcmc {

using cplx = std::complex<double>;

/// 2x2 complex matrix with value semantics.
struct Mat2 {
    cplx a{}, b{};
    cplx c{}, d{};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }
    static Mat2 diag(cplx x, cplx y) { return {x, 0.0, 0.0, y}; }

    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 operator*(cplx s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2& operator+=(const Mat2& o) {
        a += o.a; b += o.b; c += o.c; d += o.d;
        return *this;
    }

    cplx det() const { return a * d - b * c; }
    cplx trace() const { return a + d; }

    /// Adjugate: swap diagonal, negate off-diagonal. Inverse for det = 1.
    Mat2 adjugate() const { return {d, -b, -c, a}; }
    Mat2 inverse() const { return adjugate() * (1.0 / det()); }
    Mat2 conj_transpose() const {
        return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
    }
    Mat2 conj() const { return {std::conj(a), std::conj(b), std::conj(c), std::conj(d)}; }

    double norm() const {
        return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
    }
    double max_abs() const {
        return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
    }
};

inline Mat2 operator*(cplx s, const Mat2& m) { return m * s; }

/// exp(X) in closed form: X = s*I + Y with Y traceless, exp = e^s (cosh(q) I + sinh(q)/q Y),
/// q^2 = -det Y.
inline Mat2 mat2_exp(const Mat2& x) {
    const cplx s = x.trace() * 0.5;
    const Mat2 y = x - Mat2::diag(s, s);
    const cplx q2 = -y.det();
    const cplx q = std::sqrt(q2);
    cplx ch, shq;  // cosh(q), sinh(q)/q
    if (std::abs(q) < 1e-6) {
        ch = 1.0 + q2 * (0.5 + q2 / 24.0);
        shq = 1.0 + q2 * (1.0 / 6.0 + q2 / 120.0);
    } else {
        ch = std::cosh(q);
        shq = std::sinh(q) / q;
    }
    const cplx es = std::exp(s);
    return Mat2::diag(ch, ch) * es + y * (shq * es);
}

/// Eigenvalues of a 2x2 matrix, pair ordered by ascending real part then imaginary part.
inline std::pair<cplx, cplx> mat2_eigenvalues(const Mat2& x) {
    const cplx h = x.trace() * 0.5;
    const cplx disc = std::sqrt(h * h - x.det());
    cplx e0 = h - disc, e1 = h + disc;
    if (e0.real() > e1.real() ||
        (e0.real() == e1.real() && e0.imag() > e1.imag()))
        std::swap(e0, e1);
    return {e0, e1};
}

}  // namespace loopcmc
