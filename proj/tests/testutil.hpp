#pragma once

#include <doctest.h>

#include <numbers>
#include <random>

#include "loopcmc/loop.hpp"

namespace testutil {

using loopcmc::cplx;
using loopcmc::Mat2;
using loopcmc::MatrixLoop;
using loopcmc::ScalarLoop;

inline double mat_dist(const Mat2& a, const Mat2& b) { return (a - b).norm(); }

inline double loop_dist(const MatrixLoop& a, const MatrixLoop& b) {
    double d = 0.0;
    const int n = std::max(a.trunc(), b.trunc());
    for (int k = -n; k <= n; ++k) d = std::max(d, (a.coeff(k) - b.coeff(k)).norm());
    return d;
}

// ---- closed forms for the plane potential (independent oracles) ----

// GWR frame Phi = [[1, z/lambda],[0, 1]]
inline MatrixLoop sphere_phi(cplx z) {
    std::vector<Mat2> c(3, Mat2::zero());
    c[1] = Mat2::identity();
    c[0] = Mat2{0.0, z, 0.0, 0.0};
    return MatrixLoop::from_coeffs(c);
}

// H3/AdS3 unitary factor F = (1-|z|^2)^(-1/2) [[1, z/lambda],[lambda conj z, 1]]
inline Mat2 sphere_unitary(cplx z, cplx lambda) {
    const double c = 1.0 / std::sqrt(1.0 - std::norm(z));
    return Mat2{c, c * z / lambda, c * lambda * std::conj(z), c};
}

// B = (1-|z|^2)^(-1/2) [[1, 0],[-lambda conj z, 1-|z|^2]]
inline Mat2 sphere_positive(cplx z, cplx lambda) {
    const double c = 1.0 / std::sqrt(1.0 - std::norm(z));
    return Mat2{c, 0.0, -c * lambda * std::conj(z), c * (1.0 - std::norm(z))};
}

// f = (1-|z|^2)^(-1) [[1+|z|^2, 2z],[2 conj z, 1+|z|^2]] (valid as continuation too)
inline Mat2 sphere_surface(cplx z) {
    const double n = std::norm(z);
    const double c = 1.0 / (1.0 - n);
    return Mat2{c * (1.0 + n), 2.0 * c * z, 2.0 * c * std::conj(z), c * (1.0 + n)};
}

// ---- random loop builders ----

// Random interior loop with det = 1 by construction (products of elementary
// unipotent and diagonal factors). The factor degrees fit into `budget`, so the
// product is exactly representable and stays unimodular to rounding.
inline MatrixLoop random_plus_loop(std::mt19937_64& rng, int budget, int factors = 5) {
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    MatrixLoop out = MatrixLoop::identity(0);
    int left = budget;
    for (int i = 0; i < factors; ++i) {
        const cplx a(u(rng), u(rng));
        const int dmax = left / (factors - i);
        std::uniform_int_distribution<int> deg(0, std::max(0, dmax));
        const int k = deg(rng);
        left -= k;
        const Mat2 n = (i % 2 == 0) ? Mat2{0.0, a, 0.0, 0.0} : Mat2{0.0, 0.0, a, 0.0};
        MatrixLoop fac = k == 0 ? MatrixLoop::constant(Mat2::identity() + n)
                                : MatrixLoop::term(k, n);
        if (k != 0) {
            std::vector<Mat2> c(2 * k + 1, Mat2::zero());
            c[k] = Mat2::identity();
            c[2 * k] = n;
            fac = MatrixLoop::from_coeffs(c);
        }
        out = mul(out, fac, out.trunc() + fac.trunc());
    }
    const double d = 1.0 + std::abs(u(rng));
    return mul(out, MatrixLoop::constant(Mat2::diag(d, 1.0 / d)), out.trunc());
}

// Random exterior unipotent-style loop, identity at infinity.
inline MatrixLoop random_minus_loop(std::mt19937_64& rng, int budget, int factors = 4) {
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    MatrixLoop out = MatrixLoop::identity(0);
    int left = budget;
    for (int i = 0; i < factors; ++i) {
        const cplx a(u(rng), u(rng));
        const int dmax = std::max(1, left / (factors - i));
        std::uniform_int_distribution<int> deg(1, dmax);
        const int k = std::min(deg(rng), left);
        if (k <= 0) break;
        left -= k;
        const Mat2 n = (i % 2 == 0) ? Mat2{0.0, a, 0.0, 0.0} : Mat2{0.0, 0.0, a, 0.0};
        std::vector<Mat2> c(2 * k + 1, Mat2::zero());
        c[k] = Mat2::identity();
        c[0] = n;
        out = mul(out, MatrixLoop::from_coeffs(c), out.trunc() + k);
    }
    return out;
}

// Random loop in the big cell: exterior-unipotent times interior, exact product.
inline MatrixLoop random_bigcell_loop(std::mt19937_64& rng, int trunc) {
    const MatrixLoop mf = random_minus_loop(rng, trunc / 2);
    const MatrixLoop pf = random_plus_loop(rng, trunc - trunc / 2);
    MatrixLoop g = mul(mf, pf, mf.trunc() + pf.trunc());
    return g.trunc() < trunc ? g.retrunc(trunc) : g;
}

// Random scalar loop with planted sign: f = eps * g* g, g = exp(interior poly).
inline ScalarLoop random_sign_loop(std::mt19937_64& rng, int trunc, int delta, int eps) {
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    std::vector<cplx> c(2 * trunc + 1, cplx(0.0));
    c[trunc] = cplx(u(rng), 0.0);
    for (int k = 1; k <= std::min(trunc, 4); ++k) c[trunc + k] = cplx(u(rng), u(rng));
    const ScalarLoop g = loopcmc::sexp(ScalarLoop::from_coeffs(std::move(c)));
    const ScalarLoop gs = loopcmc::sstar(g, delta);
    return loopcmc::sscale(loopcmc::smul(gs, g), double(eps));
}

// Random unitary loop for a form: F = exp(x) with x* = x built coefficientwise.
inline MatrixLoop random_unitary_loop(std::mt19937_64& rng, const loopcmc::RealForm& form,
                                      int trunc = 8) {
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    const Mat2 eta = form.eta();
    const Mat2 eta_inv = eta.inverse();
    // x_m for m = -2..2 with x_m = -(-1 power delta) eta x_{-m}^H eta^-1
    std::vector<Mat2> x(5, Mat2::zero());
    auto lie_pair = [&](const Mat2& a, int k) {
        // partner coefficient at -k: x_{-k} = -delta^k eta a^H eta^-1
        const double dk = (form.delta == 1 || k % 2 == 0) ? 1.0 : -1.0;
        return (eta * a.conj_transpose() * eta_inv) * (-dk);
    };
    for (int k = 1; k <= 2; ++k) {
        Mat2 a{cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), 0.0};
        a.d = -a.a;  // trace free
        x[2 + k] = a;
        x[2 - k] = lie_pair(a, k);
    }
    // constant coefficient: x0 = -eta x0^H eta^-1, trace free
    {
        const double al = u(rng);
        const cplx q(u(rng), u(rng));
        Mat2 a{cplx(0, al), q, 0.0, cplx(0, -al)};
        a.c = form.epsilon == 1 ? -std::conj(q) : std::conj(q);
        x[2] = a;
    }
    const int m = 4 * std::max(trunc, 1);
    std::vector<Mat2> samples(m);
    for (int j = 0; j < m; ++j) {
        const cplx lam = std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / m);
        Mat2 xv = Mat2::zero();
        for (int k = -2; k <= 2; ++k) xv += x[2 + k] * std::pow(lam, k);
        samples[j] = loopcmc::mat2_exp(xv);
    }
    return MatrixLoop::from_samples(samples, trunc, 1.0);
}

}  // namespace testutil
