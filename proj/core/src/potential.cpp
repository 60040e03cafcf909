#include "loopcmc/potential.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace loopcmc {

namespace {
const cplx kI(0.0, 1.0);
}

Potential sphere_potential() {
    Potential p;
    p.eval = [](cplx, cplx lambda) { return Mat2{0.0, 1.0 / lambda, 0.0, 0.0}; };
    p.coeffs = [](cplx) { return LaurentMat{-1, {Mat2{0.0, 1.0, 0.0, 0.0}}}; };
    p.lambda_lo = -1;
    p.lambda_hi = -1;
    p.description = "sphere";
    return p;
}

Mat2 delaunay_matrix_h3(double q, cplx lambda) {
    const double s = 1.0 / (2.0 * std::sqrt(q * q - 1.0));
    return Mat2{0.0, s * (1.0 / lambda + q), s * (lambda - q), 0.0};
}

Potential delaunay_potential_h3(double q) {
    if (std::abs(q) <= 1.0)
        throw std::invalid_argument("delaunay_potential_h3: |q| must exceed 1");
    Potential p;
    p.eval = [q](cplx z, cplx lambda) { return delaunay_matrix_h3(q, lambda) * (kI / z); };
    p.coeffs = [q](cplx z) {
        const double s = 1.0 / (2.0 * std::sqrt(q * q - 1.0));
        const cplx w = kI / z;
        return LaurentMat{-1,
                          {Mat2{0.0, s * w, 0.0, 0.0},
                           Mat2{0.0, s * q * w, -s * q * w, 0.0},
                           Mat2{0.0, 0.0, s * w, 0.0}}};
    };
    p.punctures = {cplx(0.0)};
    p.puncture_at_infinity = true;
    p.lambda_lo = -1;
    p.lambda_hi = 1;
    p.description = "delaunay-h3 q=" + std::to_string(q);
    return p;
}

Mat2 delaunay_matrix_ads3(double q, cplx lambda) {
    // The star-fixed coefficient of the AdS3 Delaunay family; its values at the
    // evaluation points +-i have eigenvalues +-i/2 (extrinsic closing).
    const double s = 1.0 / (2.0 * std::sqrt(q * q + 1.0));
    const double d = std::sqrt(2.0 * (q * q + 1.0));
    return Mat2{kI * d * s, s * (1.0 / lambda + q), s * (lambda + q), -kI * d * s};
}

Potential delaunay_potential_ads3(double q) {
    Potential p;
    p.eval = [q](cplx z, cplx lambda) { return delaunay_matrix_ads3(q, lambda) * (kI / z); };
    p.coeffs = [q](cplx z) {
        const double s = 1.0 / (2.0 * std::sqrt(q * q + 1.0));
        const double d = std::sqrt(2.0 * (q * q + 1.0));
        const cplx w = kI / z;
        return LaurentMat{-1,
                          {Mat2{0.0, s * w, 0.0, 0.0},
                           Mat2{kI * d * s * w, s * q * w, s * q * w, -kI * d * s * w},
                           Mat2{0.0, 0.0, s * w, 0.0}}};
    };
    p.punctures = {cplx(0.0)};
    p.puncture_at_infinity = true;
    p.lambda_lo = -1;
    p.lambda_hi = 1;
    p.description = "delaunay-ads3 q=" + std::to_string(q);
    return p;
}

Potential smyth_potential(int n, double c) {
    if (n < 1 || c == 0.0) throw std::invalid_argument("smyth_potential: need n >= 1, c != 0");
    Potential p;
    p.eval = [n, c](cplx z, cplx lambda) {
        return Mat2{0.0, 1.0 / lambda, c * std::pow(z, n), 0.0};
    };
    p.coeffs = [n, c](cplx z) {
        return LaurentMat{-1, {Mat2{0.0, 1.0, 0.0, 0.0}, Mat2{0.0, 0.0, c * std::pow(z, n), 0.0}}};
    };
    p.lambda_lo = -1;
    p.lambda_hi = 0;
    p.description = "smyth n=" + std::to_string(n) + " c=" + std::to_string(c);
    return p;
}

bool trinoid_lambda0_admissible(const RealForm& form, cplx lambda0) {
    if (form.delta == 1) {
        if (std::abs(std::abs(lambda0) - 1.0) > 1e-12) return false;
        return std::abs(lambda0 - 1.0) > 1e-12 && std::abs(lambda0 + 1.0) > 1e-12;
    }
    return std::abs(lambda0.imag()) < 1e-12 && std::abs(lambda0) > 1e-12;
}

cplx trinoid_f(const RealForm& form, cplx lambda0, cplx lambda) {
    if (form.delta == 1) return (lambda - lambda0) * (lambda - 1.0 / lambda0);
    return (lambda - lambda0) * (lambda + 1.0 / lambda0);
}

cplx trinoid_kappa(const RealForm& form, cplx lambda0, cplx lambda) {
    return 4.0 * trinoid_f(form, lambda0, lambda) / lambda;
}

Potential trinoid_potential(const TrinoidParams& params) {
    if (!trinoid_lambda0_admissible(params.form, params.lambda0))
        throw std::invalid_argument("trinoid_potential: inadmissible evaluation point");
    if (params.a == 0.0 && params.b == 0.0)
        throw std::invalid_argument("trinoid_potential: (a, b) must not both vanish");
    const RealForm form = params.form;
    const cplx l0 = params.lambda0;
    const double a = params.a, b = params.b;
    auto Q = [a, b](cplx z) {
        const cplx w = z * z - 1.0;
        return (4.0 * a + b * w) / (w * w);
    };
    // f = lambda^2 - (l0 -+ 1/l0) lambda +- 1
    const cplx f1 = form.delta == 1 ? -(l0 + 1.0 / l0) : -(l0 - 1.0 / l0);
    const cplx f0 = form.delta == 1 ? cplx(1.0) : cplx(-1.0);

    Potential p;
    p.eval = [form, l0, Q](cplx z, cplx lambda) {
        return Mat2{0.0, 1.0 / lambda, trinoid_f(form, l0, lambda) * Q(z), 0.0};
    };
    p.coeffs = [Q, f0, f1](cplx z) {
        const cplx q = Q(z);
        return LaurentMat{-1,
                          {Mat2{0.0, 1.0, 0.0, 0.0}, Mat2{0.0, 0.0, f0 * q, 0.0},
                           Mat2{0.0, 0.0, f1 * q, 0.0}, Mat2{0.0, 0.0, q, 0.0}}};
    };
    p.punctures = {cplx(1.0), cplx(-1.0)};
    p.puncture_at_infinity = true;
    p.lambda_lo = -1;
    p.lambda_hi = 2;
    p.description = "trinoid a=" + std::to_string(a) + " b=" + std::to_string(b);
    return p;
}

cplx NnoidParams::b_at(int k, cplx lambda) const {
    cplx out = 0.0;
    for (int d = degree; d >= 0; --d) out = out * lambda + b[k][d];
    return out;
}

cplx NnoidParams::z_at(int k, cplx lambda) const {
    cplx out = 0.0;
    for (int d = degree; d >= 0; --d) out = out * lambda + z[k][d];
    return out;
}

NnoidParams NnoidParams::initial(const std::vector<double>& tau, const std::vector<cplx>& p,
                                 int degree) {
    if (tau.size() != p.size()) throw std::invalid_argument("NnoidParams: size mismatch");
    NnoidParams out;
    out.tau = tau;
    out.degree = degree;
    const int n = static_cast<int>(tau.size());
    out.b.assign(n, std::vector<cplx>(degree + 1, cplx(0.0)));
    out.z.assign(n, std::vector<cplx>(degree + 1, cplx(0.0)));
    for (int k = 0; k < n; ++k) {
        const double den = 1.0 - std::norm(p[k]);
        if (std::abs(den) < 1e-12 || std::abs(p[k]) < 1e-12)
            throw std::invalid_argument("NnoidParams: |p_k| must avoid 0 and 1");
        out.b[k][0] = 2.0 * tau[k] * std::conj(p[k]) / den;
        out.z[k][0] = p[k];
    }
    return out;
}

Potential nnoid_potential(const NnoidParams& params) {
    const int n = params.ends();
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
            if (std::abs(params.z[j][0] - params.z[k][0]) < 1e-9)
                throw std::invalid_argument("nnoid_potential: colliding punctures");
    if (params.t < 0.0) throw std::invalid_argument("nnoid_potential: t must be >= 0");

    NnoidParams prm = params;  // value copy; the potential owns its coefficients
    auto omega = [prm, n](cplx z, cplx lambda) {
        cplx out = 0.0;
        for (int k = 0; k < n; ++k) {
            const cplx zk = prm.z_at(k, lambda);
            const cplx d = z - zk;
            out += prm.tau[k] / (d * d) + prm.b_at(k, lambda) / d;
        }
        return out;
    };

    Potential p;
    const double t = params.t;
    p.eval = [omega, t](cplx z, cplx lambda) {
        const cplx low = kI * t * (lambda * lambda + 1.0) * omega(z, lambda);
        return Mat2{0.0, 1.0 / lambda, low, 0.0};
    };
    p.coeffs = nullptr;  // lambda dependence is not polynomial of fixed small span
    for (int k = 0; k < n; ++k) p.punctures.push_back(params.z[k][0]);
    p.puncture_at_infinity = true;
    p.punctures_at = [prm, n](cplx lambda) {
        std::vector<cplx> zs(n);
        for (int k = 0; k < n; ++k) zs[k] = prm.z_at(k, lambda);
        return zs;
    };
    p.lambda_lo = -1;
    p.lambda_hi = 2 + params.degree;
    p.description = "nnoid n=" + std::to_string(n) + " t=" + std::to_string(t);
    return p;
}

std::function<cplx(cplx)> hopf_leading_term(const Potential& pot) {
    if (pot.coeffs) {
        auto coeffs = pot.coeffs;
        return [coeffs](cplx z) {
            const LaurentMat m = coeffs(z);
            // coefficient of lambda^-1 in det( xi/dz ) = sum_{i+j=-1} (a_i d_j - b_i c_j)
            cplx out = 0.0;
            for (int i = m.lo; i <= m.hi(); ++i) {
                const Mat2 mi = m.coeff(i);
                const Mat2 mj = m.coeff(-1 - i);
                out += mi.a * mj.d - mi.b * mj.c;
            }
            return out;
        };
    }
    // Fall back to a small contour integral in lambda.
    auto ev = pot.eval;
    return [ev](cplx z) {
        const int m = 64;
        cplx out = 0.0;
        for (int j = 0; j < m; ++j) {
            const cplx lam = std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / m);
            out += ev(z, lam).det() * lam;
        }
        return out / double(m);
    };
}

}  // namespace loopcmc
