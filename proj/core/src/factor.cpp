#include "loopcmc/factor.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <numbers>

#include "loopcmc/fft.hpp"

namespace loopcmc {

namespace {

using Eigen::MatrixXcd;

// Stack the block-Toeplitz section: rows are coefficients k = 0..kmax of G*P,
// unknowns are the coefficients P_0..P_np of the interior loop P = plus^-1.
MatrixXcd toeplitz_section(const MatrixLoop& g, int np, int kmax) {
    MatrixXcd a = MatrixXcd::Zero(2 * (kmax + 1), 2 * (np + 1));
    for (int m = 0; m <= np; ++m) {
        for (int k = 0; k <= kmax; ++k) {
            const Mat2& gm = g.coeff(k - m);
            if (gm.max_abs() == 0.0) continue;
            a(2 * k, 2 * m) = gm.a;
            a(2 * k, 2 * m + 1) = gm.b;
            a(2 * k + 1, 2 * m) = gm.c;
            a(2 * k + 1, 2 * m + 1) = gm.d;
        }
    }
    return a;
}

// Keep only the nonnegative (interior) or nonpositive (exterior) exponents.
ScalarLoop project_half(const ScalarLoop& f, bool nonneg);

double reconstruction_residual(const MatrixLoop& minus, const MatrixLoop& plus,
                               const MatrixLoop& g) {
    const MatrixLoop prod = mul(minus, plus, std::max(g.trunc(), minus.trunc() + plus.trunc()));
    double r = 0.0;
    const int m = std::max(prod.num_samples(), g.num_samples());
    for (int j = 0; j < m; ++j) {
        const cplx lam = std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / m);
        r = std::max(r, (prod.eval(lam) - g.eval(lam)).norm());
    }
    return r;
}

}  // namespace

BirkhoffResult birkhoff(const MatrixLoop& g, const BirkhoffOptions& opts) {
    const int ng = std::max(g.effective_trunc(1e-15), 1);
    const int np = opts.plus_trunc >= 0 ? opts.plus_trunc : ng + 8;
    const int kmax = ng + np;

    const MatrixXcd a = toeplitz_section(g, np, kmax);
    Eigen::MatrixXcd rhs = MatrixXcd::Zero(2 * (kmax + 1), 2);
    rhs(0, 0) = 1.0;
    rhs(1, 1) = 1.0;

    Eigen::JacobiSVD<MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    const double smax = svd.singularValues()(0);
    if (smax <= 0.0 || smin / smax < opts.singular_rel_tol)
        throw BigCellError("birkhoff: Toeplitz section singular (partial indices nonzero)", smin);
    const MatrixXcd p = svd.solve(rhs);

    std::vector<Mat2> pc(2 * np + 1, Mat2::zero());
    for (int m = 0; m <= np; ++m)
        pc[m + np] = Mat2{p(2 * m, 0), p(2 * m, 1), p(2 * m + 1, 0), p(2 * m + 1, 1)};
    const MatrixLoop pl = MatrixLoop::from_coeffs(std::move(pc), g.radius());

    // minus = G * P, projected onto exponents <= 0.
    const MatrixLoop gp = mul(g, pl, ng + np);
    std::vector<Mat2> mc(2 * (ng + np) + 1, Mat2::zero());
    for (int k = -(ng + np); k <= 0; ++k) mc[k + ng + np] = gp.coeff(k);
    MatrixLoop minus = MatrixLoop::from_coeffs(std::move(mc), g.radius());
    minus = minus.retrunc(std::max(minus.effective_trunc(1e-16), 1));

    // plus = P^-1 via adjugate over determinant at the samples.
    const int mp = 4 * std::max(np + 2, 1);
    std::vector<Mat2> ps(mp);
    for (int j = 0; j < mp; ++j) {
        const cplx lam = std::polar(g.radius(), 2.0 * std::numbers::pi * (j + 0.5) / mp);
        const Mat2 pv = pl.eval(lam);
        ps[j] = pv.adjugate() * (1.0 / pv.det());
    }
    MatrixLoop plus = MatrixLoop::from_samples(ps, np + 2, g.radius());
    // re-project onto nonnegative exponents (inversion noise only)
    {
        std::vector<Mat2> cc(2 * (np + 2) + 1, Mat2::zero());
        for (int k = 0; k <= np + 2; ++k) cc[k + np + 2] = plus.coeff(k);
        plus = MatrixLoop::from_coeffs(std::move(cc), g.radius());
    }

    BirkhoffResult out{std::move(minus), std::move(plus), 0.0, smin};
    out.residual = reconstruction_residual(out.minus, out.plus, g);
    return out;
}

IwasawaResult iwasawa(const MatrixLoop& phi, const RealForm& form, const IwasawaOptions& opts) {
    if (phi.radius() != 1.0) throw std::invalid_argument("iwasawa: radius must be 1");

    const MatrixLoop phi_star = star(phi, form);
    const int ne = std::max(phi.effective_trunc(1e-15), 1);
    const MatrixLoop h = mul(inverse(phi_star), phi, 2 * ne);

    BirkhoffOptions bopts;
    bopts.plus_trunc = opts.plus_trunc;
    bopts.singular_rel_tol = opts.singular_rel_tol;
    BirkhoffResult bk = birkhoff(h, bopts);

    const Mat2 a0 = bk.plus.coeff(0);
    const Mat2 eta = form.eta();
    const Mat2 eta_inv = eta.inverse();

    // Middle term: A0 should be eta-Hermitian (A0 = eta A0^H eta^-1) in the big cell.
    const Mat2 a0_dia = eta * a0.conj_transpose() * eta_inv;
    const double herm = (a0_dia - a0).norm();

    const double lead = a0.a.real();
    int sigma = 1;
    if (lead <= opts.pivot_floor) {
        if (!opts.allow_branch_flip || lead >= -opts.pivot_floor)
            throw BigCellError("iwasawa: non-positive Cholesky pivot (ideal boundary)", lead);
        sigma = -1;
    }
    const Mat2 as = a0 * double(sigma);
    const double piv1 = as.a.real();
    const double alpha = std::sqrt(piv1);
    const cplx beta = as.b / alpha;
    const double piv2 = form.epsilon == 1 ? as.d.real() - std::norm(beta)
                                          : as.d.real() + std::norm(beta);
    if (piv2 <= opts.pivot_floor)
        throw BigCellError("iwasawa: non-positive Cholesky pivot (ideal boundary)", piv2 * sigma);

    const Mat2 b0{alpha, beta, 0.0, std::sqrt(piv2)};
    // C = sigma * (eta B0^H eta^-1)^-1 so that B = C * H_plus has B(0) = B0.
    const Mat2 b0_dia = eta * b0.conj_transpose() * eta_inv;
    const Mat2 cmat = b0_dia.inverse() * double(sigma);

    MatrixLoop b = mul_const(cmat, bk.plus);
    MatrixLoop f = mul(phi, inverse(b), ne + b.trunc());
    f = f.retrunc(std::max(f.effective_trunc(1e-16), 1));

    IwasawaResult out;
    out.pivot = std::min(piv1, piv2);
    out.branch_sign = sigma;
    out.hermitian_residual = herm;
    out.birkhoff_sv = bk.smallest_singular_value;
    out.residual = reconstruction_residual(f, b, phi);
    out.unitary = std::move(f);
    out.positive = std::move(b);
    return out;
}

ScalarBirkhoffResult scalar_birkhoff(const ScalarLoop& f) {
    // The logarithm is not band-limited even for polynomial loops, so work on a
    // grid several times finer than the input truncation.
    const int nt = std::max(4 * f.trunc(), 48);
    const int m = 4 * nt;
    std::vector<cplx> s(m);
    double fmin = 1e300, fmax = 0.0;
    for (int j = 0; j < m; ++j) {
        s[j] = f.eval(std::polar(f.radius(), 2.0 * std::numbers::pi * (j + 0.5) / m));
        fmin = std::min(fmin, std::abs(s[j]));
        fmax = std::max(fmax, std::abs(s[j]));
    }
    if (fmin < 1e-12 * std::max(fmax, 1.0))
        throw std::invalid_argument("scalar_birkhoff: zero on the circle (use scalar_sign for meromorphic loops)");

    const int n = winding_number(f);
    // log(f / lambda^n), continuous branch along the circle.
    std::vector<cplx> lg(m);
    double arg_prev = 0.0;
    for (int j = 0; j < m; ++j) {
        const cplx lam = std::polar(f.radius(), 2.0 * std::numbers::pi * (j + 0.5) / m);
        const cplx v = s[j] / std::pow(lam, n);
        double a = std::arg(v);
        if (j > 0) {
            while (a - arg_prev > std::numbers::pi) a -= 2 * std::numbers::pi;
            while (a - arg_prev < -std::numbers::pi) a += 2 * std::numbers::pi;
        }
        arg_prev = a;
        lg[j] = cplx(std::log(std::abs(v)), a);
    }
    const ScalarLoop lgl = ScalarLoop::from_coeffs(
        detail::samples_to_coeffs(lg, nt, f.radius()), f.radius());

    std::vector<cplx> cp(2 * nt + 1, cplx(0.0)), cm(2 * nt + 1, cplx(0.0));
    for (int k = 1; k <= nt; ++k) cp[k + nt] = lgl.coeff(k);
    for (int k = -nt; k <= -1; ++k) cm[k + nt] = lgl.coeff(k);

    ScalarBirkhoffResult out;
    out.winding = n;
    out.leading = std::exp(lgl.coeff(0));
    // exp of one-sided loops stays one-sided; drop the projection noise so that
    // off-circle evaluation does not amplify it
    out.plus = project_half(sexp(ScalarLoop::from_coeffs(std::move(cp), f.radius())), true);
    out.minus = project_half(sexp(ScalarLoop::from_coeffs(std::move(cm), f.radius())), false);

    double res = 0.0;
    for (int j = 0; j < m; ++j) {
        const cplx lam = std::polar(f.radius(), 2.0 * std::numbers::pi * (j + 0.5) / m);
        const cplx rec = out.leading * std::pow(lam, n) * out.minus.eval(lam) * out.plus.eval(lam);
        res = std::max(res, std::abs(rec - s[j]));
    }
    out.residual = res;
    return out;
}

namespace {

// Keep only the nonnegative (interior) or nonpositive (exterior) exponents.
ScalarLoop project_half(const ScalarLoop& f, bool nonneg) {
    const int n = f.trunc();
    std::vector<cplx> c(2 * n + 1, cplx(0.0));
    for (int k = nonneg ? 0 : -n; k <= (nonneg ? n : 0); ++k) c[k + n] = f.coeff(k);
    return ScalarLoop::from_coeffs(std::move(c), f.radius());
}

// Star-symmetric deflation atom with value set {zero of order 2 at a} (delta=1)
// or {order 1 at a and -a} (delta=-1); see scalar_sign.
cplx deflation_atom(cplx lam, cplx a, int delta) {
    if (delta == 1) return (lam - a) * (1.0 - std::conj(a) * lam) / lam;
    return -(lam - a) * (1.0 + std::conj(a) * lam) / lam;
}

}  // namespace

SignResult scalar_sign(const ScalarLoop& f, std::span<const CircleZero> divisor,
                       const RealForm& form) {
    const int delta = form.delta;
    if (f.radius() != 1.0) throw std::invalid_argument("scalar_sign: radius must be 1");

    // Validate the divisor: even orders; antipodal pairing for delta = -1.
    for (const auto& z : divisor) {
        if (z.order % 2 != 0)
            throw std::invalid_argument("scalar_sign: odd-order circle zero");
        if (std::abs(std::abs(z.point) - 1.0) > 1e-9)
            throw std::invalid_argument("scalar_sign: divisor point off the circle");
        if (delta == -1) {
            bool paired = false;
            for (const auto& w : divisor)
                if (std::abs(w.point + z.point) < 1e-9 && w.order == z.order) paired = true;
            if (!paired)
                throw std::invalid_argument("scalar_sign: delta=-1 divisor must pair a with -a");
        }
    }

    // Work on a grid fine enough for the non-band-limited logarithm.
    const int nt = std::max(4 * f.trunc(), 48);
    const int m = 4 * nt;
    std::vector<cplx> s(m), grid(m);
    for (int j = 0; j < m; ++j) {
        grid[j] = std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / m);
        s[j] = f.eval(grid[j]);
    }

    // Star symmetry of the input, checked away from the declared zeros.
    const ScalarLoop fs = sstar(f, delta);
    double star_res = 0.0;
    for (int j = 0; j < m; ++j) {
        bool near = false;
        for (const auto& z : divisor)
            if (std::abs(grid[j] - z.point) < 0.15) near = true;
        if (!near) star_res = std::max(star_res, std::abs(fs.eval(grid[j]) - s[j]));
    }

    // Deflate the declared zeros. For delta=-1 each atom removes one order at a
    // and at -a, so a pair (a,2k),(-a,2k) is consumed by 2k applications of atom(a).
    std::vector<cplx> reg(s.begin(), s.end());
    std::vector<CircleZero> half;
    std::vector<std::pair<cplx, int>> atoms;  // (point, count)
    if (delta == 1) {
        for (const auto& z : divisor) {
            atoms.emplace_back(z.point, z.order / 2);
            half.push_back({z.point, z.order / 2});
        }
    } else {
        for (const auto& z : divisor) {
            if (z.point.real() > 0 || (z.point.real() == 0 && z.point.imag() > 0)) {
                atoms.emplace_back(z.point, z.order);
                half.push_back({z.point, z.order / 2});
                half.push_back({-z.point, z.order / 2});
            }
        }
    }
    for (int j = 0; j < m; ++j) {
        for (const auto& [a, cnt] : atoms)
            for (int i = 0; i < cnt; ++i) {
                const cplx d = deflation_atom(grid[j], a, delta);
                if (std::abs(d) < 1e-10)
                    throw std::invalid_argument("scalar_sign: divisor point on the collocation grid");
                reg[j] /= d;
            }
    }

    const ScalarLoop freg = ScalarLoop::from_samples(reg, nt, 1.0);
    const int w = winding_number(freg);
    if (w != 0)
        throw std::invalid_argument("scalar_sign: nonzero winding after deflation (odd structure)");

    // Log-split: positive-frequency half plus half the mean builds f_+.
    std::vector<cplx> lg(m);
    double arg_prev = 0.0;
    for (int j = 0; j < m; ++j) {
        double a = std::arg(reg[j]);
        if (j > 0) {
            while (a - arg_prev > std::numbers::pi) a -= 2 * std::numbers::pi;
            while (a - arg_prev < -std::numbers::pi) a += 2 * std::numbers::pi;
        }
        arg_prev = a;
        lg[j] = cplx(std::log(std::abs(reg[j])), a);
    }
    const std::vector<cplx> lc = detail::samples_to_coeffs(lg, nt, 1.0);
    std::vector<cplx> cp(2 * nt + 1, cplx(0.0));
    cp[nt] = cplx(lc[nt].real() / 2.0, 0.0);
    for (int k = 1; k <= nt; ++k) cp[k + nt] = lc[k + nt];
    ScalarLoop plus = project_half(sexp(ScalarLoop::from_coeffs(std::move(cp), 1.0)), true);

    // Restore the half divisor on f_+: (lambda-a)^k for delta=1, (lambda^2-a^2)^k pairs else.
    if (delta == 1) {
        for (const auto& z : half)
            for (int i = 0; i < z.order; ++i)
                plus = smul(plus, sadd(ScalarLoop::term(1, 1.0), ScalarLoop::constant(-z.point)));
    } else {
        // Each antipodal atom pair contributes one (lambda^2 - a^2) to f_+.
        for (const auto& [a, cnt] : atoms)
            for (int i = 0; i < cnt / 2; ++i)
                plus = smul(plus, sadd(ScalarLoop::term(2, 1.0), ScalarLoop::constant(-a * a)));
    }

    // Phase-normalize f_+(0) > 0 (does not change plus^* plus).
    const cplx p0 = plus.coeff(0);
    if (std::abs(p0) > 0) plus = sscale(plus, std::conj(p0) / std::abs(p0));

    // epsilon from a reference sample of f / (plus^* plus).
    const ScalarLoop ps = sstar(plus, delta);
    int jref = 0;
    double best = -1.0;
    for (int j = 0; j < m; ++j) {
        double dist = 1e300;
        for (const auto& z : divisor) dist = std::min(dist, std::abs(grid[j] - z.point));
        const double score = std::min(dist, 1.0) * std::abs(plus.eval(grid[j]));
        if (score > best) {
            best = score;
            jref = j;
        }
    }
    const cplx lam_ref = grid[jref];
    const cplx ratio = f.eval(lam_ref) / (ps.eval(lam_ref) * plus.eval(lam_ref));
    if (std::abs(std::abs(ratio) - 1.0) > 1e-4 || std::abs(ratio.imag()) > 1e-4)
        throw std::invalid_argument("scalar_sign: factorization inconsistent (epsilon not +-1)");
    const int eps = ratio.real() > 0 ? 1 : -1;

    double res = 0.0;
    for (int j = 0; j < m; ++j) {
        const cplx rec = double(eps) * ps.eval(grid[j]) * plus.eval(grid[j]);
        res = std::max(res, std::abs(rec - s[j]));
    }
    return {eps, std::move(plus), std::move(half), res, star_res};
}

}  // namespace loopcmc
