#include "loopcmc/closing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "loopcmc/potential.hpp"

namespace loopcmc {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);
}  // namespace

bool ClosingReport::closes(double tol) const {
    if (intrinsic > tol) return false;
    for (double e : extrinsic0)
        if (e > tol) return false;
    for (double e : extrinsic1)
        if (e > tol) return false;
    return true;
}

std::string ClosingReport::summary() const {
    std::ostringstream os;
    os << "intrinsic " << intrinsic << "; extrinsic";
    for (size_t i = 0; i < extrinsic0.size(); ++i)
        os << " [gen " << i << ": " << extrinsic0[i] << ", " << extrinsic1[i]
           << " -> " << (extrinsic_sign[i] > 0 ? "+1" : "-1") << "]";
    return os.str();
}

ClosingReport check_closing(std::span<const MatrixLoop> monodromies, const RealForm& form,
                            cplx lambda0, cplx lambda1) {
    ClosingReport rep;
    const Mat2 id = Mat2::identity();
    for (const auto& m : monodromies) {
        rep.intrinsic = std::max(rep.intrinsic, is_unitary(m, form, 0.0).residual);
        const Mat2 v0 = m.eval(lambda0), v1 = m.eval(lambda1);
        const double d0p = (v0 - id).norm();
        const double d0m = (v0 + id).norm();
        const double d1p = (v1 - id).norm();
        const double d1m = (v1 + id).norm();
        rep.extrinsic0.push_back(std::min(d0p, d0m));
        rep.extrinsic1.push_back(std::min(d1p, d1m));
        rep.extrinsic_sign.push_back(d0p <= d0m ? 1 : -1);
    }
    return rep;
}

ScalarLoop trace_polynomial(const ScalarLoop& t0, const ScalarLoop& t1, const ScalarLoop& t2) {
    const ScalarLoop one = ScalarLoop::constant(1.0);
    ScalarLoop out = sadd(one, sscale(smul(t0, t0), -1.0));
    out = sadd(out, sscale(smul(t1, t1), -1.0));
    out = sadd(out, sscale(smul(t2, t2), -1.0));
    out = sadd(out, sscale(smul(smul(t0, t1), t2), 2.0));
    return out;
}

std::array<ScalarLoop, 3> halftraces_from_residues(double q0, double q1, double q2,
                                                   const RealForm& form, cplx lambda0, int trunc) {
    const int m = 4 * std::max(trunc, 1);
    const double qs[3] = {q0, q1, q2};
    std::array<std::vector<cplx>, 3> samp;
    for (auto& s : samp) s.resize(m);
    for (int j = 0; j < m; ++j) {
        const cplx lam = std::polar(1.0, 2.0 * kPi * (j + 0.5) / m);
        const cplx kappa = trinoid_kappa(form, lambda0, lam);
        for (int k = 0; k < 3; ++k) {
            // cos(2 pi nu) with nu = 1/2 - 1/2 sqrt(1+q kappa) is even in the square
            // root, so the branch does not matter: equals -cos(pi sqrt(1+q kappa)).
            samp[k][j] = -std::cos(kPi * std::sqrt(1.0 + qs[k] * kappa));
        }
    }
    return {ScalarLoop::from_samples(samp[0], trunc, 1.0),
            ScalarLoop::from_samples(samp[1], trunc, 1.0),
            ScalarLoop::from_samples(samp[2], trunc, 1.0)};
}

double phi_leading_coefficient(double q0, double q1, double q2) {
    const double p4 = kPi * kPi * kPi * kPi;
    return p4 / 64.0 * (q0 + q1 + q2) * (-q0 + q1 + q2) * (q0 - q1 + q2) * (q0 + q1 - q2);
}

TrinoidEntries extract_trinoid_entries(const MatrixLoop& m0, const RealForm& form) {
    const int m = m0.num_samples();
    std::vector<cplx> ps(m), qs(m), rs(m);
    for (int j = 0; j < m; ++j) {
        const cplx lam = m0.sample_point(j);
        const Mat2& v = m0.samples()[j];
        rs[j] = v.a;
        ps[j] = v.b / lam;
        qs[j] = -v.c * lam;
    }
    TrinoidEntries out{ScalarLoop::from_samples(ps, m0.trunc(), 1.0),
                       ScalarLoop::from_samples(qs, m0.trunc(), 1.0),
                       ScalarLoop::from_samples(rs, m0.trunc(), 1.0), 0.0};
    const ScalarLoop rstar = sstar(out.r, form.delta);
    for (int j = 0; j < m; ++j)
        out.structure_residual =
            std::max(out.structure_residual, std::abs(m0.samples()[j].d - rstar.samples()[j]));
    return out;
}

TrinoidUnitarizer trinoid_unitarizer(const MatrixLoop& m0, const MatrixLoop& m1,
                                     const RealForm& form) {
    const TrinoidEntries ent = extract_trinoid_entries(m0, form);
    const ScalarLoop pstar = sstar(ent.p, form.delta);

    // q / p*: both vanish (to equal order, generically one) at the evaluation
    // points; sample the ratio on the offset grid, which avoids those points.
    const int m = m0.num_samples();
    std::vector<cplx> ratio(m);
    {
        const auto& qs = ent.q.samples();
        const auto& ps = pstar.samples();
        for (int j = 0; j < m; ++j) {
            if (std::abs(ps[j]) < 1e-14)
                throw std::domain_error("trinoid_unitarizer: p* vanishes on the grid");
            ratio[j] = qs[j] / ps[j];
        }
    }
    const ScalarLoop r = ScalarLoop::from_samples(ratio, m0.trunc(), 1.0);

    const SignResult sr = scalar_sign(r, {}, form);
    const int want = form.delta * form.epsilon;
    if (sr.epsilon != want)
        throw std::domain_error(
            "trinoid_unitarizer: sign[q/p*] mismatch; parameters outside the admissible region "
            "for this form");

    // X = diag(sqrt(x+), 1/sqrt(x+)) via the scalar Birkhoff of x+ (log route keeps
    // the square root single-valued on the disk).
    const ScalarBirkhoffResult sb = scalar_birkhoff(sr.plus);
    if (sb.winding != 0)
        throw std::domain_error("trinoid_unitarizer: x+ has nonzero winding");
    // sqrt(x+) = sqrt(c) * exp(log(f_+)/2): recompute from samples of x+ directly.
    const int msq = sr.plus.num_samples();
    std::vector<cplx> lg(msq);
    double arg_prev = 0.0;
    for (int j = 0; j < msq; ++j) {
        const cplx v = sr.plus.samples()[j];
        double a = std::arg(v);
        if (j > 0) {
            while (a - arg_prev > kPi) a -= 2 * kPi;
            while (a - arg_prev < -kPi) a += 2 * kPi;
        }
        arg_prev = a;
        lg[j] = cplx(0.5 * std::log(std::abs(v)), 0.5 * a);
    }
    const ScalarLoop sq = sexp(ScalarLoop::from_samples(lg, sr.plus.trunc(), 1.0));

    const int nt = std::max({m0.trunc(), sq.trunc(), 4});
    const int mg = 4 * nt;
    std::vector<Mat2> xs(mg);
    for (int j = 0; j < mg; ++j) {
        const cplx lam = std::polar(1.0, 2.0 * kPi * (j + 0.5) / mg);
        const cplx s = sq.eval(lam);
        xs[j] = Mat2::diag(s, 1.0 / s);
    }
    MatrixLoop x = MatrixLoop::from_samples(xs, nt, 1.0);

    TrinoidUnitarizer out;
    out.x_plus = sr.plus;
    out.sign = sr.epsilon;
    out.factor_residual = sr.residual;
    out.structure_residual = ent.structure_residual;
    out.unitarity_residual = std::max(is_unitary(conjugate_by(x, m0), form, 0.0).residual,
                                      is_unitary(conjugate_by(x, m1), form, 0.0).residual);
    out.unitarizer = std::move(x);
    return out;
}

MatrixLoop conjugate_by(const MatrixLoop& x, const MatrixLoop& m) {
    const int nt = std::max(x.trunc(), m.trunc());
    return mul(mul(x, m, nt + x.trunc()), inverse(x), nt).retrunc(nt);
}

cplx simple_factor_p(cplx mu, cplx lambda) {
    return (lambda - mu) / (std::conj(mu) * lambda + 1.0);
}

MatrixLoop simple_factor(cplx mu, double radius, int trunc) {
    if (radius >= std::abs(mu))
        throw std::invalid_argument("simple_factor: need radius < |mu|");
    // p has no zeros or poles on the closed radius-disk, so p^(1/2) is single
    // valued there; fix the branch by continuity from p(0) = -mu.
    const int m = 4 * std::max(trunc, 1);
    std::vector<Mat2> samples(m);
    // branch by continuous argument tracking from lambda = 0
    const cplx p0 = -mu;
    double arg_prev = std::arg(p0);
    // walk radially out to the circle, then around
    std::vector<double> args(m);
    {
        // radial walk to sample 0
        const cplx target = std::polar(radius, 2.0 * kPi * 0.5 / m);
        double a = arg_prev;
        for (int s = 1; s <= 64; ++s) {
            const cplx p = simple_factor_p(mu, target * (s / 64.0));
            double na = std::arg(p);
            while (na - a > kPi) na -= 2 * kPi;
            while (na - a < -kPi) na += 2 * kPi;
            a = na;
        }
        args[0] = a;
        for (int j = 1; j < m; ++j) {
            const cplx p = simple_factor_p(mu, std::polar(radius, 2.0 * kPi * (j + 0.5) / m));
            double na = std::arg(p);
            while (na - args[j - 1] > kPi) na -= 2 * kPi;
            while (na - args[j - 1] < -kPi) na += 2 * kPi;
            args[j] = na;
        }
    }
    for (int j = 0; j < m; ++j) {
        const cplx lam = std::polar(radius, 2.0 * kPi * (j + 0.5) / m);
        const cplx p = simple_factor_p(mu, lam);
        const cplx root = std::polar(std::sqrt(std::abs(p)), args[j] / 2.0);
        samples[j] = Mat2::diag(root, 1.0 / root);
    }
    return MatrixLoop::from_samples(samples, trunc, radius);
}

DressResult dress(const MatrixLoop& f, cplx mu, std::array<cplx, 2> ell, const RealForm& source) {
    const Mat2 fmu = f.eval(mu);
    const Mat2 fmu_inv = fmu.adjugate() * (1.0 / fmu.det());
    cplx u = fmu_inv.a * ell[0] + fmu_inv.b * ell[1];
    cplx v = fmu_inv.c * ell[0] + fmu_inv.d * ell[1];
    // Phase normalization: make the dominant component real positive, so the
    // dressed frame is invariant under scalings of ell (and monodromy continuation
    // scales drop out).
    {
        const cplx dom = std::abs(u) >= std::abs(v) ? u : v;
        if (std::abs(dom) < 1e-300) throw std::invalid_argument("dress: F(mu)^-1 ell vanishes");
        const cplx phase = std::conj(dom) / std::abs(dom);
        u *= phase;
        v *= phase;
    }
    Mat2 k;
    if (source.epsilon == -1) {
        // dS3 -> H3: k of SU(1,1) type
        const double s = std::norm(u) - std::norm(v);
        if (std::abs(s) < 1e-12) throw std::domain_error("dress: |u| = |v|, middle factor undefined");
        const double inv = 1.0 / std::sqrt(std::abs(s));
        k = Mat2{u, std::conj(v), v, std::conj(u)} * inv;
        if (s < 0) k = Mat2{v, std::conj(u), u, std::conj(v)} * inv;  // swap columns to keep det 1
    } else {
        // H3 -> dS3: k of SU(2) type
        const double s = std::norm(u) + std::norm(v);
        const double inv = 1.0 / std::sqrt(s);
        k = Mat2{u, -std::conj(v), v, std::conj(u)} * inv;
    }
    const Mat2 kinv = k.adjugate() * (1.0 / k.det());

    auto eval = [f, mu, kinv](cplx lam) {
        const Mat2 w = f.eval(lam) * kinv;
        const cplx p = simple_factor_p(mu, lam);
        return Mat2{w.a, w.b * p, w.c / p, w.d};
    };

    const int nt = std::max(f.trunc(), 8);
    const int m = 4 * nt;
    std::vector<Mat2> samples(m);
    for (int j = 0; j < m; ++j)
        samples[j] = eval(std::polar(1.0, 2.0 * kPi * (j + 0.5) / m));
    DressResult out;
    out.dressed = MatrixLoop::from_samples(samples, nt, 1.0);
    out.k = k;
    out.eval = eval;
    return out;
}

Mat2 dress_conjugate(const MatrixLoop& m, cplx mu, cplx lambda) {
    const Mat2 v = m.eval(lambda);
    const cplx p = simple_factor_p(mu, lambda);
    return Mat2{v.a, v.b * p, v.c / p, v.d};
}

double annulus_unitarity_residual(const std::function<Mat2(cplx)>& eval, const RealForm& form,
                                  double radius, int nsamples) {
    const Mat2 eta = form.eta();
    const Mat2 eta_inv = eta.inverse();
    double res = 0.0;
    for (int j = 0; j < nsamples; ++j) {
        const cplx lam = std::polar(radius, 2.0 * kPi * (j + 0.5) / nsamples);
        const cplx paired = double(form.delta) / std::conj(lam);
        const Mat2 x = eval(paired).conj_transpose().adjugate();
        const Mat2 s = form.epsilon == 1 ? x : eta * x * eta_inv;
        res = std::max(res, (s - eval(lam)).norm());
    }
    return res;
}

std::array<cplx, 2> common_eigenvector(std::span<const MatrixLoop> monodromies, cplx mu,
                                       double* collinearity) {
    if (monodromies.empty()) throw std::invalid_argument("common_eigenvector: no generators");
    // eigenvectors of the first generator at mu
    const Mat2 a = monodromies[0].eval(mu);
    const auto [e0, e1] = mat2_eigenvalues(a);
    auto eigvec = [&](cplx ev) -> std::array<cplx, 2> {
        // (a - ev I) w = 0: pick the larger row
        const cplx r1x = a.a - ev, r1y = a.b;
        const cplx r2x = a.c, r2y = a.d - ev;
        std::array<cplx, 2> w;
        if (std::abs(r1x) + std::abs(r1y) >= std::abs(r2x) + std::abs(r2y))
            w = {-r1y, r1x};
        else
            w = {-r2y, r2x};
        const double n = std::sqrt(std::norm(w[0]) + std::norm(w[1]));
        return {w[0] / n, w[1] / n};
    };
    double best = 1e300;
    std::array<cplx, 2> bestv{1.0, 0.0};
    for (const cplx ev : {e0, e1}) {
        const auto w = eigvec(ev);
        double worst = 0.0;
        for (const auto& m : monodromies) {
            const Mat2 b = m.eval(mu);
            const cplx bx = b.a * w[0] + b.b * w[1];
            const cplx by = b.c * w[0] + b.d * w[1];
            // collinearity of (bx,by) with w
            const double cross = std::abs(bx * w[1] - by * w[0]);
            worst = std::max(worst, cross / std::max(1e-300, std::hypot(std::abs(bx), std::abs(by))));
        }
        if (worst < best) {
            best = worst;
            bestv = w;
        }
    }
    if (collinearity) *collinearity = best;
    return bestv;
}

std::vector<cplx> reducible_lambda_set(double q_res, const RealForm& form, cplx lambda0,
                                       double rmin, double rmax, int kmax) {
    // 1/2 - 1/2 sqrt(1 + 4 q f(mu)/mu) in Z/3  <=>  4 q f(mu)/mu = w_k,
    // w_k = (1 - 2k/3)^2 - 1, and f expands to mu^2 + f1 mu + f0:
    // 4q mu^2 + (4q f1 - w_k) mu + 4q f0 = 0.
    const cplx f1 = form.delta == 1 ? -(lambda0 + 1.0 / lambda0) : -(lambda0 - 1.0 / lambda0);
    const cplx f0 = form.delta == 1 ? cplx(1.0) : cplx(-1.0);
    std::vector<cplx> out;
    auto push_if = [&](cplx mu) {
        if (std::abs(mu) < rmin || std::abs(mu) > rmax) return;
        if (std::abs(mu - lambda0) < 1e-6) return;
        const cplx l1 = form.delta == 1 ? 1.0 / lambda0 : -1.0 / lambda0;
        if (std::abs(mu - l1) < 1e-6) return;
        for (const auto& v : out)
            if (std::abs(v - mu) < 1e-9) return;
        out.push_back(mu);
    };
    for (int k = -kmax; k <= kmax; ++k) {
        const double t = 1.0 - 2.0 * k / 3.0;
        const double w = t * t - 1.0;
        const cplx a = 4.0 * q_res;
        const cplx b = 4.0 * q_res * f1 - w;
        const cplx c = 4.0 * q_res * f0;
        const cplx disc = std::sqrt(b * b - 4.0 * a * c);
        push_if((-b + disc) / (2.0 * a));
        push_if((-b - disc) / (2.0 * a));
    }
    std::sort(out.begin(), out.end(), [](cplx x, cplx y) {
        return std::abs(x) != std::abs(y) ? std::abs(x) < std::abs(y)
                                          : std::arg(x) < std::arg(y);
    });
    return out;
}

}  // namespace loopcmc
