#include "loopcmc/sym.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace loopcmc {

namespace {
const cplx kI(0.0, 1.0);
const Mat2 kE0 = Mat2::diag(kI, -kI);
}  // namespace

SymPoints sym_points_for(const RealForm& form, double H) {
    SymPoints out;
    out.form = form;
    out.mean_curvature = H;
    if (form.delta == 1) {
        if (H == 0.0) {
            out.lambda0 = 1.0;
            out.lambda1 = -1.0;
        } else {
            // H = -cot(theta) for the pair (e^{i theta}, e^{-i theta})
            const double theta = std::atan2(1.0, -H);  // arccot(-H) in (0, pi)
            out.lambda0 = std::polar(1.0, theta);
            out.lambda1 = std::polar(1.0, -theta);
        }
    } else {
        if (std::abs(H) >= 1.0)
            throw std::invalid_argument("sym_points_for: |H| < 1 required for H3/dS3");
        if (H == 0.0) {
            out.lambda0 = kI;
            out.lambda1 = -kI;
        } else {
            const double r = std::sqrt((1.0 - H) / (1.0 + H));
            out.lambda0 = r;
            out.lambda1 = -1.0 / r;
        }
    }
    return out;
}

SymPoints trinoid_sym_points(const RealForm& form, cplx lambda0) {
    SymPoints out;
    out.form = form;
    out.lambda0 = lambda0;
    if (form.delta == 1) {
        out.lambda1 = 1.0 / lambda0;
        out.mean_curvature = (kI * (out.lambda1 + lambda0) / (out.lambda1 - lambda0)).real();
    } else {
        out.lambda1 = -1.0 / lambda0;
        out.mean_curvature = ((out.lambda1 + lambda0) / (out.lambda1 - lambda0)).real();
    }
    return out;
}

double model_membership(const Mat2& x, SpaceForm space) {
    const double det_dev = std::abs(x.det() - 1.0);
    switch (space) {
        case SpaceForm::S3: {
            const Mat2 r = x.conj_transpose() * x - Mat2::identity();
            return r.norm() + det_dev;
        }
        case SpaceForm::AdS3: {
            const Mat2 j = Mat2::diag(1.0, -1.0);
            const Mat2 r = x.conj_transpose() * j * x - j;
            return r.norm() + det_dev;
        }
        case SpaceForm::H3: {
            const Mat2 r = x.conj_transpose() - x;
            return r.norm() + det_dev;
        }
        case SpaceForm::dS3: {
            const Mat2 r = x.conj_transpose() - kE0 * x * kE0.inverse();
            return r.norm() + det_dev;
        }
    }
    return det_dev;
}

std::array<double, 5> lightcone_coords(const Mat2& x, SpaceForm space) {
    switch (space) {
        case SpaceForm::S3:
            // X = [[a, b],[-conj b, conj a]]; S^3 point embeds as [1, x1..x4].
            return {1.0, x.a.real(), x.a.imag(), x.b.real(), x.b.imag()};
        case SpaceForm::AdS3:
            return {x.a.real(), x.a.imag(), x.c.real(), x.c.imag(), 1.0};
        case SpaceForm::H3: {
            const double x0 = 0.5 * (x.a.real() + x.d.real());
            const double x1 = 0.5 * (x.a.real() - x.d.real());
            return {x0, x1, x.b.real(), x.b.imag(), 1.0};
        }
        case SpaceForm::dS3: {
            const double x0 = 0.5 * (x.a.real() - x.d.real());
            const double x1 = 0.5 * (x.a.real() + x.d.real());
            return {x0, x1, x.b.real(), x.b.imag(), 1.0};
        }
    }
    return {};
}

ModelPoint sym_evaluate(const MatrixLoop& f_loop, const SymPoints& pts, double hard_tol) {
    const Mat2 f0 = f_loop.eval(pts.lambda0);
    const Mat2 f1 = f_loop.eval(pts.lambda1);
    const Mat2 x = f0 * (f1.adjugate() * (1.0 / f1.det()));
    ModelPoint out;
    out.x = x;
    out.space = pts.form.space;
    out.membership = model_membership(x, pts.form.space);
    if (out.membership > hard_tol)
        throw std::domain_error("sym_evaluate: point off the matrix model (residual " +
                                std::to_string(out.membership) + ")");
    out.lightcone = lightcone_coords(x, pts.form.space);
    out.branch = x.trace().real() >= 0.0 ? 1 : -1;
    return out;
}

Mat2 alpha_star(const Mat2& alpha, const RealForm& form) {
    const Mat2 eta = form.eta();
    return eta * alpha.conj_transpose() * eta.inverse() * (-double(form.delta));
}

cplx form_inner(const Mat2& x, const Mat2& y, SpaceForm space) {
    const double sign = (space == SpaceForm::S3 || space == SpaceForm::dS3) ? 0.5 : -0.5;
    return sign * (x * y.adjugate()).trace();
}

double metric_factor(const Mat2& b0, const Mat2& xi_residue, const SymPoints& pts) {
    const Mat2 alpha = b0 * xi_residue * b0.inverse();
    const Mat2 astar = alpha_star(alpha, pts.form);
    const cplx pref = 2.0 * (1.0 / pts.lambda0 - 1.0 / pts.lambda1) * (pts.lambda0 - pts.lambda1);
    const cplx v2 = pref * form_inner(alpha, astar, pts.form.space);
    return v2.real();
}

namespace {

Mat2 residue_of(const Potential& pot, cplx z) {
    if (pot.coeffs) return pot.coeffs(z).coeff(-1);
    // contour fallback
    const int m = 64;
    Mat2 out = Mat2::zero();
    for (int j = 0; j < m; ++j) {
        const cplx lam = std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / m);
        out += pot.eval(z, lam) * lam;
    }
    return out * (1.0 / double(m));
}

struct FactoredSample {
    Mat2 f;      // model point
    Mat2 b0;     // B(0)
    Mat2 f_l0, f_l1;  // frame values at the evaluation points
};

FactoredSample factored_sample(const Potential& pot, const MatrixLoop* unitarizer,
                               const SymPoints& pts, cplx z, cplx basepoint, int trunc,
                               const OdeOptions& ode) {
    MatrixLoop phi = integrate_frame(pot, Path::line(basepoint, z), trunc, ode);
    if (unitarizer) phi = mul(*unitarizer, phi, std::max(unitarizer->trunc(), phi.trunc()));
    IwasawaOptions iopts;
    iopts.allow_branch_flip = true;
    const IwasawaResult iw = iwasawa(phi, pts.form, iopts);
    FactoredSample out;
    out.b0 = iw.positive.coeff(0);
    out.f_l0 = iw.unitary.eval(pts.lambda0);
    out.f_l1 = iw.unitary.eval(pts.lambda1);
    out.f = out.f_l0 * (out.f_l1.adjugate() * (1.0 / out.f_l1.det()));
    return out;
}

}  // namespace

GeometryReport geometry_check(const Potential& pot, const MatrixLoop* unitarizer,
                              const SymPoints& pts, std::span<const cplx> zs, cplx basepoint,
                              double fd_step, const OdeOptions& ode) {
    GeometryReport rep;
    rep.mean_curvature_table = pts.mean_curvature;
    const int trunc = 24;
    const double h = fd_step;
    for (const cplx& z : zs) {
        const FactoredSample c0 = factored_sample(pot, unitarizer, pts, z, basepoint, trunc, ode);
        const FactoredSample cp = factored_sample(pot, unitarizer, pts, z + h, basepoint, trunc, ode);
        const FactoredSample cm = factored_sample(pot, unitarizer, pts, z - h, basepoint, trunc, ode);
        const FactoredSample cip =
            factored_sample(pot, unitarizer, pts, z + h * kI, basepoint, trunc, ode);
        const FactoredSample cim =
            factored_sample(pot, unitarizer, pts, z - h * kI, basepoint, trunc, ode);

        const Mat2 fx = (cp.f - cm.f) * (1.0 / (2.0 * h));
        const Mat2 fy = (cip.f - cim.f) * (1.0 / (2.0 * h));
        const Mat2 fz = (fx - kI * fy) * 0.5;
        const Mat2 fzb = (fx + kI * fy) * 0.5;
        const Mat2 fzzb = (cp.f + cm.f + cip.f + cim.f - c0.f * 4.0) * (1.0 / (4.0 * h * h));

        const SpaceForm sp = pts.form.space;
        const cplx ip_zz = form_inner(fz, fz, sp);
        const cplx ip_zzb = form_inner(fz, fzb, sp);
        const double v2_fd = 2.0 * ip_zzb.real();

        const Mat2 alpha = c0.b0 * residue_of(pot, z) * c0.b0.inverse();
        const Mat2 astar = alpha_star(alpha, pts.form);
        const double v2 = metric_factor(c0.b0, residue_of(pot, z), pts);
        if (v2 <= 0.0) throw std::domain_error("geometry_check: non-positive conformal factor");

        rep.v2_fd = v2_fd;
        rep.v2_formula = v2;
        rep.v2_agreement = std::max(rep.v2_agreement, std::abs(v2_fd - v2) / std::abs(v2));
        rep.conformality = std::max(rep.conformality, std::abs(ip_zz) / v2);

        // normal from the connection coefficient, mean curvature from the stencil
        const cplx ipa = form_inner(alpha, astar, sp);
        const Mat2 comm = alpha * astar - astar * alpha;
        const Mat2 gamma = comm * (-0.5 * kI / ipa);
        const Mat2 nrm = c0.f_l0 * gamma * (c0.f_l1.adjugate() * (1.0 / c0.f_l1.det()));
        // the AdS3-normalized computation yields i H or H depending on the form
        // (the table's i appears only in the S3/AdS3 row); compare magnitudes
        const cplx hnum = 2.0 / v2 * form_inner(fzzb, nrm, sp);
        const double hmag = std::abs(hnum);
        const double dev = std::abs(hmag - std::abs(pts.mean_curvature));
        if (dev >= rep.h_deviation) {
            rep.h_deviation = dev;
            rep.mean_curvature = hmag;
        }
    }
    return rep;
}

std::array<double, 3> h3_matrix_to_ball(const Mat2& x, int* branch) {
    const auto lc = lightcone_coords(x, SpaceForm::H3);
    const double x0 = lc[0];
    if (std::abs(x0) < 1e-6)
        throw std::domain_error("h3_matrix_to_ball: point at the ideal boundary");
    if (branch) *branch = x0 > 0 ? 1 : -1;
    const double d = 1.0 + std::abs(x0);
    return {lc[1] / d, lc[2] / d, lc[3] / d};
}

Mat2 h3_ball_to_matrix(const std::array<double, 3>& b) {
    const double r2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
    if (r2 >= 1.0) throw std::invalid_argument("h3_ball_to_matrix: point outside the ball");
    const double s = 1.0 / (1.0 - r2);
    const double x0 = (1.0 + r2) * s;
    const double x1 = 2.0 * b[0] * s, x2 = 2.0 * b[1] * s, x3 = 2.0 * b[2] * s;
    return Mat2{x0 + x1, cplx(x2, x3), cplx(x2, -x3), x0 - x1};
}

std::array<double, 3> stereographic_from_lightcone(const std::array<double, 5>& lc) {
    const double den = lc[0] + lc[4];
    if (std::abs(den) < 1e-9)
        throw std::domain_error("stereographic projection: x0 + x4 vanishes");
    return {lc[1] / den, lc[2] / den, lc[3] / den};
}

std::array<double, 3> ads3_stereographic(const Mat2& x) {
    return stereographic_from_lightcone(lightcone_coords(x, SpaceForm::AdS3));
}

std::array<double, 3> ball_to_halfspace(const std::array<double, 3>& b) {
    const double q0 = b[0], q1 = b[1], q2 = b[2] + 1.0;
    const double n2 = q0 * q0 + q1 * q1 + q2 * q2;
    return {2.0 * q0 / n2, 2.0 * q1 / n2, 2.0 * q2 / n2 - 1.0};
}

}  // namespace loopcmc
