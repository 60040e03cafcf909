#pragma once

#include <array>
#include <optional>

#include "loopcmc/factor.hpp"
#include "loopcmc/frame.hpp"
#include "loopcmc/loop.hpp"
#include "loopcmc/potential.hpp"

namespace loopcmc {

/// Evaluation points and the target mean curvature they encode.
struct SymPoints {
    cplx lambda0, lambda1;
    RealForm form;
    double mean_curvature = 0.0;
};

/// Canonical evaluation points for a target mean curvature:
///   S3/AdS3: minimal -> (1, -1); otherwise (e^{i t}, e^{-i t}) with H = -cot t.
///   H3/dS3:  minimal -> (i, -i); otherwise (r, -1/r) with H = (1-r^2)/(1+r^2), |H| < 1.
SymPoints sym_points_for(const RealForm& form, double H);

/// Evaluation points attached to a trinoid potential's lambda0:
/// lambda1 = 1/lambda0 (delta = 1) or -1/lambda0 (delta = -1).
SymPoints trinoid_sym_points(const RealForm& form, cplx lambda0);

/// Residual of the matrix-model defining relation plus |det - 1|.
double model_membership(const Mat2& x, SpaceForm space);

/// Lightcone coordinates [x0..x4] of a model point (projective; normalized so the
/// model chart has x4 = 1 for H3/AdS3/dS3 and x0 = 1 for S3).
std::array<double, 5> lightcone_coords(const Mat2& x, SpaceForm space);

struct ModelPoint {
    Mat2 x;
    SpaceForm space = SpaceForm::H3;
    double membership = 0.0;
    std::array<double, 5> lightcone{};
    int branch = 1;  // H3 copy tag: sign of the trace
};

/// f = F(lambda0) F(lambda1)^-1 with membership diagnostics.
/// Throws std::domain_error if the membership residual exceeds hard_tol.
ModelPoint sym_evaluate(const MatrixLoop& f_loop, const SymPoints& pts, double hard_tol = 1e-5);

/// Lie-algebra star of the lambda^-1 coefficient: alpha* = -delta eta alpha^H eta^-1.
Mat2 alpha_star(const Mat2& alpha, const RealForm& form);

/// Inner product <x,y> = +-1/2 tr(x adj(y)) extending the space-form metric.
cplx form_inner(const Mat2& x, const Mat2& y, SpaceForm space);

/// Conformal factor v^2 = 2 (1/l0 - 1/l1)(l0 - l1) <alpha, alpha*>,
/// alpha = B(0) xi_{-1} B(0)^-1.
double metric_factor(const Mat2& b0, const Mat2& xi_residue, const SymPoints& pts);

struct GeometryReport {
    double conformality = 0.0;    // max |<f_z,f_z>| / v^2 over the probe points
    double mean_curvature = 0.0;  // worst finite-difference |H| estimate
    double mean_curvature_table = 0.0;
    double h_deviation = 0.0;     // max | |H_fd| - |H_table| |
    double v2_fd = 0.0;
    double v2_formula = 0.0;
    double v2_agreement = 0.0;    // max relative deviation of the two metrics
};

/// Finite-difference conformality and mean-curvature probe at the given points:
/// integrates the frame from `basepoint`, factorizes, evaluates a 5-point stencil.
GeometryReport geometry_check(const Potential& pot, const MatrixLoop* unitarizer,
                              const SymPoints& pts, std::span<const cplx> zs, cplx basepoint,
                              double fd_step = 1e-4, const OdeOptions& ode = {});

/// Poincare-ball coordinates of a point in the H3 u H3 model; branch = +-1 selects
/// the copy (sign of the trace). Throws std::domain_error on the ideal boundary.
std::array<double, 3> h3_matrix_to_ball(const Mat2& x, int* branch = nullptr);

/// Inverse chart used as an oracle: ball point (|b|<1) to the positive-definite copy.
Mat2 h3_ball_to_matrix(const std::array<double, 3>& b);

/// Stereographic chart of AdS3/dS3 (and S3) lightcone coordinates into R^{1,2}/R^3.
std::array<double, 3> ads3_stereographic(const Mat2& x);
std::array<double, 3> stereographic_from_lightcone(const std::array<double, 5>& lc);

/// Upper-halfspace coordinates from Poincare-ball coordinates.
std::array<double, 3> ball_to_halfspace(const std::array<double, 3>& b);

}  // namespace loopcmc
