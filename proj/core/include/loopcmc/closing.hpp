#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "loopcmc/factor.hpp"
#include "loopcmc/loop.hpp"

namespace loopcmc {

struct ClosingReport {
    double intrinsic = 0.0;                 // max_k max_j |M_k* - M_k|
    std::vector<double> extrinsic0;         // per generator: min(|M(l0)-1|, |M(l0)+1|)
    std::vector<double> extrinsic1;         // same at l1
    std::vector<int> extrinsic_sign;        // +1 if closest to +1, -1 if closest to -1
    bool closes(double tol) const;
    std::string summary() const;
};

/// Intrinsic (M* = M) and extrinsic (M(l_i) = +-1) closing residuals.
ClosingReport check_closing(std::span<const MatrixLoop> monodromies, const RealForm& form,
                            cplx lambda0, cplx lambda1);

/// 1 - t0^2 - t1^2 - t2^2 + 2 t0 t1 t2; vanishes exactly at reducible representations.
ScalarLoop trace_polynomial(const ScalarLoop& t0, const ScalarLoop& t1, const ScalarLoop& t2);

/// Half-trace loops of the three trinoid monodromies from the quadratic residues:
/// t_k = cos(2 pi nu_k), nu_k = 1/2 - 1/2 sqrt(1 + q_k kappa), kappa = 4 f/lambda.
std::array<ScalarLoop, 3> halftraces_from_residues(double q0, double q1, double q2,
                                                   const RealForm& form, cplx lambda0, int trunc);

/// Leading coefficient of the trace polynomial's expansion in kappa:
/// c = (pi^4/64)(q0+q1+q2)(-q0+q1+q2)(q0-q1+q2)(q0+q1-q2).
double phi_leading_coefficient(double q0, double q1, double q2);

/// p, q, r extracted from the structural shape M0 = [[r, p lambda],[-q/lambda, r*]].
struct TrinoidEntries {
    ScalarLoop p, q, r;
    double structure_residual = 0.0;  // deviation of M0(2,2) from r*
};
TrinoidEntries extract_trinoid_entries(const MatrixLoop& m0, const RealForm& form);

struct TrinoidUnitarizer {
    MatrixLoop unitarizer;  // diagonal X = diag(sqrt(x+), 1/sqrt(x+)), interior
    ScalarLoop x_plus;
    int sign = 1;                  // sign[q/p*], must equal delta*epsilon
    double unitarity_residual = 0.0;  // max over X M_i X^-1
    double factor_residual = 0.0;
    double structure_residual = 0.0;
};

/// Unitarize the trinoid monodromies via the scalar factorization
/// q/p* = delta epsilon x_+^* x_+. Throws std::domain_error on a sign mismatch
/// (parameters outside the admissible subregion for the form).
TrinoidUnitarizer trinoid_unitarizer(const MatrixLoop& m0, const MatrixLoop& m1,
                                     const RealForm& form);

/// Conjugate a loop by the unitarizer: X M X^-1.
MatrixLoop conjugate_by(const MatrixLoop& x, const MatrixLoop& m);

/// Diagonal simple factor g = diag(p^(1/2), p^(-1/2)), p = (lambda-mu)/(conj(mu) lambda+1),
/// as a loop on the r-circle, r < |mu|; branch fixed by p(0) = -mu.
MatrixLoop simple_factor(cplx mu, double radius, int trunc = 32);
cplx simple_factor_p(cplx mu, cplx lambda);

struct DressResult {
    MatrixLoop dressed;                 // sampled on the unit circle
    Mat2 k;                             // the constant middle factor
    std::function<Mat2(cplx)> eval;     // direct evaluation anywhere off the poles
};

/// Simple-factor dressing g # F = g F k^-1 g^-1 with (u,v) = F(mu)^-1 ell,
/// phase-normalized. For a dS3-unitary F the result is H3-unitary and vice versa.
DressResult dress(const MatrixLoop& f, cplx mu, std::array<cplx, 2> ell, const RealForm& source);

/// Evaluate the conjugation g M g^-1 (only p^{+-1} enters).
Mat2 dress_conjugate(const MatrixLoop& m, cplx mu, cplx lambda);

/// Unitarity residual of an evaluator-defined loop on the annulus pair
/// |lambda| = r and |lambda| = 1/r (the star couples the two circles).
double annulus_unitarity_residual(const std::function<Mat2(cplx)>& eval, const RealForm& form,
                                  double radius, int nsamples = 64);

/// Common eigenvector of the monodromies at mu; returns the collinearity residual.
std::array<cplx, 2> common_eigenvector(std::span<const MatrixLoop> monodromies, cplx mu,
                                       double* collinearity = nullptr);

/// The lambda values where the equilateral-trinoid monodromy is reducible:
/// 1/2 - 1/2 sqrt(1 + 4 q f(mu)/mu) in Z/3, solved per branch in closed form,
/// filtered to rmin <= |mu| <= rmax and away from the evaluation points.
std::vector<cplx> reducible_lambda_set(double q_res, const RealForm& form, cplx lambda0,
                                       double rmin, double rmax, int kmax = 12);

}  // namespace loopcmc
