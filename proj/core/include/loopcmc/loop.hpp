#pragma once

#include <span>
#include <string>
#include <vector>

#include "loopcmc/mat2.hpp"

namespace loopcmc {

enum class SpaceForm { S3, AdS3, H3, dS3 };

std::string to_string(SpaceForm s);
SpaceForm space_form_from_string(const std::string& name);

/// One of the four star involutions X*(lambda) = eta (X(delta/conj lambda)^H)^-1 eta^-1.
/// Fixed points are the "unitary" loops of the corresponding symmetric space.
struct RealForm {
    SpaceForm space = SpaceForm::S3;
    int delta = 1;    // +1: S3, AdS3;  -1: H3, dS3
    int epsilon = 1;  // +1: S3, H3;   -1: AdS3, dS3

    Mat2 eta() const {
        return epsilon == 1 ? Mat2::identity() : Mat2::diag(cplx(0, 1), cplx(0, -1));
    }
    static RealForm of(SpaceForm s);
};

inline RealForm form_s3() { return RealForm::of(SpaceForm::S3); }
inline RealForm form_ads3() { return RealForm::of(SpaceForm::AdS3); }
inline RealForm form_h3() { return RealForm::of(SpaceForm::H3); }
inline RealForm form_ds3() { return RealForm::of(SpaceForm::dS3); }

/// Scalar-valued loop as truncated Laurent series plus collocation samples on the
/// offset grid lambda_j = radius e^{2 pi i (j+1/2)/M}, M = 4 max(N,1).
class ScalarLoop {
public:
    ScalarLoop() : ScalarLoop(std::vector<cplx>{cplx(0.0)}, 1.0) {}

    static ScalarLoop constant(cplx v, int trunc = 0, double radius = 1.0);
    /// Single term c * lambda^k.
    static ScalarLoop term(int k, cplx c, double radius = 1.0);
    static ScalarLoop from_coeffs(std::vector<cplx> coeffs, double radius = 1.0);
    static ScalarLoop from_samples(const std::vector<cplx>& samples, int trunc, double radius = 1.0);

    int trunc() const { return trunc_; }
    double radius() const { return radius_; }
    int num_samples() const { return static_cast<int>(samples_.size()); }
    cplx coeff(int k) const;
    const std::vector<cplx>& coeffs() const { return coeffs_; }
    const std::vector<cplx>& samples() const { return samples_; }
    cplx sample_point(int j) const;

    cplx eval(cplx lambda) const;
    double max_abs() const;
    ScalarLoop retrunc(int new_trunc) const;
    /// Smallest N' such that all coefficients beyond N' are below tol * max|coeff|.
    int effective_trunc(double tol = 1e-14) const;

private:
    ScalarLoop(std::vector<cplx> coeffs, double radius);
    int trunc_;
    double radius_;
    std::vector<cplx> coeffs_;   // index k + trunc
    std::vector<cplx> samples_;  // offset grid, size 4*max(trunc,1)
};

ScalarLoop smul(const ScalarLoop& f, const ScalarLoop& g);
ScalarLoop sadd(const ScalarLoop& f, const ScalarLoop& g);
ScalarLoop sscale(const ScalarLoop& f, cplx s);
/// f*(lambda) = conj(f(delta / conj lambda)). Radius must be 1.
ScalarLoop sstar(const ScalarLoop& f, int delta);
/// Winding of f around 0 along the collocation circle. f must not vanish on it.
int winding_number(const ScalarLoop& f);
/// exp(f) computed at the samples.
ScalarLoop sexp(const ScalarLoop& f, int trunc = -1);

/// Matrix-valued loop on a circle; truncated Laurent coefficients plus samples.
/// Values are expected to stay in SL2(C); deviations are observable through det drift.
class MatrixLoop {
public:
    MatrixLoop() : MatrixLoop(std::vector<Mat2>{Mat2::identity()}, 1.0, 0.0) {}

    static MatrixLoop identity(int trunc = 0, double radius = 1.0);
    static MatrixLoop constant(const Mat2& m, int trunc = 0, double radius = 1.0);
    /// Loop with a single Laurent term m * lambda^k (plus identity if add_identity).
    static MatrixLoop term(int k, const Mat2& m, double radius = 1.0);
    static MatrixLoop from_coeffs(std::vector<Mat2> coeffs, double radius = 1.0);
    static MatrixLoop from_samples(const std::vector<Mat2>& samples, int trunc, double radius = 1.0);

    int trunc() const { return trunc_; }
    double radius() const { return radius_; }
    int num_samples() const { return static_cast<int>(samples_.size()); }
    const Mat2& coeff(int k) const;
    const std::vector<Mat2>& coeffs() const { return coeffs_; }
    const std::vector<Mat2>& samples() const { return samples_; }
    cplx sample_point(int j) const;

    Mat2 eval(cplx lambda) const;
    /// Crude conditioning estimate of eval off the collocation circle:
    /// sum_k |c_k| |lambda|^k / |result|.
    double eval_condition(cplx lambda) const;

    double max_abs() const;
    double det_drift() const;  // max_j |det(sample_j) - 1|
    /// Norm of coefficients discarded by the last re-truncation.
    double spill() const { return spill_; }
    int effective_trunc(double tol = 1e-14) const;
    MatrixLoop retrunc(int new_trunc) const;

    /// Scalar loop of one entry (0<=row,col<2).
    ScalarLoop entry(int row, int col) const;

private:
    MatrixLoop(std::vector<Mat2> coeffs, double radius, double spill);
    int trunc_;
    double radius_;
    double spill_ = 0.0;
    std::vector<Mat2> coeffs_;
    std::vector<Mat2> samples_;
};

/// Product loop, truncated to max(trunc A, trunc B) by default; the dropped tail
/// norm is recorded in the result's spill().
MatrixLoop mul(const MatrixLoop& a, const MatrixLoop& b);
MatrixLoop mul(const MatrixLoop& a, const MatrixLoop& b, int out_trunc);
MatrixLoop mul_const(const Mat2& c, const MatrixLoop& a);
MatrixLoop mul_const(const MatrixLoop& a, const Mat2& c);

/// X*(lambda) = eta (X(delta/conj lambda)^H)^-1 eta^-1, inverse taken as adjugate.
/// Requires radius 1 (the involution maps |lambda| = r to |lambda| = 1/r otherwise).
MatrixLoop star(const MatrixLoop& a, const RealForm& form);

/// Pointwise adjugate; exact inverse for unimodular values.
MatrixLoop inverse(const MatrixLoop& a, double det_tol = 1e-4);

struct UnitarityResult {
    bool unitary = false;
    double residual = 0.0;
};
/// max_j || A*(lambda_j) - A(lambda_j) || against tol.
UnitarityResult is_unitary(const MatrixLoop& a, const RealForm& form, double tol = 1e-9);

}  // namespace loopcmc
