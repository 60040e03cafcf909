#pragma once

#include <functional>
#include <string>
#include <vector>

#include "loopcmc/loop.hpp"

namespace loopcmc {

/// Small Laurent polynomial in lambda with 2x2 matrix coefficients.
struct LaurentMat {
    int lo = 0;
    std::vector<Mat2> c;  // exponents lo .. lo + c.size() - 1

    Mat2 eval(cplx lambda) const {
        Mat2 out = Mat2::zero();
        cplx p = std::pow(lambda, lo);
        for (const auto& m : c) {
            out += m * p;
            p *= lambda;
        }
        return out;
    }
    Mat2 coeff(int k) const {
        const int i = k - lo;
        return (i >= 0 && i < static_cast<int>(c.size())) ? c[i] : Mat2::zero();
    }
    int hi() const { return lo + static_cast<int>(c.size()) - 1; }
};

/// A holomorphic potential: matrix 1-form xi(z, lambda) dz, rational in z and
/// Laurent-polynomial in lambda with a simple pole at lambda = 0 whose residue
/// is nilpotent and nowhere zero.
struct Potential {
    std::function<Mat2(cplx z, cplx lambda)> eval;   // xi/dz at (z, lambda)
    std::function<LaurentMat(cplx z)> coeffs;        // lambda-coefficients at z
    std::vector<cplx> punctures;                     // finite punctures
    bool puncture_at_infinity = false;
    /// Puncture positions may move with lambda (perturbative families); defaults
    /// to the fixed list.
    std::function<std::vector<cplx>(cplx lambda)> punctures_at;
    int lambda_lo = -1;
    int lambda_hi = -1;
    std::string description;

    std::vector<cplx> punctures_for(cplx lambda) const {
        return punctures_at ? punctures_at(lambda) : punctures;
    }
};

/// xi = [[0, 1/lambda],[0, 0]] dz on the plane; the plainest potential, giving a
/// totally geodesic disk in H^3 / AdS3.
Potential sphere_potential();

/// xi = i A dz/z on C^* with A = (2 sqrt(q^2-1))^-1 [[0, 1/lambda + q],[lambda - q, 0]];
/// requires |q| > 1.
Potential delaunay_potential_h3(double q);
/// The z-independent coefficient A itself.
Mat2 delaunay_matrix_h3(double q, cplx lambda);

/// xi = i A dz/z on C^* for the AdS3 family, evaluation points (i, -i).
Potential delaunay_potential_ads3(double q);
Mat2 delaunay_matrix_ads3(double q, cplx lambda);

/// xi = [[0, 1/lambda],[c z^n, 0]] dz on the plane.
Potential smyth_potential(int n, double c);

struct TrinoidParams {
    double a = 0.1;   // quadratic residue at z = +-1
    double b = 0.15;  // quadratic residue at z = infinity
    RealForm form = form_h3();
    cplx lambda0 = cplx(1.0);  // evaluation point; unit modulus for S3/AdS3, real for H3/dS3
};

/// Admissibility of the evaluation point for the form (unit modulus away from +-1
/// for delta=1, real nonzero for delta=-1).
bool trinoid_lambda0_admissible(const RealForm& form, cplx lambda0);
/// f(lambda) from the evaluation point: (l-l0)(l-1/l0) for delta=1,
/// (l-l0)(l+1/l0) for delta=-1.
cplx trinoid_f(const RealForm& form, cplx lambda0, cplx lambda);
/// kappa(lambda) = 4 f(lambda)/lambda.
cplx trinoid_kappa(const RealForm& form, cplx lambda0, cplx lambda);

/// xi = [[0, 1/lambda],[f(lambda) Q(z), 0]] dz with ends z = 1, -1, infinity and
/// Q = (4a + b(z^2-1))/(z^2-1)^2.
Potential trinoid_potential(const TrinoidParams& params);

/// Coefficients of the perturbative n-noid family. tau are the real weights
/// (a_k is pinned to tau_k), b and z hold power-series coefficients in lambda
/// of degree `degree`.
struct NnoidParams {
    double t = 0.0;
    std::vector<double> tau;
    std::vector<std::vector<cplx>> b;  // b[k][d], d = 0..degree
    std::vector<std::vector<cplx>> z;  // z[k][d]
    int degree = 16;

    int ends() const { return static_cast<int>(tau.size()); }
    cplx b_at(int k, cplx lambda) const;
    cplx z_at(int k, cplx lambda) const;
    /// Initialization at t = 0: b_k = 2 tau_k conj(p_k)/(1-|p_k|^2), z_k = p_k.
    static NnoidParams initial(const std::vector<double>& tau, const std::vector<cplx>& p,
                               int degree);
};

/// xi_t = [[0, dz/lambda],[i t (lambda^2+1) omega, 0]] with
/// omega = sum_k (a_k/(z-z_k)^2 + b_k/(z-z_k)) dz; evaluation points (i, -i).
Potential nnoid_potential(const NnoidParams& params);

/// z-dependent coefficient of 1/lambda in det(xi/dz) (the Hopf differential
/// up to a z-independent factor).
std::function<cplx(cplx)> hopf_leading_term(const Potential& pot);

}  // namespace loopcmc
