#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "loopcmc/loop.hpp"

namespace loopcmc {

/// Thrown when a factorization leaves the big cell (singular Toeplitz section,
/// or a non-positive pivot in the middle-term solve). Geometrically the surface
/// reaches the ideal boundary there.
class BigCellError : public std::runtime_error {
public:
    BigCellError(const std::string& what, double margin)
        : std::runtime_error(what), margin_(margin) {}
    double margin() const { return margin_; }

private:
    double margin_;
};

struct BirkhoffOptions {
    int plus_trunc = -1;              // <0: bandwidth of G plus a small pad
    double singular_rel_tol = 1e-11;  // sigma_min/sigma_max below this is out of the big cell
};

struct BirkhoffResult {
    MatrixLoop minus;  // extends to the exterior disk, value 1 at infinity
    MatrixLoop plus;   // extends to the interior disk
    double residual = 0.0;
    double smallest_singular_value = 0.0;
};

/// G = minus * plus with minus(inf) = 1, via the finite-section block-Toeplitz
/// least-squares system for P = plus^-1: (G P)_k = delta_{k0} * Id, k >= 0.
BirkhoffResult birkhoff(const MatrixLoop& g, const BirkhoffOptions& opts = {});

struct IwasawaOptions {
    int plus_trunc = -1;
    double singular_rel_tol = 1e-11;
    double pivot_floor = 1e-12;  // pivots at or below this count as boundary hits
    bool allow_branch_flip = false;  // factor sigma*A0 when A0 is negative definite
};

struct IwasawaResult {
    MatrixLoop unitary;   // F, with F* = branch_sign * F
    MatrixLoop positive;  // B, interior, B(0) upper triangular with positive diagonal
    double pivot = 0.0;   // smallest middle-term pivot magnitude (big-cell margin)
    int branch_sign = 1;  // -1 on the far side of the ideal boundary
    double residual = 0.0;        // reconstruction max_j |F B - Phi|
    double hermitian_residual = 0.0;  // deviation of the middle term from eta-Hermitian
    double birkhoff_sv = 0.0;
};

/// Iwasawa factorization Phi = F B relative to the real form: Birkhoff-factorize
/// H = (Phi*)^-1 Phi, then fix the constant middle term by an eta-twisted Cholesky
/// normalized so B(0) is upper triangular with positive real diagonal.
IwasawaResult iwasawa(const MatrixLoop& phi, const RealForm& form, const IwasawaOptions& opts = {});

struct ScalarBirkhoffResult {
    cplx leading = 1.0;  // c in f = c lambda^n f_- f_+
    int winding = 0;     // n
    ScalarLoop minus;    // f_-(inf) = 1
    ScalarLoop plus;     // f_+(0) = 1
    double residual = 0.0;
};

/// f = c lambda^n f_- f_+ for a loop nonvanishing on the circle (log-split method).
ScalarBirkhoffResult scalar_birkhoff(const ScalarLoop& f);

struct CircleZero {
    cplx point;
    int order;  // order of the zero of f there; must be even
};

struct SignResult {
    int epsilon = 1;
    ScalarLoop plus;  // f = epsilon * plus^* * plus; carries half the circle divisor
    std::vector<CircleZero> half_divisor;
    double residual = 0.0;
    double star_residual = 0.0;  // deviation of the input from f* = f
};

/// Factor a star-symmetric meromorphic loop as epsilon * f_+^* f_+ after dividing
/// out the declared even-order circle zeros. The divisor is supplied analytically
/// (in scope, circle zeros only arise from kappa, whose zero set is known); for
/// delta = -1 the zeros must come in antipodal pairs of equal order.
SignResult scalar_sign(const ScalarLoop& f, std::span<const CircleZero> divisor,
                       const RealForm& form);

/// sign of f alone (empty divisor).
inline SignResult scalar_sign(const ScalarLoop& f, const RealForm& form) {
    return scalar_sign(f, {}, form);
}

}  // namespace loopcmc
