#pragma once

#include <optional>
#include <span>
#include <vector>

#include "loopcmc/potential.hpp"

namespace loopcmc {

struct OdeOptions {
    double tol = 1e-10;      // local error control per unit step
    double h_init = 0.1;
    double h_min = 1e-13;
    long max_steps = 2'000'000;
    double clearance = 1e-3;  // minimal allowed distance of the path to a puncture
    int threads = 0;          // 0: hardware concurrency
};

/// Piecewise path of straight segments and circular arcs.
struct Path {
    struct Seg {
        bool is_arc = false;
        cplx z0, z1;      // line endpoints
        cplx center;      // arc data
        double radius = 0.0, th0 = 0.0, th1 = 0.0;
    };
    std::vector<Seg> segs;

    static Path line(cplx z0, cplx z1);
    static Path polyline(std::span<const cplx> pts);
    /// Closed loop based at `base` around `center`: radial approach, positively
    /// oriented full circle of the given radius, radial return.
    static Path puncture_loop(cplx base, cplx center, double radius);
    /// Arc of a circle, from angle th0 to th1 (radians, signed sweep).
    static Path arc(cplx center, double radius, double th0, double th1);

    cplx start() const;
    cplx end() const;
    double min_distance_to(cplx point) const;
};

/// Endpoint values of the solution of dPhi = Phi xi along the path, one per
/// lambda, initial value `initial` (identity by default). Integrations for
/// different lambda are independent and run in parallel.
std::vector<Mat2> integrate_values(const Potential& pot, const Path& path,
                                   std::span<const cplx> lambdas, const OdeOptions& opts = {},
                                   const Mat2& initial = Mat2::identity());

/// max |det Phi - 1| observed during the last integrate_values call is folded into
/// the returned values; a dedicated probe:
double unimodularity_drift(std::span<const Mat2> values);

/// Endpoint frame assembled into a matrix loop at the collocation grid.
MatrixLoop integrate_frame(const Potential& pot, const Path& path, int trunc,
                           const OdeOptions& opts = {}, const Mat2& initial = Mat2::identity());

/// Monodromy around one puncture: endpoint frame of a positively oriented loop
/// based at `basepoint` (initial frame identity), M = Phi(gamma . z0) Phi(z0)^-1.
MatrixLoop monodromy(const Potential& pot, int puncture_index, cplx basepoint, int trunc,
                     double loop_radius = 0.0, const OdeOptions& opts = {});
MatrixLoop monodromy_about(const Potential& pot, cplx center, double loop_radius, cplx basepoint,
                           int trunc, const OdeOptions& opts = {});
std::vector<Mat2> monodromy_values(const Potential& pot, cplx center, double loop_radius,
                                   cplx basepoint, std::span<const cplx> lambdas,
                                   const OdeOptions& opts = {});

/// Delaunay monodromy-eigenvalue exponent: eigenvalues of the monodromy are
/// exp(+-2 pi nu). Principal branch; continuity along a sample sequence is the
/// caller's concern (only the +- pairing is affected).
cplx delaunay_nu(double q, cplx lambda, SpaceForm space = SpaceForm::H3);

/// Max deviation of tr M(lambda)/2 from cos(2 pi nu_k(lambda)),
/// nu_k = 1/2 - 1/2 sqrt(1 + q_res kappa), kappa = 4 f(lambda)/lambda, compared
/// up to the overall sign of the trace (spin lift of the gauge).
double end_eigenvalue_check(const MatrixLoop& m, double q_res,
                            const std::function<cplx(cplx)>& f, std::span<const cplx> lambdas);

struct DelaunayFit {
    double q = 0.0;
    double deviation = 0.0;
};
/// Fit a Delaunay weight q (|q| > 1) to half-trace samples on the circle:
/// traces ~ -+cos(pi sqrt(1 + q prof/(q^2-1))) with prof = lambda0/l - conj(lambda0) l,
/// the exponent profile of the rotational family with evaluation points
/// (lambda0, -lambda0). lambda0 = 1 is the classical family; n-noid ends use
/// lambda0 = i.
DelaunayFit fit_delaunay_weight(std::span<const cplx> lambdas, std::span<const cplx> half_traces,
                                cplx lambda0 = cplx(1.0));

}  // namespace loopcmc
