#pragma once

#include <array>
#include <string>
#include <vector>

#include "loopcmc/frame.hpp"
#include "loopcmc/potential.hpp"

namespace loopcmc {

/// Configuration of the perturbative n-noid monodromy problem. The weights tau
/// and centers p must satisfy the balancing condition (balance_residual ~ 0):
///   sum 2 tau_k conj(p_k)/(1-|p_k|^2) = sum tau_k (1+|p_k|^2)/(1-|p_k|^2)
///     = sum 2 tau_k p_k/(1-|p_k|^2) = 0.
struct BalanceConfig {
    std::vector<double> tau;
    std::vector<cplx> p;
    RealForm form = form_h3();  // AdS3 supported with the same machinery
    int degree = 16;            // lambda power-series truncation of b_k, z_k
    int sample_pairs = 0;       // 0: 2*degree + 2
    double t_start = 1e-4;      // continuation start
    double t_max = 0.02;
    double newton_tol = 1e-9;
    int max_newton = 30;
    double fd_step = 1e-7;
    double loop_radius = 0.0;   // 0: auto from the configuration
    OdeOptions ode{1e-11};
};

/// The three balancing sums.
std::array<cplx, 3> balance_residual(std::span<const double> tau, std::span<const cplx> p);

/// Stacked real components of M_k*(lambda_j) - M_k(lambda_j) over all generators
/// and sample pairs; zero iff the monodromy is unitary at the samples.
std::vector<double> unitarity_residual(const NnoidParams& params, const BalanceConfig& cfg);

struct SolveTrace {
    std::vector<double> t_steps;
    std::vector<double> residual_norms;  // final residual at each accepted t
    std::vector<int> newton_iterations;
    bool converged = false;
    std::string message;
};

struct NnoidSolution {
    NnoidParams params;
    SolveTrace trace;
};

/// Newton continuation from t = 0 (where the initialization is exact) to the
/// requested t, adjusting tau_k and the series coefficients of b_k, z_k so that
/// the monodromy is unitary for the chosen real form. a_k stays pinned to tau_k
/// and z_1's constant term is fixed (gauge).
NnoidSolution solve_nnoid(const BalanceConfig& cfg, double t);

/// Sampling sample set used by the solver (pairs lambda_j, -lambda_j for delta=-1).
std::vector<cplx> nnoid_sample_lambdas(const BalanceConfig& cfg);

/// Loop radii around each puncture used for the monodromy integrations.
double nnoid_loop_radius(const BalanceConfig& cfg);

}  // namespace loopcmc
