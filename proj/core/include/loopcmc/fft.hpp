#pragma once

#include <vector>

#include "loopcmc/mat2.hpp"

namespace loopcmc::detail {

// Discrete Fourier transforms on the offset collocation grid
// lambda_j = radius * exp(2 pi i (j + 1/2) / M), j = 0..M-1.
//
// The half-sample offset keeps the grid equispaced and exactly permuted by
// lambda -> -lambda and lambda -> 1/conj(lambda) while avoiding the points
// +-1, +-i where several loop families have structural zeros.

/// Laurent coefficients c_k, k in [-trunc, trunc] (index k + trunc), from samples.
std::vector<cplx> samples_to_coeffs(const std::vector<cplx>& samples, int trunc, double radius);

/// Samples at the offset grid of size num_samples from coefficients (size 2*trunc+1).
std::vector<cplx> coeffs_to_samples(const std::vector<cplx>& coeffs, int num_samples, double radius);

}  // namespace loopcmc::detail
