// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace l0bnb {

/// Largest eigenvalue of A^T A (the squared spectral norm of A), estimated by
/// power iteration from a fixed deterministic start vector. Stops when the
/// Rayleigh quotient changes by less than `tol` relatively, or after
/// `max_iterations`.
double gram_largest_eigenvalue(const Eigen::MatrixXd& a, double tol = 1e-6,
                               int max_iterations = 500);

}  // namespace l0bnb
