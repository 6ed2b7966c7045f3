// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <vector>

#include "l0bnb/instance.hpp"

namespace l0bnb {

struct OracleConfig {
  int max_support_size = -1;  // negative: unlimited
  double ls_tolerance = 1e-10;
};

struct OracleSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
};

/// Minimizes 0.5*||y - A_T x_T||^2 over ||x_T||_inf <= M with zeros off the
/// support T. Runs projected gradient with step 1/L_T until the projected
/// gradient map has infinity norm at most ls_tolerance, warm-started from the
/// clipped unconstrained least-squares solution.
Eigen::VectorXd box_ls(const Instance& inst, const std::vector<int>& support,
                       double ls_tolerance);

/// Brute-force reference solver: enumerates every support (size ascending,
/// lexicographic within a size), solves the boxed least-squares problem on
/// each, and returns the first support attaining the minimum objective.
/// Throws if n > 20.
OracleSolution exhaustive_solve(const Instance& inst,
                                const OracleConfig& config = {});

}  // namespace l0bnb
