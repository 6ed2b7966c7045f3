// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <vector>

#include "l0bnb/instance.hpp"
#include "l0bnb/node.hpp"
#include "l0bnb/relaxation.hpp"

namespace l0bnb {

// Margin added to the upper bound before a test is allowed to pass, so that
// floating-point ties never prune an optimal node.
inline constexpr double kScreeningSlack = 1e-12;

/// Outcome of the per-node screening tests. fix_to_zero lists undecided
/// indices whose nonzero branch is certified suboptimal; fix_to_one lists
/// those whose zero branch is. When some index certifies both branches,
/// prune_node is set and the node itself can be discarded.
struct ScreeningResult {
  std::vector<int> fix_to_zero;
  std::vector<int> fix_to_one;
  bool prune_node = false;

  bool empty() const {
    return fix_to_zero.empty() && fix_to_one.empty() && !prune_node;
  }
};

/// Runs both screening tests at every undecided index of `node` with dual
/// point u against `upper_bound`, a valid bound on the global optimum. With
/// base = dual_objective(node, u) computed once:
///   base + at_zero pivot > upper_bound  certifies the zero branch away
///     (the index can only be nonzero; it joins fix_to_one),
///   base + at_one pivot  > upper_bound  certifies the nonzero branch away
///     (the index joins fix_to_zero).
ScreeningResult node_screen(const Instance& inst, const Node& node,
                            const Eigen::VectorXd& u, double upper_bound);

/// Same tests from precomputed correlations A^T u: one O(1) check per
/// undecided index.
ScreeningResult node_screen_with_correlations(
    const Instance& inst, const Node& node, const Eigen::VectorXd& u,
    const Eigen::VectorXd& correlations, double upper_bound);

/// Moves every index in fix_to_zero / fix_to_one of `result` in one step.
/// Valid because a passed test keeps passing at any descendant that still has
/// the index undecided. Throws if result.prune_node is set (the caller must
/// discard the node instead) or if the result does not match the node.
Node apply_screening(const Node& node, const ScreeningResult& result);

}  // namespace l0bnb
