// SPDX-License-Identifier: Apache-2.0
#include "l0bnb/screening.hpp"

#include <stdexcept>

namespace l0bnb {

ScreeningResult node_screen_with_correlations(
    const Instance& inst, const Node& node, const Eigen::VectorXd& u,
    const Eigen::VectorXd& correlations, double upper_bound) {
  const double base = dual_objective_from_correlations(inst, node, u, correlations);
  const double cutoff = upper_bound + kScreeningSlack;
  ScreeningResult out;
  for (int i = 0; i < node.size(); ++i) {
    if (node.status(i) != EntryStatus::kFree) continue;
    const PivotValues pv =
        pivot_values(correlations[i], inst.lambda(), inst.big_m());
    const bool zero_branch_dead = base + pv.at_zero > cutoff;
    const bool one_branch_dead = base + pv.at_one > cutoff;
    if (zero_branch_dead && one_branch_dead) {
      // Both children of this index are certified suboptimal, so no
      // assignment below the node can reach the bound: discard it outright.
      out.prune_node = true;
      return out;
    }
    if (zero_branch_dead) {
      out.fix_to_one.push_back(i);
    } else if (one_branch_dead) {
      out.fix_to_zero.push_back(i);
    }
  }
  return out;
}

ScreeningResult node_screen(const Instance& inst, const Node& node,
                            const Eigen::VectorXd& u, double upper_bound) {
  if (u.size() != inst.rows()) {
    throw std::invalid_argument("u length does not match dictionary rows");
  }
  Eigen::VectorXd correlations = inst.a().transpose() * u;
  for (int i = 0; i < node.size(); ++i) {
    if (node.status(i) == EntryStatus::kZero) correlations[i] = 0.0;
  }
  return node_screen_with_correlations(inst, node, u, correlations, upper_bound);
}

Node apply_screening(const Node& node, const ScreeningResult& result) {
  if (result.prune_node) {
    throw std::logic_error("cannot apply a result that prunes the whole node");
  }
  Node out = node;
  for (int i : result.fix_to_zero) out.fix(i, EntryStatus::kZero);
  for (int i : result.fix_to_one) out.fix(i, EntryStatus::kOne);
  return out;
}

}  // namespace l0bnb
