// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <utility>

#include "l0bnb/instance.hpp"
#include "l0bnb/node.hpp"
#include "l0bnb/relaxation.hpp"

namespace l0bnb {

enum class Exploration {
  kDepthFirst,  // nonzero branch explored first
  kBestBound,   // lowest dual bound first
};

struct SolverConfig {
  Exploration exploration = Exploration::kDepthFirst;
  bool screening_enabled = true;
  double time_limit_seconds = 1000.0;
  double gap_tolerance = 1e-6;  // absolute, on objective values
  RelaxationConfig relaxation;
  // Relaxation entries above this magnitude enter the heuristic support;
  // unset means 1e-6 * M.
  std::optional<double> support_threshold;
  // When set, one line per node event: id, set sizes, dual bound, incumbent,
  // action, screening fixes.
  std::ostream* trace = nullptr;
};

struct Solution {
  Eigen::VectorXd x;
  double objective = 0.0;
  bool optimal = false;  // false when the time limit was hit
};

struct SolveStats {
  long nodes_processed = 0;      // relaxations bounded to completion
  long nodes_screened_out = 0;   // subtrees discarded by screening tests
  long variables_fixed_by_screening = 0;
  double wall_time_seconds = 0.0;
  bool timed_out = false;
};

/// Feasible-point construction at a node: takes the support T = fixed-nonzero
/// indices plus undecided indices where |x_relax| exceeds the threshold,
/// solves boxed least squares on T, and returns the point with its full
/// objective. The point respects the node's zero set and the box.
std::pair<Eigen::VectorXd, double> upper_bound_heuristic(
    const Instance& inst, const Node& node, const Eigen::VectorXd& x_relax,
    double support_threshold);

struct BranchResult {
  int index = -1;
  Node child0;  // index forced to zero
  Node child1;  // index forced nonzero
};

/// Picks the undecided index with the largest |x_relax| (ties: smallest
/// index) and builds both children. Throws when the node has no undecided
/// index.
BranchResult branch(const Node& node, const Eigen::VectorXd& x_relax);

/// Exact solve of the cardinality-penalized problem by branch and bound.
/// Unless the time limit interrupts, the returned objective is the global
/// optimum within config.gap_tolerance; on timeout the best incumbent is
/// returned with optimal == false.
std::pair<Solution, SolveStats> solve(const Instance& inst,
                                      const SolverConfig& config = {});

}  // namespace l0bnb
