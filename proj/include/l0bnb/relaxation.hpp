// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>

#include "l0bnb/instance.hpp"
#include "l0bnb/node.hpp"

namespace l0bnb {

struct RelaxationConfig {
  double gap_tolerance = 1e-8;  // absolute duality-gap stop
  int max_iterations = 100000;
  int screening_check_period = 5;  // iterations between callback invocations
};

/// Primal/dual candidate pair for the node relaxation, with a certified gap.
/// dual_value is exact for the returned u and therefore a valid lower bound
/// on the node optimum whether or not the solve converged. Converged results
/// carry u recomputed as y - A*x; a callback-stopped result carries the
/// incrementally tracked residual, which may differ from y - A*x by
/// accumulated rounding noise far below every stopping tolerance.
struct RelaxationResult {
  Eigen::VectorXd x;  // feasible for the node: x == 0 on the zero set, boxed
  Eigen::VectorXd u;  // residual dual candidate, see above
  Eigen::VectorXd correlations;  // A^T u; entries on the zero set are 0
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;  // primal_value - dual_value
  bool converged = false;
  bool callback_stop = false;
  int iterations = 0;
};

enum class CallbackSignal { kContinue, kStop };

/// Snapshot handed to the periodic callback. References stay valid only for
/// the duration of the call. `correlations` holds A^T u for the undecided and
/// forced-nonzero columns; entries on the zero set are 0 and never consumed
/// by the dual objective or the screening tests.
struct RelaxationIterate {
  const Eigen::VectorXd& x;
  const Eigen::VectorXd& u;
  const Eigen::VectorXd& correlations;
  double primal_value;
  double dual_value;
  int iteration;
};

using IterateCallback = std::function<CallbackSignal(const RelaxationIterate&)>;

/// Objective of the node relaxation at x:
///   0.5*||y - A*x||^2 + (lambda/M)*||x restricted to the free set||_1
///   + lambda*|fixed-nonzero set|.
/// Throws if x violates the node constraints beyond kFeasibilityTol.
double relaxed_primal(const Instance& inst, const Node& node,
                      const Eigen::VectorXd& x);

/// Fenchel dual objective of the node relaxation at u:
///   0.5*||y||^2 - 0.5*||y - u||^2
///   - sum over free i of at_zero pivot - sum over fixed-nonzero i of raw
///   pivot.
/// Weak duality: this never exceeds relaxed_primal at any feasible x.
double dual_objective(const Instance& inst, const Node& node,
                      const Eigen::VectorXd& u);

/// Same value computed from precomputed correlations A^T u; O(n).
double dual_objective_from_correlations(const Instance& inst, const Node& node,
                                        const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& correlations);

/// The dual candidate associated with a primal iterate: y - A*x.
Eigen::VectorXd dual_from_primal(const Instance& inst,
                                 const Eigen::VectorXd& x);

/// Closed form of the Fenchel conjugate of the node's penalty-plus-box term,
/// evaluated at v:
///   sum over free i of M*max(0, |v_i| - lambda/M)
///   + M * sum over fixed-nonzero i of |v_i|.
/// Entries on the zero set do not contribute.
double penalty_conjugate(const Eigen::VectorXd& v, const Node& node,
                         double lambda, double big_m);

/// Solves the node relaxation by coordinate descent over a working set of
/// columns, growing the set from the most violating correlations and
/// periodically solving the restricted problem on the current face directly.
/// The per-coordinate update is exact: zero set -> 0; free set ->
/// soft-threshold by lambda/M then clip to [-M, M]; fixed-nonzero set -> clip
/// only. Stops when the duality gap falls below gap_tolerance, when the
/// callback (invoked on a fixed sweep cadence set by screening_check_period)
/// returns kStop, or at max_iterations (reported through `converged`, not
/// fatal: dual_value is still a valid bound). A warm start is projected onto
/// the node's feasible set first.
RelaxationResult solve_relaxation(
    const Instance& inst, const Node& node,
    const std::optional<Eigen::VectorXd>& warm_start = std::nullopt,
    const RelaxationConfig& config = {}, const IterateCallback& callback = {});

}  // namespace l0bnb
