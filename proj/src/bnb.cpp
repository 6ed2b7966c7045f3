// SPDX-License-Identifier: Apache-2.0
#include "l0bnb/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "l0bnb/oracle.hpp"
#include "l0bnb/screening.hpp"

namespace l0bnb {

namespace {

// A bounding solve for a node that can only branch stops once its duality
// gap drops below this fraction of the distance between the certified dual
// and the incumbent. Nodes near the pruning line still get polished to the
// full bounding tolerance.
constexpr double kBranchGapFraction = 0.1;

}  // namespace

std::pair<Eigen::VectorXd, double> upper_bound_heuristic(
    const Instance& inst, const Node& node, const Eigen::VectorXd& x_relax,
    double support_threshold) {
  if (x_relax.size() != inst.cols() || node.size() != inst.cols()) {
    throw std::invalid_argument("heuristic inputs do not match the instance");
  }
  std::vector<int> support;
  for (int i = 0; i < node.size(); ++i) {
    switch (node.status(i)) {
      case EntryStatus::kOne:
        support.push_back(i);
        break;
      case EntryStatus::kFree:
        if (std::abs(x_relax[i]) > support_threshold) support.push_back(i);
        break;
      case EntryStatus::kZero:
        break;
    }
  }
  Eigen::VectorXd x = box_ls(inst, support, 1e-10);
  const double value = full_objective(inst, x);
  return {std::move(x), value};
}

BranchResult branch(const Node& node, const Eigen::VectorXd& x_relax) {
  if (x_relax.size() != node.size()) {
    throw std::invalid_argument("relaxation point does not match the node");
  }
  int index = -1;
  double best = -1.0;
  for (int i = 0; i < node.size(); ++i) {
    if (node.status(i) != EntryStatus::kFree) continue;
    const double magnitude = std::abs(x_relax[i]);
    if (magnitude > best) {
      best = magnitude;
      index = i;
    }
  }
  if (index < 0) throw std::logic_error("cannot branch on a leaf node");
  return BranchResult{index, child_zero(node, index), child_one(node, index)};
}

namespace {

struct WorkItem {
  Node node;
  double bound;
  Eigen::VectorXd warm;
  long id;
};

// Heap comparator for best-bound exploration: the item with the smallest
// bound (then the oldest id) surfaces first.
struct WorseFirst {
  bool operator()(const WorkItem& a, const WorkItem& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

// The box fit keeps every entry above the rounding threshold, so at loose
// penalties it returns wide supports whose penalty term swamps the fit.
// Walk the support weakest entry first, tracking the residual as entries
// drop out, then refit the best prefix. Any feasible point may update the
// global incumbent, so the node's fixed-one set is not protected here.
std::pair<Eigen::VectorXd, double> sparsify(const Instance& inst,
                                            Eigen::VectorXd x, double value) {
  std::vector<int> support;
  for (int i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > kSupportZeroTol) support.push_back(i);
  }
  const int q = static_cast<int>(support.size());
  if (q == 0) return {std::move(x), value};
  std::sort(support.begin(), support.end(), [&x](int a, int b) {
    const double ma = std::abs(x[a]);
    const double mb = std::abs(x[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });

  Eigen::VectorXd residual = inst.y();
  for (int i : support) residual -= x[i] * inst.a().col(i);
  int best_size = q;
  double best_score = value;
  for (int j = q - 1; j >= 0; --j) {
    residual += x[support[j]] * inst.a().col(support[j]);
    const double score = 0.5 * residual.squaredNorm() + inst.lambda() * j;
    if (score < best_score) {
      best_score = score;
      best_size = j;
    }
  }
  if (best_size < q) {
    std::vector<int> kept(support.begin(), support.begin() + best_size);
    std::sort(kept.begin(), kept.end());
    Eigen::VectorXd refit = box_ls(inst, kept, 1e-10);
    const double refit_value = full_objective(inst, refit);
    if (refit_value < value) {
      x = std::move(refit);
      value = refit_value;
    }
  }
  return {std::move(x), value};
}

class Tracer {
 public:
  explicit Tracer(std::ostream* out) : out_(out) {}

  void line(long id, const Node& node, double dual, double incumbent,
            const char* action, int fixed0, int fixed1, int branch_index) {
    if (out_ == nullptr) return;
    std::ostringstream os;
    os.precision(17);
    os << "node " << id << " s0 " << node.num_zero() << " s1 "
       << node.num_one() << " dual " << dual << " incumbent " << incumbent
       << " action " << action;
    if (fixed0 > 0 || fixed1 > 0) {
      os << " fix0 " << fixed0 << " fix1 " << fixed1;
    }
    if (branch_index >= 0) os << " l " << branch_index;
    os << '\n';
    *out_ << os.str();
  }

 private:
  std::ostream* out_;
};

}  // namespace

std::pair<Solution, SolveStats> solve(const Instance& inst,
                                      const SolverConfig& config) {
  if (!(config.time_limit_seconds > 0.0)) {
    throw std::invalid_argument("time limit must be positive");
  }
  if (!(config.gap_tolerance > 0.0)) {
    throw std::invalid_argument("gap tolerance must be positive");
  }
  const double support_threshold =
      config.support_threshold.value_or(1e-6 * inst.big_m());
  if (!(support_threshold > 0.0)) {
    throw std::invalid_argument("support threshold must be positive");
  }

  // Every dual iterate is a valid node bound whether or not the relaxation
  // has converged, so bounding solves stop at a gap far looser than the
  // relaxation's own default. The cost is only the occasional branch on a
  // node that tighter solving would have pruned; the pruning increments
  // between parent and child are orders of magnitude larger than this stop.
  RelaxationConfig bounding = config.relaxation;
  bounding.gap_tolerance = std::max(config.relaxation.gap_tolerance,
                                    std::min(1e-4, 100.0 * config.gap_tolerance));

  const int n = inst.cols();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };

  Solution incumbent;
  incumbent.x = Eigen::VectorXd::Zero(n);
  incumbent.objective = full_objective(inst, incumbent.x);

  SolveStats stats;
  Tracer tracer(config.trace);

  const bool depth_first = config.exploration == Exploration::kDepthFirst;
  std::vector<WorkItem> open;
  auto push = [&](WorkItem&& item) {
    open.push_back(std::move(item));
    if (!depth_first) std::push_heap(open.begin(), open.end(), WorseFirst{});
  };
  auto pop = [&] {
    if (!depth_first) std::pop_heap(open.begin(), open.end(), WorseFirst{});
    WorkItem item = std::move(open.back());
    open.pop_back();
    return item;
  };

  long next_id = 0;
  push(WorkItem{Node(n), -std::numeric_limits<double>::infinity(),
                Eigen::VectorXd(), next_id++});

  double prof_relax = 0.0, prof_heur = 0.0, prof_enqueue = 0.0;
  long prof_iters = 0, prof_resolves = 0, prof_heur_calls = 0;
  const bool profiling = std::getenv("L0BNB_PROFILE") != nullptr;

  // The box fit behind the upper-bound heuristic depends only on the support
  // set, so repeating it for the support seen at the previous node would
  // reproduce the same candidate.
  std::vector<int> heur_support_seen;
  Eigen::VectorXd heur_x_seen;
  double heur_value_seen = 0.0;
  bool heur_seen = false;

  bool out_of_time = false;
  while (!open.empty()) {
    if (elapsed() > config.time_limit_seconds) {
      out_of_time = true;
      break;
    }
    WorkItem item = pop();
    // The incumbent may have improved since this node was queued.
    if (item.bound >= incumbent.objective - config.gap_tolerance) {
      tracer.line(item.id, item.node, item.bound, incumbent.objective, "drop",
                  0, 0, -1);
      continue;
    }

    Node node = std::move(item.node);
    std::optional<Eigen::VectorXd> warm;
    if (item.warm.size() == n) warm = std::move(item.warm);
    ++stats.nodes_processed;

    // Bounding loop: solve the node relaxation while the periodic callback
    // watches for a prune. Screening certificates stay valid once passed, so
    // fixes found mid-solve are collected without interrupting the descent
    // and applied in one batch afterwards, when the reduced node's dual is
    // re-evaluated at the same dual point.
    RelaxationResult rel;
    bool pruned_by_bound = false;
    bool pruned_by_screen = false;
    int fixed0 = 0;
    int fixed1 = 0;
    ScreeningResult pending;
    std::vector<char> claimed(static_cast<std::size_t>(n), 0);
    // Opposite-direction certificates for one index mean both children of
    // that branch are dead, which kills the whole node.
    auto merge = [&](const ScreeningResult& scr) {
      for (int i : scr.fix_to_zero) {
        if (claimed[i] == 0) {
          claimed[i] = 1;
          pending.fix_to_zero.push_back(i);
        } else if (claimed[i] == 2) {
          pruned_by_screen = true;
        }
      }
      for (int i : scr.fix_to_one) {
        if (claimed[i] == 0) {
          claimed[i] = 2;
          pending.fix_to_one.push_back(i);
        } else if (claimed[i] == 1) {
          pruned_by_screen = true;
        }
      }
    };
    auto on_iterate = [&](const RelaxationIterate& it) {
      if (elapsed() > config.time_limit_seconds) {
        out_of_time = true;
        return CallbackSignal::kStop;
      }
      if (it.dual_value >= incumbent.objective - config.gap_tolerance) {
        pruned_by_bound = true;
        return CallbackSignal::kStop;
      }
      if (config.screening_enabled) {
        ScreeningResult scr = node_screen_with_correlations(
            inst, node, it.u, it.correlations, incumbent.objective);
        if (scr.prune_node) {
          pruned_by_screen = true;
          return CallbackSignal::kStop;
        }
        merge(scr);
        if (pruned_by_screen) return CallbackSignal::kStop;
      }
      // Once the primal value sits below the pruning line the node is going
      // to branch no matter how far the gap closes, so polishing pays off
      // only while the dual is still within striking distance of the
      // incumbent. The certified dual in hand stays a valid bound.
      if (kBranchGapFraction > 0.0 &&
          it.primal_value < incumbent.objective - config.gap_tolerance &&
          it.primal_value - it.dual_value <=
              kBranchGapFraction * (incumbent.objective - it.dual_value)) {
        return CallbackSignal::kStop;
      }
      return CallbackSignal::kContinue;
    };
    const double t0 = profiling ? elapsed() : 0.0;
    rel = solve_relaxation(inst, node, warm, bounding, on_iterate);
    if (profiling) {
      prof_relax += elapsed() - t0;
      prof_iters += rel.iterations;
      ++prof_resolves;
    }
    if (out_of_time) break;

    if (!pruned_by_bound && !pruned_by_screen && config.screening_enabled) {
      // Converged exits skip the callback, and the converged dual is the
      // strongest point to screen at.
      ScreeningResult last = node_screen_with_correlations(
          inst, node, rel.u, rel.correlations, incumbent.objective);
      if (last.prune_node) {
        pruned_by_screen = true;
      } else {
        merge(last);
      }
    }

    if (pruned_by_screen) {
      ++stats.nodes_screened_out;
      tracer.line(item.id, node, rel.dual_value, incumbent.objective,
                  "screen-prune", fixed0, fixed1, -1);
      continue;
    }
    if (pruned_by_bound) {
      tracer.line(item.id, node, rel.dual_value, incumbent.objective, "prune",
                  fixed0, fixed1, -1);
      continue;
    }

    if (!pending.empty()) {
      // Passed tests discard one child apiece, so the reduced node's dual at
      // the same point climbs by the matching pivots. Re-evaluating the dual
      // formula on the reduced node prices that in without another solve;
      // the relaxation candidate x stays as branching and rounding guidance.
      fixed0 = static_cast<int>(pending.fix_to_zero.size());
      fixed1 = static_cast<int>(pending.fix_to_one.size());
      node = apply_screening(node, pending);
      stats.variables_fixed_by_screening += fixed0 + fixed1;
      stats.nodes_screened_out += fixed0 + fixed1;
      rel.dual_value =
          dual_objective_from_correlations(inst, node, rel.u, rel.correlations);
      if (rel.dual_value >= incumbent.objective - config.gap_tolerance) {
        tracer.line(item.id, node, rel.dual_value, incumbent.objective,
                    "prune", fixed0, fixed1, -1);
        continue;
      }
    }

    const double th0 = profiling ? elapsed() : 0.0;
    std::vector<int> heur_support;
    for (int i = 0; i < n; ++i) {
      const EntryStatus st = node.status(i);
      if (st == EntryStatus::kOne ||
          (st == EntryStatus::kFree &&
           std::abs(rel.x[i]) > support_threshold)) {
        heur_support.push_back(i);
      }
    }
    if (!heur_seen || heur_support != heur_support_seen) {
      auto heur = upper_bound_heuristic(inst, node, rel.x, support_threshold);
      heur = sparsify(inst, std::move(heur.first), heur.second);
      heur_support_seen = std::move(heur_support);
      heur_x_seen = std::move(heur.first);
      heur_value_seen = heur.second;
      heur_seen = true;
      ++prof_heur_calls;
    }
    if (profiling) prof_heur += elapsed() - th0;
    if (heur_value_seen < incumbent.objective) {
      incumbent.objective = heur_value_seen;
      incumbent.x = heur_x_seen;
    }

    if (rel.dual_value >= incumbent.objective - config.gap_tolerance) {
      tracer.line(item.id, node, rel.dual_value, incumbent.objective, "prune",
                  fixed0, fixed1, -1);
      continue;
    }
    if (node.is_leaf()) {
      // Every index is decided; the heuristic above already evaluated the
      // node exactly, so there is nothing to branch on.
      tracer.line(item.id, node, rel.dual_value, incumbent.objective, "leaf",
                  fixed0, fixed1, -1);
      continue;
    }

    BranchResult split = branch(node, rel.x);
    tracer.line(item.id, node, rel.dual_value, incumbent.objective, "branch",
                fixed0, fixed1, split.index);
    const PivotValues pv = pivot_values(rel.correlations[split.index],
                                        inst.lambda(), inst.big_m());

    // Children carry the parent bound shifted by the matching pivot value,
    // and are screened against the parent's dual point before insertion.
    auto enqueue = [&](Node child, double bound) {
      if (config.screening_enabled) {
        const ScreeningResult scr = node_screen_with_correlations(
            inst, child, rel.u, rel.correlations, incumbent.objective);
        if (scr.prune_node) {
          ++stats.nodes_screened_out;
          tracer.line(next_id++, child, bound, incumbent.objective,
                      "screen-prune", 0, 0, -1);
          return;
        }
        if (!scr.empty()) {
          const int c0 = static_cast<int>(scr.fix_to_zero.size());
          const int c1 = static_cast<int>(scr.fix_to_one.size());
          child = apply_screening(child, scr);
          stats.variables_fixed_by_screening += c0 + c1;
          stats.nodes_screened_out += c0 + c1;
          bound = dual_objective_from_correlations(inst, child, rel.u,
                                                   rel.correlations);
        }
      }
      if (bound >= incumbent.objective - config.gap_tolerance) {
        tracer.line(next_id++, child, bound, incumbent.objective, "drop", 0, 0,
                    -1);
        return;
      }
      Eigen::VectorXd child_warm = rel.x;
      for (int i = 0; i < n; ++i) {
        if (child.status(i) == EntryStatus::kZero) child_warm[i] = 0.0;
      }
      push(WorkItem{std::move(child), bound, std::move(child_warm), next_id++});
    };

    // Depth-first pops in reverse insertion order, so pushing the zero child
    // first explores the nonzero branch first.
    const double te0 = profiling ? elapsed() : 0.0;
    enqueue(std::move(split.child0), rel.dual_value + pv.at_zero);
    enqueue(std::move(split.child1), rel.dual_value + pv.at_one);
    if (profiling) prof_enqueue += elapsed() - te0;
  }

  if (profiling) {
    std::ostringstream os;
    os << "profile nodes " << stats.nodes_processed << " relax_s " << prof_relax
       << " heur_s " << prof_heur << " enqueue_s " << prof_enqueue
       << " fista_iters " << prof_iters << " resolves " << prof_resolves
       << " heur_calls " << prof_heur_calls << " total_s " << elapsed() << '\n';
    std::cerr << os.str();
  }

  stats.timed_out = out_of_time;
  stats.wall_time_seconds = elapsed();
  incumbent.optimal = !stats.timed_out;
  return {std::move(incumbent), stats};
}

}  // namespace l0bnb
