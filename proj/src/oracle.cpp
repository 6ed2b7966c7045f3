// SPDX-License-Identifier: Apache-2.0
#include "l0bnb/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "l0bnb/linalg.hpp"

namespace l0bnb {

namespace {

constexpr int kMaxProjectedGradientIterations = 100000;

}  // namespace

Eigen::VectorXd box_ls(const Instance& inst, const std::vector<int>& support,
                       double ls_tolerance) {
  if (!(ls_tolerance > 0.0)) {
    throw std::invalid_argument("ls tolerance must be positive");
  }
  const int n = inst.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (support.empty()) return x;

  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int i : support) {
    if (i < 0 || i >= n) throw std::invalid_argument("support index out of range");
    if (seen[static_cast<std::size_t>(i)]) {
      throw std::invalid_argument("duplicate support index");
    }
    seen[static_cast<std::size_t>(i)] = 1;
  }

  const int s = static_cast<int>(support.size());
  Eigen::MatrixXd a_t(inst.rows(), s);
  for (int j = 0; j < s; ++j) a_t.col(j) = inst.a().col(support[j]);
  const double big_m = inst.big_m();

  // Clipped unconstrained solution as the start; when the box is inactive
  // the projected gradient polish below terminates immediately.
  Eigen::VectorXd xt = a_t.colPivHouseholderQr().solve(inst.y());
  bool clipped = false;
  for (int j = 0; j < s; ++j) {
    const double c = std::clamp(xt[j], -big_m, big_m);
    if (c != xt[j]) clipped = true;
    xt[j] = c;
  }

  // With no coordinate at the bound the projection map reduces to a plain
  // gradient step, so the stationarity test below is the projected-gradient
  // stopping criterion evaluated without needing a step size.
  bool stationary = false;
  if (!clipped) {
    const Eigen::VectorXd grad = a_t.transpose() * (a_t * xt - inst.y());
    stationary = grad.lpNorm<Eigen::Infinity>() <= ls_tolerance;
  }
  if (!stationary) {
    const double lipschitz = gram_largest_eigenvalue(a_t);
    if (lipschitz > 0.0) {
      const double step = 1.0 / (1.01 * lipschitz);
      for (int it = 0; it < kMaxProjectedGradientIterations; ++it) {
        const Eigen::VectorXd grad = a_t.transpose() * (a_t * xt - inst.y());
        Eigen::VectorXd next(s);
        for (int j = 0; j < s; ++j) {
          next[j] = std::clamp(xt[j] - step * grad[j], -big_m, big_m);
        }
        const double map_norm =
            ((xt - next) / step).lpNorm<Eigen::Infinity>();
        xt = next;
        if (map_norm <= ls_tolerance) break;
      }
    }
  }

  for (int j = 0; j < s; ++j) x[support[j]] = xt[j];
  return x;
}

OracleSolution exhaustive_solve(const Instance& inst,
                                const OracleConfig& config) {
  const int n = inst.cols();
  if (n > 20) {
    throw std::invalid_argument("exhaustive enumeration is limited to 20 columns");
  }
  if (!(config.ls_tolerance > 0.0)) {
    throw std::invalid_argument("ls tolerance must be positive");
  }
  int max_size = config.max_support_size;
  if (max_size < 0 || max_size > n) max_size = n;

  OracleSolution best;
  best.x = Eigen::VectorXd::Zero(n);
  best.objective = full_objective(inst, best.x);

  std::vector<int> combo;
  for (int s = 1; s <= max_size; ++s) {
    combo.resize(static_cast<std::size_t>(s));
    std::iota(combo.begin(), combo.end(), 0);
    for (;;) {
      const Eigen::VectorXd x = box_ls(inst, combo, config.ls_tolerance);
      const double objective = full_objective(inst, x);
      if (objective < best.objective) {
        best.x = x;
        best.objective = objective;
      }
      int pos = s - 1;
      while (pos >= 0 && combo[static_cast<std::size_t>(pos)] == n - s + pos) {
        --pos;
      }
      if (pos < 0) break;
      ++combo[static_cast<std::size_t>(pos)];
      for (int t = pos + 1; t < s; ++t) {
        combo[static_cast<std::size_t>(t)] = combo[static_cast<std::size_t>(t - 1)] + 1;
      }
    }
  }
  return best;
}

}  // namespace l0bnb
