// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "l0bnb/instance.hpp"
#include "l0bnb/node.hpp"
#include "l0bnb/relaxation.hpp"

using namespace l0bnb;

namespace {

// One-column instance A = [1], y = [2], lambda = 1, M = 2. Grid search over
// x in [-2, 2] (step 1e-5) puts the relaxation optimum at x = 1.5 with value
// 0.875; the matching dual point u = y - A x = 0.5 attains the same value,
// which pins the sign convention of the dual objective.
Instance one_column() {
  Eigen::MatrixXd a(1, 1);
  a << 1.0;
  Eigen::VectorXd y(1);
  y << 2.0;
  return Instance(a, y, 1.0, 2.0);
}

Instance random_instance(std::mt19937_64& gen, int m, int n) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(m, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) a(i, j) = normal(gen);
  }
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) y[i] = normal(gen);
  return Instance(a, y, 0.5 + 0.1 * static_cast<double>(gen() % 8), 2.0);
}

Node random_node(std::mt19937_64& gen, int n) {
  Node node(n);
  for (int i = 0; i < n; ++i) {
    switch (gen() % 4) {
      case 0:
        node = child_zero(node, i);
        break;
      case 1:
        node = child_one(node, i);
        break;
      default:
        break;  // stays undecided half the time
    }
  }
  return node;
}

Eigen::VectorXd random_feasible(std::mt19937_64& gen, const Node& node,
                                double big_m) {
  std::uniform_real_distribution<double> unif(-big_m, big_m);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(node.size());
  for (int i = 0; i < node.size(); ++i) {
    if (node.status(i) != EntryStatus::kZero) x[i] = unif(gen);
  }
  return x;
}

}  // namespace

TEST_CASE("relaxed primal at zero is half the squared norm plus constants") {
  std::mt19937_64 gen(1);
  const Instance inst = random_instance(gen, 6, 5);
  const double base = 0.5 * inst.y().squaredNorm();
  CHECK(relaxed_primal(inst, Node(5), Eigen::VectorXd::Zero(5)) ==
        doctest::Approx(base).epsilon(1e-15));

  const Node two_fixed = child_one(child_one(Node(5), 0), 1);
  CHECK(relaxed_primal(inst, two_fixed, Eigen::VectorXd::Zero(5)) ==
        doctest::Approx(base + 2.0 * inst.lambda()).epsilon(1e-15));
}

TEST_CASE("relaxed primal hand value on the one-column instance") {
  const Instance inst = one_column();
  Eigen::VectorXd x(1);
  x << 1.5;
  CHECK(relaxed_primal(inst, Node(1), x) ==
        doctest::Approx(0.875).epsilon(1e-15));
}

TEST_CASE("relaxed primal applies the l1 weight only to undecided entries") {
  const Instance inst = one_column();
  Eigen::VectorXd x(1);
  x << 1.5;
  // Fixed nonzero: no l1 term, one lambda instead.
  CHECK(relaxed_primal(inst, child_one(Node(1), 0), x) ==
        doctest::Approx(0.5 * 0.25 + 1.0).epsilon(1e-14));
}

TEST_CASE("relaxed primal rejects node constraint violations") {
  const Instance inst = one_column();
  Eigen::VectorXd x(1);
  x << 0.5;
  CHECK_THROWS_AS(relaxed_primal(inst, child_zero(Node(1), 0), x),
                  std::invalid_argument);
  x << 2.5;
  CHECK_THROWS_AS(relaxed_primal(inst, Node(1), x), std::invalid_argument);
}

TEST_CASE("dual objective vanishes at u = 0 without fixed-nonzero entries") {
  std::mt19937_64 gen(2);
  const Instance inst = random_instance(gen, 5, 6);
  CHECK(dual_objective(inst, Node(6), Eigen::VectorXd::Zero(5)) == 0.0);
}

TEST_CASE("dual objective at u = 0 pays lambda per fixed-nonzero entry") {
  std::mt19937_64 gen(3);
  const Instance inst = random_instance(gen, 5, 6);
  const Node node = child_one(child_one(Node(6), 1), 4);
  CHECK(dual_objective(inst, node, Eigen::VectorXd::Zero(5)) ==
        doctest::Approx(2.0 * inst.lambda()).epsilon(1e-15));
}

TEST_CASE("dual objective matches the grid-verified strong duality value") {
  // At the primal optimum x = 1.5 the dual point is u = 0.5 and both
  // objectives equal 0.875 (1-D grid maximization of the dual over
  // u in [-5, 5] agrees with the grid-minimized primal).
  const Instance inst = one_column();
  Eigen::VectorXd u(1);
  u << 0.5;
  CHECK(dual_objective(inst, Node(1), u) ==
        doctest::Approx(0.875).epsilon(1e-14));
}

TEST_CASE("dual objective agrees with its correlation-fed variant") {
  std::mt19937_64 gen(4);
  for (int t = 0; t < 20; ++t) {
    const Instance inst = random_instance(gen, 6, 8);
    const Node node = random_node(gen, 8);
    std::normal_distribution<double> normal;
    Eigen::VectorXd u(6);
    for (int i = 0; i < 6; ++i) u[i] = normal(gen);
    Eigen::VectorXd correlations = inst.a().transpose() * u;
    for (int i = 0; i < 8; ++i) {
      if (node.status(i) == EntryStatus::kZero) correlations[i] = 0.0;
    }
    CHECK(dual_objective(inst, node, u) ==
          doctest::Approx(
              dual_objective_from_correlations(inst, node, u, correlations))
              .epsilon(1e-14));
  }
}

TEST_CASE("weak duality holds for random nodes, duals, and feasible points") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 50; ++t) {
    const Instance inst = random_instance(gen, 5, 7);
    const Node node = random_node(gen, 7);
    Eigen::VectorXd u(5);
    for (int i = 0; i < 5; ++i) u[i] = normal(gen);
    const double dual = dual_objective(inst, node, u);
    for (int r = 0; r < 4; ++r) {
      const Eigen::VectorXd x = random_feasible(gen, node, inst.big_m());
      CHECK(dual <= relaxed_primal(inst, node, x) + 1e-9);
    }
  }
}

TEST_CASE("dual link: child duals differ by exactly one pivot value") {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 25; ++t) {
    const Instance inst = random_instance(gen, 6, 9);
    const Node node = random_node(gen, 9);
    Eigen::VectorXd u(6);
    for (int i = 0; i < 6; ++i) u[i] = normal(gen);
    const double base = dual_objective(inst, node, u);
    for (int l = 0; l < 9; ++l) {
      if (node.status(l) != EntryStatus::kFree) continue;
      const PivotValues pv = pivot(inst, u, l);
      CHECK(dual_objective(inst, child_zero(node, l), u) ==
            doctest::Approx(base + pv.at_zero).epsilon(1e-13));
      CHECK(dual_objective(inst, child_one(node, l), u) ==
            doctest::Approx(base + pv.at_one).epsilon(1e-13));
      // Monotone bounds: a child dual never falls below its parent's.
      CHECK(dual_objective(inst, child_zero(node, l), u) >= base - 1e-12);
      CHECK(dual_objective(inst, child_one(node, l), u) >= base - 1e-12);
    }
  }
}

TEST_CASE("dual from primal is the residual") {
  const Instance inst = one_column();
  Eigen::VectorXd x(1);
  x << 1.5;
  CHECK(dual_from_primal(inst, x)[0] ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(dual_from_primal(inst, Eigen::VectorXd::Zero(1))[0] == 2.0);

  const Instance ident(Eigen::MatrixXd::Identity(3, 3),
                       Eigen::VectorXd::Ones(3), 1.0, 5.0);
  CHECK(dual_from_primal(ident, Eigen::VectorXd::Ones(3)).norm() == 0.0);
}

TEST_CASE("penalty conjugate closed form on hand-built nodes") {
  const double lambda = 1.0;
  const double big_m = 2.0;
  Eigen::VectorXd v(3);
  v << 0.3, -1.2, 0.9;
  // All undecided: sum of M * max(0, |v_i| - lambda / M).
  CHECK(penalty_conjugate(v, Node(3), lambda, big_m) ==
        doctest::Approx(2.0 * (0.7 + 0.4)).epsilon(1e-14));
  // Entry 0 fixed to zero drops out; entry 1 fixed nonzero pays M |v_1|.
  const Node node = child_one(child_zero(Node(3), 0), 1);
  CHECK(penalty_conjugate(v, node, lambda, big_m) ==
        doctest::Approx(2.0 * 1.2 + 2.0 * 0.4).epsilon(1e-14));
  CHECK(penalty_conjugate(Eigen::VectorXd::Zero(3), Node(3), lambda, big_m) ==
        0.0);
}

TEST_CASE("fully constrained relaxation returns the zero point immediately") {
  std::mt19937_64 gen(7);
  const Instance inst = random_instance(gen, 5, 4);
  Node node(4);
  for (int i = 0; i < 4; ++i) node = child_zero(node, i);
  const RelaxationResult res = solve_relaxation(inst, node);
  CHECK(res.converged);
  CHECK(res.x.norm() == 0.0);
  CHECK(res.primal_value ==
        doctest::Approx(0.5 * inst.y().squaredNorm()).epsilon(1e-15));
  CHECK(res.gap <= 1e-8);
  CHECK(res.iterations == 0);
}

TEST_CASE("one-column relaxation converges to the grid optimum") {
  const Instance inst = one_column();
  const RelaxationResult res = solve_relaxation(inst, Node(1));
  CHECK(res.converged);
  CHECK(res.x[0] == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(res.primal_value == doctest::Approx(0.875).epsilon(1e-9));
  CHECK(res.dual_value == doctest::Approx(0.875).epsilon(1e-7));
  CHECK(res.gap <= 1e-8);
  CHECK(res.u[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("one-column relaxation with the box active lands on the corner") {
  // Same data with M = 1: the l1 weight becomes 1 and the grid optimum over
  // [-1, 1] sits exactly on the box corner x = 1 with value 1.5.
  Eigen::MatrixXd a(1, 1);
  a << 1.0;
  Eigen::VectorXd y(1);
  y << 2.0;
  const Instance inst(a, y, 1.0, 1.0);
  const RelaxationResult res = solve_relaxation(inst, Node(1));
  CHECK(res.converged);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.primal_value == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("fixed-nonzero entries are fit without the l1 weight") {
  // Forcing the single column nonzero removes shrinkage: the best fit is
  // x = 2 (interior of the box [-2, 2]) at primal value lambda.
  const Instance inst = one_column();
  const RelaxationResult res = solve_relaxation(inst, child_one(Node(1), 0));
  CHECK(res.converged);
  CHECK(res.x[0] == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(res.primal_value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("converged results satisfy the residual identity and feasibility") {
  std::mt19937_64 gen(8);
  for (int t = 0; t < 20; ++t) {
    const Instance inst = random_instance(gen, 8, 10);
    const Node node = random_node(gen, 10);
    const RelaxationResult res = solve_relaxation(inst, node);
    REQUIRE(res.converged);
    CHECK(res.gap <= 1e-8);
    CHECK(res.gap >= -1e-9);
    CHECK((res.u - (inst.y() - inst.a() * res.x)).lpNorm<Eigen::Infinity>() <=
          1e-12);
    for (int i = 0; i < 10; ++i) {
      if (node.status(i) == EntryStatus::kZero) CHECK(res.x[i] == 0.0);
      CHECK(std::abs(res.x[i]) <= inst.big_m() + 1e-12);
    }
    // The certified values match an independent recomputation at (x, u).
    CHECK(res.primal_value ==
          doctest::Approx(relaxed_primal(inst, node, res.x)).epsilon(1e-10));
    CHECK(res.dual_value ==
          doctest::Approx(dual_objective(inst, node, res.u)).epsilon(1e-10));
  }
}

TEST_CASE("warm starts are projected onto the node's feasible set") {
  std::mt19937_64 gen(9);
  const Instance inst = random_instance(gen, 6, 5);
  const Node node = child_zero(Node(5), 2);
  Eigen::VectorXd warm(5);
  warm << 5.0, -5.0, 1.0, 0.3, -0.2;  // violates the box and the zero fix
  const RelaxationResult res = solve_relaxation(inst, node, warm);
  CHECK(res.converged);
  CHECK(res.x[2] == 0.0);
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(res.x[i]) <= inst.big_m() + 1e-12);
  }
}

TEST_CASE("callback cadence and stop request are honored") {
  std::mt19937_64 gen(10);
  const Instance inst = random_instance(gen, 12, 30);
  RelaxationConfig config;
  config.gap_tolerance = 1e-14;  // keep iterating so the callback fires
  config.screening_check_period = 5;
  std::vector<int> seen;
  const RelaxationResult res = solve_relaxation(
      inst, Node(30), std::nullopt, config, [&](const RelaxationIterate& it) {
        seen.push_back(it.iteration);
        CHECK(it.x.size() == 30);
        CHECK(it.u.size() == 12);
        CHECK(it.primal_value - it.dual_value >= -1e-9);
        return seen.size() >= 3 ? CallbackSignal::kStop
                                : CallbackSignal::kContinue;
      });
  REQUIRE(seen.size() == 3);
  CHECK(res.callback_stop);
  CHECK_FALSE(res.converged);
  CHECK(seen[0] == 1);  // first certification happens after one sweep
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (i > 0) CHECK(seen[i] % config.screening_check_period == 0);
  }
  // The reported dual is still a valid lower bound for the node optimum.
  const RelaxationResult full = solve_relaxation(inst, Node(30));
  REQUIRE(full.converged);
  CHECK(res.dual_value <= full.primal_value + 1e-9);
}

TEST_CASE("iteration cap reports failure but keeps a usable bound") {
  std::mt19937_64 gen(11);
  const Instance inst = random_instance(gen, 12, 30);
  RelaxationConfig config;
  config.gap_tolerance = 1e-14;
  config.max_iterations = 2;
  const RelaxationResult res = solve_relaxation(inst, Node(30), std::nullopt,
                                                config);
  CHECK_FALSE(res.converged);
  const RelaxationResult full = solve_relaxation(inst, Node(30));
  REQUIRE(full.converged);
  CHECK(res.dual_value <= full.primal_value + 1e-9);
  // Capped exits still recompute the residual exactly.
  CHECK((res.u - (inst.y() - inst.a() * res.x)).lpNorm<Eigen::Infinity>() <=
        1e-12);
}

TEST_CASE("relaxation config validation") {
  const Instance inst = one_column();
  RelaxationConfig config;
  config.gap_tolerance = 0.0;
  CHECK_THROWS_AS(solve_relaxation(inst, Node(1), std::nullopt, config),
                  std::invalid_argument);
  config = RelaxationConfig{};
  config.max_iterations = 0;
  CHECK_THROWS_AS(solve_relaxation(inst, Node(1), std::nullopt, config),
                  std::invalid_argument);
  config = RelaxationConfig{};
  config.screening_check_period = 0;
  CHECK_THROWS_AS(solve_relaxation(inst, Node(1), std::nullopt, config),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_relaxation(inst, Node(2)), std::invalid_argument);
}
