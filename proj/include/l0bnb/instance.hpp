// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <memory>

namespace l0bnb {

// Entries with magnitude above this threshold count as nonzero in the
// support-size term of the objective.
inline constexpr double kSupportZeroTol = 1e-10;

// Slack allowed on the box and fixed-to-zero constraints before a vector is
// rejected as infeasible.
inline constexpr double kFeasibilityTol = 1e-9;

/// Problem data for the cardinality-penalized box-constrained least-squares
/// program
///
///   min_x  0.5*||y - A*x||^2 + lambda*nnz(x)   s.t.  ||x||_inf <= M.
///
/// The dictionary is stored column-major so that per-column inner products
/// a_i^T u are contiguous O(m) operations. Immutable after construction and
/// safe to share read-only across threads.
class Instance {
 public:
  Instance(Eigen::MatrixXd a, Eigen::VectorXd y, double lambda, double big_m);

  int rows() const { return static_cast<int>(a_.rows()); }
  int cols() const { return static_cast<int>(a_.cols()); }
  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::VectorXd& y() const { return y_; }
  double lambda() const { return lambda_; }
  double big_m() const { return big_m_; }

  /// Largest eigenvalue of A^T A, estimated by power iteration on first use
  /// and cached. Copies of an Instance share the cached value.
  double lipschitz() const;

  /// Squared Euclidean norm of each dictionary column, computed on first use
  /// and cached. Copies of an Instance share the cached vector.
  const Eigen::VectorXd& column_norms() const;

  /// The Gram matrix A^T A, computed on first use and cached, or nullptr
  /// when the column count makes the n-by-n cache unreasonable. Copies of an
  /// Instance share the cached matrix.
  const Eigen::MatrixXd* gram() const;

  /// The correlation vector A^T y, computed on first use and cached. Copies
  /// of an Instance share the cached vector.
  const Eigen::VectorXd& a_transpose_y() const;

 private:
  struct LipschitzCache;
  struct ColumnNormCache;
  struct GramCache;
  struct AtyCache;

  Eigen::MatrixXd a_;
  Eigen::VectorXd y_;
  double lambda_ = 0.0;
  double big_m_ = 0.0;
  std::shared_ptr<LipschitzCache> lipschitz_cache_;
  std::shared_ptr<ColumnNormCache> column_norm_cache_;
  std::shared_ptr<GramCache> gram_cache_;
  std::shared_ptr<AtyCache> aty_cache_;
};

/// The three per-column pivot values derived from the correlation a_i^T u:
///   raw     = M*(|a_i^T u| - lambda/M)
///   at_zero = M*max(0, |a_i^T u| - lambda/M)
///   at_one  = M*max(0, lambda/M - |a_i^T u|)
/// at_zero and at_one are nonnegative, never both positive, and satisfy
/// at_zero - at_one == raw exactly in floating point.
struct PivotValues {
  double raw = 0.0;
  double at_zero = 0.0;
  double at_one = 0.0;
};

/// Pivot values from an already-computed correlation a_i^T u.
PivotValues pivot_values(double correlation, double lambda, double big_m);

/// Pivot values for column i at dual point u; one O(m) inner product.
PivotValues pivot(const Instance& inst, const Eigen::VectorXd& u, int i);

/// 0.5*||y - A*x||^2 + lambda*(number of entries with |x_i| > threshold).
/// Throws if x violates the box constraint beyond kFeasibilityTol.
double full_objective(const Instance& inst, const Eigen::VectorXd& x);

}  // namespace l0bnb
