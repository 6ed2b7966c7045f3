// SPDX-License-Identifier: Apache-2.0
#include "l0bnb/instance.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "l0bnb/linalg.hpp"

namespace l0bnb {

struct Instance::LipschitzCache {
  std::once_flag once;
  double value = 0.0;
};

struct Instance::ColumnNormCache {
  std::once_flag once;
  Eigen::VectorXd value;
};

struct Instance::GramCache {
  std::once_flag once;
  Eigen::MatrixXd value;
};

struct Instance::AtyCache {
  std::once_flag once;
  Eigen::VectorXd value;
};

namespace {

// Caching the n-by-n Gram above this column count would cost more memory
// than the solver saves.
constexpr int kMaxGramCacheCols = 2048;

}  // namespace

Instance::Instance(Eigen::MatrixXd a, Eigen::VectorXd y, double lambda,
                   double big_m)
    : a_(std::move(a)),
      y_(std::move(y)),
      lambda_(lambda),
      big_m_(big_m),
      lipschitz_cache_(std::make_shared<LipschitzCache>()),
      column_norm_cache_(std::make_shared<ColumnNormCache>()),
      gram_cache_(std::make_shared<GramCache>()),
      aty_cache_(std::make_shared<AtyCache>()) {
  if (a_.rows() < 1 || a_.cols() < 1) {
    throw std::invalid_argument("dictionary must have at least one row and one column");
  }
  if (y_.size() != a_.rows()) {
    throw std::invalid_argument("observation length does not match dictionary rows");
  }
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) {
    throw std::invalid_argument("lambda must be positive and finite");
  }
  if (!(big_m_ > 0.0) || !std::isfinite(big_m_)) {
    throw std::invalid_argument("box radius must be positive and finite");
  }
}

double Instance::lipschitz() const {
  std::call_once(lipschitz_cache_->once, [this] {
    lipschitz_cache_->value = gram_largest_eigenvalue(a_);
  });
  return lipschitz_cache_->value;
}

const Eigen::VectorXd& Instance::column_norms() const {
  std::call_once(column_norm_cache_->once, [this] {
    column_norm_cache_->value = a_.colwise().squaredNorm().transpose();
  });
  return column_norm_cache_->value;
}

const Eigen::MatrixXd* Instance::gram() const {
  if (cols() > kMaxGramCacheCols) return nullptr;
  std::call_once(gram_cache_->once, [this] {
    gram_cache_->value.resize(a_.cols(), a_.cols());
    gram_cache_->value.noalias() = a_.transpose() * a_;
  });
  return &gram_cache_->value;
}

const Eigen::VectorXd& Instance::a_transpose_y() const {
  std::call_once(aty_cache_->once, [this] {
    aty_cache_->value = a_.transpose() * y_;
  });
  return aty_cache_->value;
}

PivotValues pivot_values(double correlation, double lambda, double big_m) {
  // Deriving all three from one product keeps the documented identities
  // exact: at_zero - at_one == raw and at_zero * at_one == 0, bit for bit.
  const double raw = big_m * (std::abs(correlation) - lambda / big_m);
  return PivotValues{raw, std::max(0.0, raw), std::max(0.0, -raw)};
}

PivotValues pivot(const Instance& inst, const Eigen::VectorXd& u, int i) {
  if (i < 0 || i >= inst.cols()) {
    throw std::out_of_range("column index out of range");
  }
  if (u.size() != inst.rows()) {
    throw std::invalid_argument("dual vector length does not match rows");
  }
  return pivot_values(inst.a().col(i).dot(u), inst.lambda(), inst.big_m());
}

double full_objective(const Instance& inst, const Eigen::VectorXd& x) {
  if (x.size() != inst.cols()) {
    throw std::invalid_argument("x length does not match dictionary columns");
  }
  if (x.size() > 0 &&
      x.cwiseAbs().maxCoeff() > inst.big_m() + kFeasibilityTol) {
    throw std::invalid_argument("x violates the box constraint");
  }
  long support = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > kSupportZeroTol) ++support;
  }
  const double residual = (inst.y() - inst.a() * x).squaredNorm();
  return 0.5 * residual + inst.lambda() * static_cast<double>(support);
}

}  // namespace l0bnb
