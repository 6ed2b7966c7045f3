// SPDX-License-Identifier: Apache-2.0
#include "l0bnb/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace l0bnb {

namespace {

// Sampler with a pinned algorithm (see kRngName): every mapping from raw
// mt19937_64 words to doubles is spelled out here, never delegated to the
// standard library's unspecified distribution implementations. Instances are
// therefore reproducible from (name, seed) alone.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}

  // Box-Muller, cosine branch; two words per call. The first uniform is
  // shifted away from zero so the log stays finite.
  double normal() {
    const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1p-53;
    const double u2 = static_cast<double>(gen_() >> 11) * 0x1p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double sign() { return (gen_() >> 63) != 0 ? -1.0 : 1.0; }

  // Uniform on {0, ..., range-1} by rejection, so every value is exactly
  // equally likely.
  std::uint64_t below(std::uint64_t range) {
    const std::uint64_t threshold = (0 - range) % range;
    for (;;) {
      const std::uint64_t word = gen_();
      if (word >= threshold) return word % range;
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace

std::string to_string(Setup setup) {
  return setup == Setup::kGaussian ? "gaussian" : "toeplitz";
}

Setup setup_from_string(const std::string& name) {
  if (name == "gaussian") return Setup::kGaussian;
  if (name == "toeplitz") return Setup::kToeplitz;
  throw std::invalid_argument("unknown setup '" + name + "'");
}

Eigen::VectorXd sampled_sinc_column(int m, double width) {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  if (!(width > 0.0)) throw std::invalid_argument("sinc width must be positive");
  Eigen::VectorXd column(m);
  for (int j = 0; j < m; ++j) {
    const double t = (j - m / 2.0) / width;
    column[j] = t == 0.0
                    ? 1.0
                    : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
  }
  return column;
}

double calibrated_lambda(double sigma, int n, int k) {
  if (n < 1 || k < 1) throw std::invalid_argument("n and k must be at least 1");
  const double ratio = static_cast<double>(n) / static_cast<double>(k) - 1.0;
  if (!(ratio > 1.0)) {
    throw std::invalid_argument(
        "penalty calibration needs n/k - 1 > 1 (log must be positive)");
  }
  return 2.0 * sigma * sigma * std::log(ratio);
}

double calibrated_big_m(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  if (y.size() != a.rows()) {
    throw std::invalid_argument("observation length does not match rows");
  }
  return 1.5 * (a.transpose() * y).cwiseAbs().maxCoeff();
}

GeneratedInstance generate(const GenSpec& spec) {
  if (spec.m < 1 || spec.n < 1) {
    throw std::invalid_argument("m and n must be at least 1");
  }
  if (spec.k < 1 || spec.k > spec.n) {
    throw std::invalid_argument("k must satisfy 1 <= k <= n");
  }
  if (!(static_cast<double>(spec.n) / spec.k - 1.0 > 1.0)) {
    throw std::invalid_argument(
        "penalty calibration needs n/k - 1 > 1; pick a smaller k");
  }
  double width = 0.0;
  if (spec.setup == Setup::kToeplitz) {
    if (spec.n > spec.m) {
      throw std::invalid_argument(
          "toeplitz columns are shifts of one length-m column; needs n <= m");
    }
    width = spec.sinc_width > 0.0 ? spec.sinc_width : spec.m / 50.0;
  }

  // Fixed draw order: dictionary, support, signs, amplitudes, noise. Any
  // change here breaks seed reproducibility and must bump kRngName.
  Sampler rng(spec.seed);

  Eigen::MatrixXd a(spec.m, spec.n);
  if (spec.setup == Setup::kGaussian) {
    for (int j = 0; j < spec.n; ++j) {
      for (int i = 0; i < spec.m; ++i) a(i, j) = rng.normal();
    }
  } else {
    const Eigen::VectorXd column = sampled_sinc_column(spec.m, width);
    for (int j = 0; j < spec.n; ++j) {
      for (int i = 0; i < spec.m; ++i) {
        a(i, j) = column[((i - j) % spec.m + spec.m) % spec.m];
      }
    }
  }
  for (int j = 0; j < spec.n; ++j) {
    const double norm = a.col(j).norm();
    if (norm == 0.0) throw std::runtime_error("dictionary column is zero");
    a.col(j) /= norm;
  }

  // Planted support: partial Fisher-Yates, then sorted for stable output.
  std::vector<int> pool(static_cast<std::size_t>(spec.n));
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> support(static_cast<std::size_t>(spec.k));
  for (int t = 0; t < spec.k; ++t) {
    const int r =
        t + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.n - t)));
    std::swap(pool[static_cast<std::size_t>(t)], pool[static_cast<std::size_t>(r)]);
    support[static_cast<std::size_t>(t)] = pool[static_cast<std::size_t>(t)];
  }
  std::sort(support.begin(), support.end());

  std::vector<double> signs(static_cast<std::size_t>(spec.k));
  for (int t = 0; t < spec.k; ++t) signs[static_cast<std::size_t>(t)] = rng.sign();

  Eigen::VectorXd x_true = Eigen::VectorXd::Zero(spec.n);
  for (int t = 0; t < spec.k; ++t) {
    x_true[support[static_cast<std::size_t>(t)]] =
        signs[static_cast<std::size_t>(t)] * (1.0 + std::abs(rng.normal()));
  }

  const Eigen::VectorXd clean = a * x_true;
  const double sigma = clean.norm() / std::sqrt(10.0 * spec.m);
  Eigen::VectorXd y = clean;
  for (int i = 0; i < spec.m; ++i) y[i] += sigma * rng.normal();

  const double lambda = calibrated_lambda(sigma, spec.n, spec.k);
  const double big_m = calibrated_big_m(a, y);

  return GeneratedInstance{
      Instance(std::move(a), std::move(y), lambda, big_m),
      std::move(x_true),
      sigma,
      spec.seed,
      spec.setup,
      width};
}

}  // namespace l0bnb
