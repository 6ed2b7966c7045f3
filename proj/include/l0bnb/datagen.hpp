// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

#include "l0bnb/instance.hpp"

namespace l0bnb {

enum class Setup { kGaussian, kToeplitz };

std::string to_string(Setup setup);
Setup setup_from_string(const std::string& name);

// Sampling algorithm recorded in instance metadata. The generator draws all
// randomness from one mt19937_64 stream: uniforms as (next() >> 11) * 2^-53,
// normals by Box-Muller (cosine branch, two draws each), bounded integers by
// rejection. Identical seeds give identical instances.
inline constexpr const char* kRngName = "mt19937_64/boxmuller-v1";

struct GenSpec {
  Setup setup = Setup::kGaussian;
  int m = 0;
  int n = 0;
  int k = 0;  // planted support size
  std::uint64_t seed = 0;
  double sinc_width = 0.0;  // Toeplitz only; 0 selects the default m/50
};

struct GeneratedInstance {
  Instance instance;
  Eigen::VectorXd x_true;  // planted k-sparse vector
  double sigma = 0.0;      // noise standard deviation
  std::uint64_t seed = 0;
  Setup setup = Setup::kGaussian;
  double sinc_width = 0.0;  // width actually used; 0 for the Gaussian setup
};

/// First column of the Toeplitz dictionary before normalization:
/// c[j] = sinc((j - m/2) / width) with sinc(t) = sin(pi t)/(pi t).
Eigen::VectorXd sampled_sinc_column(int m, double width);

/// lambda = 2*sigma^2 * log(n/k - 1); requires n/k - 1 > 1.
double calibrated_lambda(double sigma, int n, int k);

/// M = 1.5 * ||A^T y||_inf.
double calibrated_big_m(const Eigen::MatrixXd& a, const Eigen::VectorXd& y);

/// Deterministic function of the spec. Draw order: dictionary entries
/// (column by column; the Toeplitz dictionary draws nothing), then support,
/// signs, amplitudes, noise. Columns are normalized to unit length; the
/// planted entries are sign*(1 + |standard normal|); y = A*x_true + noise
/// with noise std sigma = ||A*x_true|| / sqrt(10 m). Throws when the spec is
/// invalid or the lambda calibration is undefined (needs n/k - 1 > 1).
GeneratedInstance generate(const GenSpec& spec);

}  // namespace l0bnb
