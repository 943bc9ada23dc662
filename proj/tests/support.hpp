#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "wnh/linalg.hpp"

namespace testing {

using wnh::Complex;
using wnh::DenseMatrix;

inline DenseMatrix random_dense(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  return m;
}

inline wnh::HermitianMatrix random_hermitian(int n, std::mt19937_64& rng) {
  return wnh::HermitianMatrix::symmetrized(random_dense(n, rng) / std::sqrt(2.0 * n));
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Sample mean and standard error.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
  double s = 0.0, s2 = 0.0;
  for (double x : v) s += x;
  const double n = static_cast<double>(v.size());
  const double mean = s / n;
  for (double x : v) s2 += (x - mean) * (x - mean);
  return {mean, std::sqrt(s2 / (n - 1.0) / n)};
}

}  // namespace testing
