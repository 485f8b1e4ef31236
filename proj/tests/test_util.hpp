#pragma once

#include <random>
#include <string>

#include "phasetop/numkit.hpp"

namespace testutil {

inline phasetop::CMatrix random_matrix(int rows, int cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  phasetop::CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = {g(rng), g(rng)};
  }
  return m;
}

inline phasetop::CMatrix random_hermitian(int n, unsigned seed) {
  const phasetop::CMatrix a = random_matrix(n, n, seed);
  return (a + a.adjoint()) / 2.0;
}

inline phasetop::CMatrix random_unitary(int n, unsigned seed) {
  Eigen::HouseholderQR<phasetop::CMatrix> qr(random_matrix(n, n, seed));
  return qr.householderQ() * phasetop::CMatrix::Identity(n, n);
}

inline std::string config_path(const std::string& name) { return std::string(PHASETOP_CONFIG_DIR) + "/" + name; }

}  // namespace testutil
