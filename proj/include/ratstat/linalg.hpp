#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

namespace ratstat {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Nonnegative integer count vector k = (k_1, ..., k_ell).
using CountVector = std::vector<int>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline bool is_nonnegative(const Matrix& m) { return (m.array() >= 0.0).all(); }

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline double min_symmetric_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace ratstat
