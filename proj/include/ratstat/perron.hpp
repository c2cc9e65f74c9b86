#pragma once

// Perron-Frobenius eigentriple of a primitive nonnegative matrix.
//
// The iteration is a shifted power method that supplies a strictly positive
// starting vector, followed by shifted inverse iteration whose shift is the
// Collatz-Wielandt upper bound max_i (Mu)_i / u_i (Noda iteration). The
// Collatz-Wielandt ratios bracket the eigenvalue from both sides and are sums
// of nonnegative terms, so the bracket width is an accurate componentwise
// residual even when the entries of M span many orders of magnitude.

#include "ratstat/error.hpp"
#include "ratstat/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

namespace ratstat {

struct PerronOptions {
  std::size_t max_iters = 100000;
  /// Power iterations before switching to the shifted inverse refinement.
  std::size_t power_iters = 100;
  std::size_t refine_iters = 100;
  /// Diagonal shift for the power phase, as a multiple of the max entry.
  double shift_factor = 1e-3;
  double residual_tol = 1e-10;
};

struct PerronTriple {
  double value = 0.0;
  Vector right;  // u, scaled so that max_i u_i = 1
  Vector left;   // v, scaled so that v'u = 1
  /// max over both eigenvectors of max_i |(Mu)_i / u_i - y| / y.
  double residual = 0.0;
  std::size_t iterations = 0;
};

namespace detail {

/// Osborne balancing with power-of-two factors. Returns d such that the
/// updated `m` equals diag(d)^{-1} M diag(d). Exact in floating point.
inline Vector balance_in_place(Matrix& m) {
  const Eigen::Index n = m.rows();
  Vector d = Vector::Ones(n);
  for (int sweep = 0; sweep < 200; ++sweep) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double col = m.col(i).sum() - m(i, i);
      const double row = m.row(i).sum() - m(i, i);
      if (col <= 0.0 || row <= 0.0) continue;
      const double f = std::exp2(std::round(0.5 * std::log2(row / col)));
      if (f != 1.0 && col * f + row / f < 0.95 * (col + row)) {
        m.row(i) /= f;
        m.col(i) *= f;
        d(i) *= f;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return d;
}

/// Collatz-Wielandt bracket: lo <= y <= hi for any strictly positive x.
struct Bracket {
  double lo;
  double hi;
};

inline Bracket collatz_wielandt(const Matrix& m, const Vector& x) {
  const Vector w = m * x;
  Bracket b{kInf, 0.0};
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double r = w(i) / x(i);
    b.lo = std::min(b.lo, r);
    b.hi = std::max(b.hi, r);
  }
  return b;
}

struct OneSided {
  Vector vec;
  Bracket bracket;
  std::size_t iterations = 0;
};

inline bool strictly_positive(const Vector& x) {
  return x.allFinite() && (x.array() > 0.0).all();
}

inline double relative_spread(const Bracket& b) {
  return b.hi > 0.0 ? (b.hi - b.lo) / b.hi : kInf;
}

inline OneSided right_perron(const Matrix& m, const PerronOptions& opt) {
  const Eigen::Index n = m.rows();
  const double delta = opt.shift_factor * m.maxCoeff();
  OneSided out;
  Vector u = Vector::Ones(n);
  std::size_t it = 0;

  auto power_step = [&]() {
    Vector w = m * u + delta * u;
    u = w / w.maxCoeff();
    ++it;
  };

  double prev_rq = 0.0;
  for (; it < std::min(opt.power_iters, opt.max_iters);) {
    power_step();
    const double rq = u.dot(m * u) / u.squaredNorm();
    const bool settled = std::abs(rq - prev_rq) < 1e-14 * rq;
    prev_rq = rq;
    if (settled && strictly_positive(u) &&
        relative_spread(collatz_wielandt(m, u)) < opt.residual_tol)
      break;
  }

  // Shifted inverse refinement. For sigma above the Perron root the matrix
  // (sigma I - M)^{-1} is entrywise positive, so iterates stay positive.
  if (strictly_positive(u)) {
    const Matrix id = Matrix::Identity(n, n);
    for (std::size_t r = 0; r < opt.refine_iters; ++r) {
      const Bracket b = collatz_wielandt(m, u);
      if (b.hi - b.lo <= 4.0 * std::numeric_limits<double>::epsilon() * b.hi) break;
      const Vector z = (b.hi * id - m).partialPivLu().solve(u);
      if (!strictly_positive(z)) break;
      const Vector next = z / z.maxCoeff();
      const Bracket bn = collatz_wielandt(m, next);
      // The upper bound is monotone in exact arithmetic; stop once rounding
      // makes neither it nor the bracket width improve.
      if (!(bn.hi < b.hi) && !(relative_spread(bn) < relative_spread(b))) break;
      u = next;
      ++it;
    }
  }

  // Fallback: keep power-iterating until the budget is exhausted.
  while (it < opt.max_iters &&
         !(strictly_positive(u) && relative_spread(collatz_wielandt(m, u)) < opt.residual_tol)) {
    power_step();
  }

  out.vec = u;
  out.bracket = collatz_wielandt(m, u);
  out.iterations = it;
  return out;
}

}  // namespace detail

/// Dominant eigenvalue and positive eigenvectors of a primitive matrix.
/// Throws NoConvergence if the residual cannot be brought under
/// `opt.residual_tol` within `opt.max_iters` iterations.
inline PerronTriple perron_triple(const Matrix& matrix, const PerronOptions& opt = {}) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, "perron_triple: matrix must be square and nonempty");
  if (!all_finite(matrix)) throw Error(ErrorCode::Overflow, "perron_triple: non-finite matrix entry");
  if (!is_nonnegative(matrix))
    throw Error(ErrorCode::NegativeWeight, "perron_triple: matrix has a negative entry");

  const Eigen::Index n = matrix.rows();
  PerronTriple out;
  if (n == 1) {
    if (!(matrix(0, 0) > 0.0))
      throw Error(ErrorCode::NoConvergence, "perron_triple: 1x1 matrix is zero");
    out.value = matrix(0, 0);
    out.right = Vector::Ones(1);
    out.left = Vector::Ones(1);
    return out;
  }

  Matrix balanced = matrix;
  const Vector d = detail::balance_in_place(balanced);

  const detail::OneSided r = detail::right_perron(balanced, opt);
  const Matrix balanced_t = balanced.transpose();
  const detail::OneSided l = detail::right_perron(balanced_t, opt);
  out.iterations = r.iterations + l.iterations;

  if (!detail::strictly_positive(r.vec) || !detail::strictly_positive(l.vec))
    throw Error(ErrorCode::NoConvergence,
                "perron_triple: eigenvector lost strict positivity (matrix near-reducible?)");

  // Generalized Rayleigh quotient: every term is nonnegative.
  const double y = l.vec.dot(balanced * r.vec) / l.vec.dot(r.vec);
  auto side_residual = [y](const detail::Bracket& b) {
    return std::max(std::abs(b.hi - y), std::abs(y - b.lo)) / y;
  };
  out.value = y;
  out.residual = std::max(side_residual(r.bracket), side_residual(l.bracket));
  if (!(out.residual <= opt.residual_tol))
    throw Error(ErrorCode::NoConvergence,
                "perron_triple: residual " + std::to_string(out.residual) + " after " +
                    std::to_string(out.iterations) + " iterations");

  Vector u = d.cwiseProduct(r.vec);
  u /= u.maxCoeff();
  Vector v = l.vec.cwiseQuotient(d);
  v /= v.dot(u);
  out.right = std::move(u);
  out.left = std::move(v);
  return out;
}

}  // namespace ratstat
