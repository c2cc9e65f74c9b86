#pragma once

// Exact finite-n quantities: h_n(t) = xi' M(t)^n eta, the moment generating
// function Psi_n(t) = h_n(t)/h_n(0), the full distribution p_n(k) over the
// lattice Sim_n = {k in N^ell : sum k_i <= n}, exact moments through
// derivative recursions, and tail probabilities of simple regions.
//
// All vector iterations renormalize by the max entry each step and carry the
// scale in log form: lambda^n overflows double precision long before the
// lengths used here.

#include "ratstat/error.hpp"
#include "ratstat/linalg.hpp"
#include "ratstat/model.hpp"
#include "ratstat/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace ratstat {

/// A strictly positive real stored as its natural log.
struct LogScaled {
  double log_value = -kInf;

  static LogScaled from_linear(double x) { return {std::log(x)}; }
  double linear() const { return std::exp(log_value); }

  friend LogScaled operator*(LogScaled a, LogScaled b) { return {a.log_value + b.log_value}; }
  friend LogScaled operator/(LogScaled a, LogScaled b) { return {a.log_value - b.log_value}; }
  friend LogScaled operator+(LogScaled a, LogScaled b) {
    if (a.log_value < b.log_value) std::swap(a, b);
    if (b.log_value == -kInf) return a;
    return {a.log_value + std::log1p(std::exp(b.log_value - a.log_value))};
  }
};

inline constexpr double kDefaultCellBudget = 5e7;

/// The lattice Sim_n in lexicographic order (k_1 most significant), with the
/// index of k + e_i precomputed for every point.
class SimplexLattice {
 public:
  /// |Sim_n| = C(n + ell, ell), as a double so that it can be compared with a
  /// budget before anything is allocated.
  static double cardinality(std::size_t ell, std::size_t n) {
    double c = 1.0;
    for (std::size_t i = 1; i <= ell; ++i) c = c * static_cast<double>(n + i) / static_cast<double>(i);
    return std::round(c);
  }

  SimplexLattice(std::size_t ell, std::size_t n) : ell_(ell), n_(n) {
    const auto size = static_cast<std::size_t>(cardinality(ell, n));
    points_.reserve(size * ell);
    sums_.reserve(size);
    CountVector k(ell, 0);
    int sum = 0;
    while (true) {
      points_.insert(points_.end(), k.begin(), k.end());
      sums_.push_back(sum);
      // Odometer increment in lexicographic order.
      std::size_t d = ell;
      while (d > 0) {
        --d;
        if (sum < static_cast<int>(n)) {
          ++k[d];
          ++sum;
          break;
        }
        sum -= k[d];
        k[d] = 0;
        if (d == 0) {
          d = ell + 1;
          break;
        }
      }
      if (d == ell + 1 || ell == 0) break;
    }
    successors_.assign(sums_.size() * ell, -1);
    for (std::size_t idx = 0; idx < sums_.size(); ++idx) {
      if (sums_[idx] >= static_cast<int>(n)) continue;
      CountVector kk(point(idx).begin(), point(idx).end());
      for (std::size_t i = 0; i < ell; ++i) {
        ++kk[i];
        successors_[idx * ell + i] = static_cast<std::int64_t>(rank(kk));
        --kk[i];
      }
    }
  }

  std::size_t ell() const { return ell_; }
  std::size_t n() const { return n_; }
  std::size_t size() const { return sums_.size(); }
  std::span<const int> point(std::size_t idx) const { return {points_.data() + idx * ell_, ell_}; }
  int sum(std::size_t idx) const { return sums_[idx]; }
  /// Index of point(idx) + e_i, or -1 when that leaves Sim_n.
  std::int64_t successor(std::size_t idx, std::size_t i) const { return successors_[idx * ell_ + i]; }

  bool contains(std::span<const int> k) const {
    if (k.size() != ell_) return false;
    long long s = 0;
    for (int v : k) {
      if (v < 0) return false;
      s += v;
    }
    return s <= static_cast<long long>(n_);
  }

  /// Lexicographic rank. Vectors with k_1 = j < k_1 contribute |Sim_{rem-j}|
  /// in one dimension less; the hockey-stick identity sums that in O(1).
  std::size_t rank(std::span<const int> k) const {
    if (!contains(k)) throw Error(ErrorCode::DimensionMismatch, "count vector is not in Sim_n");
    std::size_t r = 0;
    std::size_t rem = n_;
    for (std::size_t d = 0; d < ell_; ++d) {
      const auto kd = static_cast<std::size_t>(k[d]);
      const std::size_t dims_left = ell_ - d;  // includes d itself
      r += static_cast<std::size_t>(cardinality(dims_left, rem) - cardinality(dims_left, rem - kd));
      rem -= kd;
    }
    return r;
  }

 private:
  std::size_t ell_;
  std::size_t n_;
  std::vector<int> points_;
  std::vector<int> sums_;
  std::vector<std::int64_t> successors_;
};

struct ExactDistribution {
  std::size_t n = 0;
  std::size_t ell = 0;
  SimplexLattice lattice{0, 0};
  std::vector<double> probs;  // aligned with lattice indices
  LogScaled total;            // xi' M^n eta

  double prob(std::span<const int> k) const {
    return lattice.contains(k) ? probs[lattice.rank(k)] : 0.0;
  }
};

struct ExactMoments {
  std::size_t n = 0;
  Vector mean;
  Matrix covariance;
};

/// log(xi' M(t)^n eta). Throws DegenerateValue when the value is zero.
inline LogScaled h_n(const LinearRepresentation& rep, const Vector& t, std::size_t n) {
  const Matrix mt = m_of_t(rep, t);
  Vector z = rep.eta;
  double log_scale = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    z = mt * z;
    const double scale = z.maxCoeff();
    if (!(scale > 0.0))
      throw Error(ErrorCode::DegenerateValue, "xi' M(t)^n eta vanishes (at step " + std::to_string(s + 1) + ")");
    z /= scale;
    log_scale += std::log(scale);
  }
  const double head = rep.xi.dot(z);
  if (!(head > 0.0)) throw Error(ErrorCode::DegenerateValue, "xi' M(t)^n eta = 0 at n = " + std::to_string(n));
  return {std::log(head) + log_scale};
}

/// log Psi_n(t) = log h_n(t) - log h_n(0).
inline double mgf(const LinearRepresentation& rep, const Vector& t, std::size_t n) {
  return h_n(rep, t, n).log_value - h_n(rep, Vector::Zero(t.size()), n).log_value;
}

inline void check_budget(std::size_t ell, std::size_t n, std::size_t dim, double budget) {
  const double cells = SimplexLattice::cardinality(ell, n) * static_cast<double>(dim);
  if (cells > budget) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "exact distribution needs %.0f cells (budget %.0f)", cells, budget);
    throw Error(ErrorCode::BudgetExceeded, buf);
  }
}

/// p_n(k) by dynamic programming on coefficient rows: row k at step s holds
/// [x^k] xi'(A_1 x_1 + ... + A_ell x_ell + B)^s.
inline ExactDistribution exact_distribution(const LinearRepresentation& rep, std::size_t n,
                                            double budget = kDefaultCellBudget) {
  check_budget(rep.ell, n, rep.dim, budget);
  ExactDistribution out;
  out.n = n;
  out.ell = rep.ell;
  out.lattice = SimplexLattice(rep.ell, n);
  const SimplexLattice& lat = out.lattice;
  const auto size = static_cast<Eigen::Index>(lat.size());
  const auto m = static_cast<Eigen::Index>(rep.dim);

  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMatrix rows = RowMatrix::Zero(size, m);
  rows.row(0) = rep.xi.transpose();
  double log_scale = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    RowMatrix next = RowMatrix::Zero(size, m);
    for (std::size_t idx = 0; idx < lat.size(); ++idx) {
      if (lat.sum(idx) > static_cast<int>(s)) continue;
      const auto ii = static_cast<Eigen::Index>(idx);
      if (rows.row(ii).isZero(0.0)) continue;
      next.row(ii).noalias() += rows.row(ii) * rep.rest;
      for (std::size_t i = 0; i < rep.ell; ++i)
        next.row(static_cast<Eigen::Index>(lat.successor(idx, i))).noalias() += rows.row(ii) * rep.counted[i];
    }
    const double scale = next.maxCoeff();
    if (!(scale > 0.0))
      throw Error(ErrorCode::DegenerateValue, "all weighted words of length " + std::to_string(s + 1) + " vanish");
    next /= scale;
    log_scale += std::log(scale);
    rows.swap(next);
  }

  const Vector weights = rows * rep.eta;
  const double total = weights.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::DegenerateValue, "xi' M^n eta = 0 at n = " + std::to_string(n));
  out.probs.resize(lat.size());
  for (Eigen::Index i = 0; i < size; ++i) out.probs[static_cast<std::size_t>(i)] = weights(i) / total;
  out.total = {std::log(total) + log_scale};
  return out;
}

/// Mean and covariance of Y_n from coupled recursions, without differencing:
///   P_{s+1} = M P_s,  D^i_{s+1} = A_i P_s + M D^i_s,
///   S^{ij}_{s+1} = A_i D^j_s + A_j D^i_s + [i=j] A_i P_s + M S^{ij}_s,
/// all sharing one renormalization so their linear relations are preserved.
inline ExactMoments exact_moments(const LinearRepresentation& rep, std::size_t n) {
  const std::size_t ell = rep.ell;
  const Matrix m = rep.total();
  Vector p = rep.eta;
  std::vector<Vector> d(ell, Vector::Zero(p.size()));
  auto pair_index = [ell](std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return i * ell - i * (i + 1) / 2 + j;
  };
  std::vector<Vector> sec(ell * (ell + 1) / 2, Vector::Zero(p.size()));

  for (std::size_t s = 0; s < n; ++s) {
    std::vector<Vector> sec_next(sec.size());
    for (std::size_t i = 0; i < ell; ++i) {
      for (std::size_t j = i; j < ell; ++j) {
        Vector v = rep.counted[i] * d[j] + rep.counted[j] * d[i] + m * sec[pair_index(i, j)];
        if (i == j) v += rep.counted[i] * p;
        sec_next[pair_index(i, j)] = std::move(v);
      }
    }
    std::vector<Vector> d_next(ell);
    for (std::size_t i = 0; i < ell; ++i) d_next[i] = rep.counted[i] * p + m * d[i];
    Vector p_next = m * p;

    const double scale = p_next.maxCoeff();
    if (!(scale > 0.0))
      throw Error(ErrorCode::DegenerateValue, "M^n eta vanishes at n = " + std::to_string(s + 1));
    p = p_next / scale;
    for (std::size_t i = 0; i < ell; ++i) d[i] = d_next[i] / scale;
    for (std::size_t k = 0; k < sec.size(); ++k) sec[k] = sec_next[k] / scale;
  }

  const double h = rep.xi.dot(p);
  if (!(h > 0.0)) throw Error(ErrorCode::DegenerateValue, "xi' M^n eta = 0 at n = " + std::to_string(n));
  ExactMoments out;
  out.n = n;
  const auto l = static_cast<Eigen::Index>(ell);
  out.mean.resize(l);
  for (std::size_t i = 0; i < ell; ++i) out.mean(static_cast<Eigen::Index>(i)) = rep.xi.dot(d[i]) / h;
  out.covariance.resize(l, l);
  for (std::size_t i = 0; i < ell; ++i) {
    for (std::size_t j = i; j < ell; ++j) {
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      const double second = rep.xi.dot(sec[pair_index(i, j)]) / h;
      out.covariance(ii, jj) = out.covariance(jj, ii) = second - out.mean(ii) * out.mean(jj);
    }
  }
  return out;
}

// Regions ---------------------------------------------------------------------

/// {x : ||x - center||_inf <= radius}, or its complement {>= radius}.
struct SupBall {
  Vector center;
  double radius = 0.0;
  bool complement = true;
};

/// {x : weights . x >= threshold}.
struct HalfSpace {
  Vector weights;
  double threshold = 0.0;
};

using Region = std::variant<SupBall, HalfSpace>;

/// Boundary slack so that lattice points mathematically on the boundary are
/// not lost to rounding in k/n.
inline constexpr double kRegionSlack = 1e-12;

inline bool region_contains(const Region& region, const Vector& x) {
  return std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, SupBall>) {
          const double dist = (x - r.center).cwiseAbs().maxCoeff();
          return r.complement ? dist >= r.radius - kRegionSlack : dist <= r.radius + kRegionSlack;
        } else {
          return r.weights.dot(x) >= r.threshold - kRegionSlack;
        }
      },
      region);
}

/// P(Y_n / n in region), summed exactly over the distribution. The sum is
/// divided by the total over the same cells in the same order, so a region
/// covering Sim_n gives exactly 1.
inline double tail_probability(const ExactDistribution& dist, const Region& region) {
  double sum = 0.0;
  double all = 0.0;
  Vector x(static_cast<Eigen::Index>(dist.ell));
  const double n = static_cast<double>(dist.n);
  for (std::size_t idx = 0; idx < dist.lattice.size(); ++idx) {
    const auto k = dist.lattice.point(idx);
    for (std::size_t i = 0; i < dist.ell; ++i)
      x(static_cast<Eigen::Index>(i)) = dist.n == 0 ? 0.0 : k[i] / n;
    if (region_contains(region, x)) sum += dist.probs[idx];
    all += dist.probs[idx];
  }
  return sum / all;
}

inline double tail_probability(const LinearRepresentation& rep, std::size_t n, const Region& region,
                               double budget = kDefaultCellBudget) {
  return tail_probability(exact_distribution(rep, n, budget), region);
}

}  // namespace ratstat
