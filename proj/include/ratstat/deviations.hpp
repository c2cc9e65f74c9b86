#pragma once

// Rate functions of the count vector:
//   large deviations of Y_n/n:           G*(x) = sup_t { t.x - G(t) },  G(t) = log(y(t)/lambda)
//   moderate deviations around n beta:   J*(x) = sup_t { t.x - t'Gamma t / 2 }
// and the comparison of G* with exact tail decay rates.

#include "ratstat/asymptotics.hpp"
#include "ratstat/exact.hpp"
#include "ratstat/linalg.hpp"
#include "ratstat/model.hpp"
#include "ratstat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

namespace ratstat {

enum class RateStatus { interior, outside_simplex, boundary_unresolved };

constexpr std::string_view to_string(RateStatus s) noexcept {
  switch (s) {
    case RateStatus::interior: return "interior";
    case RateStatus::outside_simplex: return "outside_simplex";
    case RateStatus::boundary_unresolved: return "boundary_unresolved";
  }
  return "unknown";
}

struct RateResult {
  Vector x;
  double value = 0.0;  // +inf when outside the simplex; a lower bound when unresolved
  std::optional<Vector> maximizer_t;
  RateStatus status = RateStatus::interior;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;  // ||x - grad G(t)||_inf at the returned t
};

struct RateOptions {
  double grad_tol = 1e-10;
  double t_max = 200.0;
  std::size_t max_iters = 500;
  /// Newton steps are clipped to this sup-norm so that runs toward the
  /// simplex boundary stay finite.
  double max_step = 10.0;
  double simplex_slack = 1e-12;
};

inline bool in_closed_simplex(const Vector& x, double slack = 1e-12) {
  return (x.array() >= -slack).all() && x.sum() <= 1.0 + slack;
}

inline bool on_simplex_boundary(const Vector& x, double slack = 1e-12) {
  return (x.array() <= slack).any() || x.sum() >= 1.0 - slack;
}

/// G*(x) by damped Newton on the concave dual f(t) = t.x - G(t), from t = 0.
inline RateResult rate_g_star(const PrimitiveModel& model, const Vector& x, const RateOptions& opt = {}) {
  check_tilt_size(model.rep(), x);
  RateResult res;
  res.x = x;
  if (!x.allFinite() || !in_closed_simplex(x, opt.simplex_slack)) {
    res.value = kInf;
    res.status = RateStatus::outside_simplex;
    return res;
  }

  const double log_lambda = std::log(model.lambda());
  const auto l = x.size();
  Vector t = Vector::Zero(l);
  TiltPoint p = tilt(model, t);
  double f = 0.0;  // t.x - G(t) at t = 0
  Vector g = x - p.grad_y / p.y;

  std::size_t iter = 0;
  for (; iter < opt.max_iters; ++iter) {
    if (g.cwiseAbs().maxCoeff() <= opt.grad_tol) break;
    if (t.cwiseAbs().maxCoeff() > opt.t_max) break;

    Matrix h = hessian_log_growth(model, t);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
    const double floor = 1e-14 * std::max(1.0, top);
    if (es.eigenvalues().minCoeff() < floor)
      h += (floor - es.eigenvalues().minCoeff()) * Matrix::Identity(l, l);
    Vector d = h.ldlt().solve(g);
    const double len = d.cwiseAbs().maxCoeff();
    if (!(len > 0.0) || !d.allFinite()) break;
    if (len > opt.max_step) d *= opt.max_step / len;

    bool accepted = false;
    double alpha = 1.0;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      const Vector tn = t + alpha * d;
      const TiltPoint pn = tilt(model, tn);
      const double fn = tn.dot(x) - (std::log(pn.y) - log_lambda);
      const Vector gn = x - pn.grad_y / pn.y;
      const bool armijo = fn >= f + 1e-4 * alpha * g.dot(d) - 1e-15 * (1.0 + std::abs(f));
      // Near the optimum f is flat to rounding; a smaller dual gradient is
      // then the reliable progress signal.
      const bool gradient_drop = gn.cwiseAbs().maxCoeff() < g.cwiseAbs().maxCoeff() && fn >= f - 1e-14 * (1.0 + std::abs(f));
      if (armijo || gradient_drop) {
        t = tn;
        p = pn;
        f = fn;
        g = gn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  res.iterations = iter;
  res.gradient_norm = g.cwiseAbs().maxCoeff();
  res.value = std::max(0.0, f);
  res.maximizer_t = t;
  // On the simplex boundary the supremum is approached only as |t| grows, so
  // even a small dual gradient certifies just a lower bound.
  const bool converged = res.gradient_norm <= opt.grad_tol && t.cwiseAbs().maxCoeff() <= opt.t_max;
  res.status = converged && !on_simplex_boundary(x, opt.simplex_slack) ? RateStatus::interior
                                                                        : RateStatus::boundary_unresolved;
  return res;
}

// Moderate deviations --------------------------------------------------------

struct ModerateRateResult {
  Vector x;
  double value = 0.0;
  bool gamma_invertible = false;
};

inline constexpr double kGammaRelativeCutoff = 1e-9;

/// J*(x) = x'Gamma^{-1}x / 2 when Gamma is invertible (relative eigenvalue
/// cutoff); otherwise finite only on range(Gamma), via the pseudo-inverse.
inline ModerateRateResult rate_j_star(const Matrix& gamma, const Vector& x,
                                      double relative_cutoff = kGammaRelativeCutoff) {
  if (gamma.rows() != x.size() || gamma.cols() != x.size())
    throw Error(ErrorCode::DimensionMismatch, "rate_j_star: Gamma and x disagree in size");
  ModerateRateResult res;
  res.x = x;
  const Matrix sym = symmetrize(gamma);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Vector ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  res.gamma_invertible = top > 0.0 && ev.minCoeff() > relative_cutoff * top;
  if (res.gamma_invertible) {
    res.value = 0.5 * x.dot(sym.ldlt().solve(x));
    return res;
  }
  const Vector coords = es.eigenvectors().transpose() * x;
  Vector t_coords = Vector::Zero(x.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > relative_cutoff * top) t_coords(i) = coords(i) / ev(i);
  const Vector t = es.eigenvectors() * t_coords;
  if ((sym * t - x).norm() > 1e-9) {
    res.value = kInf;
    return res;
  }
  res.value = t.dot(x) - 0.5 * t.dot(sym * t);
  return res;
}

inline ModerateRateResult rate_j_star(const PrimitiveModel& model, const Vector& x) {
  check_tilt_size(model.rep(), x);
  return rate_j_star(summary(model).gamma, x);
}

/// sup_t { t.x - t'Gamma t / 2 } by conjugate-gradient ascent, without
/// forming Gamma^{-1}. Used as an independent check of the closed form.
inline double j_star_by_ascent(const Matrix& gamma, const Vector& x, double tol = 1e-14) {
  const Matrix sym = symmetrize(gamma);
  Vector t = Vector::Zero(x.size());
  Vector r = x;  // gradient of the objective
  Vector d = r;
  double rr = r.squaredNorm();
  for (Eigen::Index k = 0; k < 10 * x.size() + 10 && std::sqrt(rr) > tol; ++k) {
    const Vector gd = sym * d;
    const double curv = d.dot(gd);
    if (!(curv > 0.0)) return kInf;
    const double step = rr / curv;
    t += step * d;
    r -= step * gd;
    const double rr_next = r.squaredNorm();
    d = r + (rr_next / rr) * d;
    rr = rr_next;
  }
  return t.dot(x) - 0.5 * t.dot(sym * t);
}

// Region rates and exact tail verification --------------------------------------

struct RegionRate {
  double value = kInf;
  Vector argmin;
  bool resolved = true;  // false if the minimizer carries a boundary lower bound
};

namespace detail {

inline void consider(RegionRate& best, const RateResult& r) {
  if (r.value < best.value) {
    best.value = r.value;
    best.argmin = r.x;
    best.resolved = r.status == RateStatus::interior;
  }
}

}  // namespace detail

/// inf of G* over {x : ||x - x0||_inf >= delta}. G* is convex with its zero at
/// beta, so when beta lies inside the ball the infimum sits on the ball's
/// boundary; each face is scanned on a grid and then refined by compass search.
inline RegionRate region_rate(const PrimitiveModel& model, const Vector& x0, double delta,
                              const RateOptions& opt = {}) {
  check_tilt_size(model.rep(), x0);
  const Vector beta = grad_log_growth(model, Vector::Zero(x0.size()));
  RegionRate best;
  if ((beta - x0).cwiseAbs().maxCoeff() >= delta - kRegionSlack) {
    best.value = 0.0;
    best.argmin = beta;
    return best;
  }
  const Eigen::Index l = x0.size();
  const int grid =
      l == 1 ? 1 : std::clamp(static_cast<int>(std::pow(400.0, 1.0 / static_cast<double>(l - 1))), 5, 41);

  for (Eigen::Index face = 0; face < l; ++face) {
    for (double side : {-1.0, 1.0}) {
      const double fixed = x0(face) + side * delta;
      if (fixed < -opt.simplex_slack || fixed > 1.0 + opt.simplex_slack) continue;
      std::vector<Eigen::Index> free;
      for (Eigen::Index j = 0; j < l; ++j)
        if (j != face) free.push_back(j);
      auto lo = [&](Eigen::Index j) { return std::max(0.0, x0(j) - delta); };
      auto hi = [&](Eigen::Index j) { return std::min(1.0, x0(j) + delta); };

      RegionRate face_best;
      Vector point = x0;
      point(face) = fixed;
      // Odometer over the grid on the free coordinates.
      std::vector<int> idx(free.size(), 0);
      while (true) {
        for (std::size_t q = 0; q < free.size(); ++q) {
          const auto j = free[q];
          point(j) = grid == 1 ? x0(j) : lo(j) + (hi(j) - lo(j)) * idx[q] / (grid - 1);
        }
        detail::consider(face_best, rate_g_star(model, point, opt));
        std::size_t q = 0;
        while (q < free.size() && ++idx[q] == grid) idx[q++] = 0;
        if (q == free.size()) break;
      }
      if (!free.empty() && std::isfinite(face_best.value)) {
        Vector cur = face_best.argmin;
        double step = 0.0;
        for (auto j : free) step = std::max(step, (hi(j) - lo(j)) / (grid - 1));
        while (step > 1e-9) {
          bool moved = false;
          for (auto j : free) {
            for (double dir : {-1.0, 1.0}) {
              Vector cand = cur;
              cand(j) = std::clamp(cur(j) + dir * step, lo(j), hi(j));
              const RateResult r = rate_g_star(model, cand, opt);
              if (r.value < face_best.value) {
                detail::consider(face_best, r);
                cur = cand;
                moved = true;
              }
            }
          }
          if (!moved) step *= 0.5;
        }
      }
      if (face_best.value < best.value) best = face_best;
    }
  }
  return best;
}

struct LdpRow {
  std::size_t n = 0;
  double exact_rate = 0.0;        // -(1/n) log P(||Y_n/n - x0||_inf >= delta)
  double theoretical_rate = 0.0;  // inf of G* over the same region
};

inline double exact_tail_rate(const LinearRepresentation& rep, std::size_t n, const Vector& x0, double delta,
                              double budget = kDefaultCellBudget) {
  const double tail = tail_probability(rep, n, SupBall{x0, delta, true}, budget);
  if (!(tail > 0.0)) return kInf;
  return -std::log(tail) / static_cast<double>(n);
}

inline std::vector<LdpRow> ldp_verify(const PrimitiveModel& model, const Vector& x0, double delta,
                                      const std::vector<std::size_t>& n_list,
                                      double budget = kDefaultCellBudget) {
  check_tilt_size(model.rep(), x0);
  for (auto n : n_list) check_budget(model.ell(), n, model.dim(), budget);
  const double theory = region_rate(model, x0, delta).value;
  std::vector<LdpRow> rows;
  for (auto n : n_list) rows.push_back({n, exact_tail_rate(model.rep(), n, x0, delta, budget), theory});
  return rows;
}

/// Lattice points step * k with sum <= 1, covering the closed simplex.
inline std::vector<Vector> simplex_grid(std::size_t ell, double step) {
  if (!(step > 0.0) || step > 1.0) throw Error(ErrorCode::MalformedInput, "grid step must be in (0, 1]");
  const auto per_axis = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
  std::vector<Vector> pts;
  const SimplexLattice lat(ell, per_axis);
  for (std::size_t i = 0; i < lat.size(); ++i) {
    Vector x(static_cast<Eigen::Index>(ell));
    const auto k = lat.point(i);
    for (std::size_t j = 0; j < ell; ++j) x(static_cast<Eigen::Index>(j)) = k[j] * step;
    pts.push_back(std::move(x));
  }
  return pts;
}

}  // namespace ratstat
