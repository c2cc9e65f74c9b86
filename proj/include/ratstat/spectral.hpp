#pragma once

// The eigenvalue surface y(t) of the tilted matrix
//   M(t) = A_1 e^{t_1} + ... + A_ell e^{t_ell} + B,
// its analytic gradient, the limiting cumulant function G(t) = log(y(t)/lambda)
// with gradient and Hessian, and the quasi-power prefactor
//   r(t) = (xi'u_t)(v_t'eta) / ((xi'u)(v'eta)).

#include "ratstat/error.hpp"
#include "ratstat/linalg.hpp"
#include "ratstat/model.hpp"
#include "ratstat/perron.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ratstat {

struct TiltPoint {
  Vector t;
  double y = 0.0;
  Vector grad_y;
  double prefactor_r = 0.0;
  PerronTriple triple;
};

inline void check_tilt_size(const LinearRepresentation& rep, const Vector& t) {
  if (static_cast<std::size_t>(t.size()) != rep.ell)
    throw Error(ErrorCode::DimensionMismatch,
                "tilt vector has length " + std::to_string(t.size()) + ", expected " + std::to_string(rep.ell));
}

inline Vector symbol_scales(const Vector& t) {
  Vector s(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    s(i) = std::exp(t(i));
    if (!std::isfinite(t(i)) || !std::isfinite(s(i)))
      throw Error(ErrorCode::Overflow, "exp(t_" + std::to_string(i + 1) + ") is not finite");
  }
  return s;
}

/// M(t). At t = 0 this is bit-identical to rep.total().
inline Matrix m_of_t(const LinearRepresentation& rep, const Vector& t) {
  check_tilt_size(rep, t);
  const Vector s = symbol_scales(t);
  Matrix m = rep.rest;
  for (std::size_t i = 0; i < rep.ell; ++i) m += rep.counted[i] * s(static_cast<Eigen::Index>(i));
  if (!m.allFinite()) throw Error(ErrorCode::Overflow, "M(t) has a non-finite entry");
  return m;
}

inline TiltPoint tilt(const PrimitiveModel& model, const Vector& t) {
  const auto& rep = model.rep();
  const Matrix mt = m_of_t(rep, t);
  const Vector s = symbol_scales(t);
  TiltPoint p;
  p.t = t;
  p.triple = perron_triple(mt);
  p.y = p.triple.value;
  p.grad_y.resize(t.size());
  for (std::size_t i = 0; i < rep.ell; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    p.grad_y(ii) = s(ii) * p.triple.left.dot(rep.counted[i] * p.triple.right);
  }
  p.prefactor_r = rep.xi.dot(p.triple.right) * p.triple.left.dot(rep.eta) / model.base_overlap();
  return p;
}

/// G(t) = log y(t) - log lambda; exactly zero at t = 0.
inline double log_growth(const PrimitiveModel& model, const Vector& t) {
  check_tilt_size(model.rep(), t);
  if (t.isZero(0.0)) return 0.0;
  return std::log(perron_triple(m_of_t(model.rep(), t)).value) - std::log(model.lambda());
}

/// grad G(t) = grad y(t) / y(t); every component lies in (0,1).
inline Vector grad_log_growth(const PrimitiveModel& model, const Vector& t) {
  const TiltPoint p = tilt(model, t);
  return p.grad_y / p.y;
}

namespace detail {

inline double fd_step(double ti) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(ti));
}

/// Jacobian of `grad` by central differences with step cbrt(eps)*max(1,|t_i|),
/// symmetrized.
template <class GradFn>
Matrix central_jacobian(const Vector& t, GradFn&& grad) {
  const Eigen::Index n = t.size();
  Matrix h(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double step = fd_step(t(j));
    Vector tp = t, tm = t;
    tp(j) += step;
    tm(j) -= step;
    h.col(j) = (grad(tp) - grad(tm)) / (tp(j) - tm(j));
  }
  return symmetrize(h);
}

}  // namespace detail

/// H log y(t). At t = 0 this is the covariance constant Gamma.
inline Matrix hessian_log_growth(const PrimitiveModel& model, const Vector& t) {
  check_tilt_size(model.rep(), t);
  return detail::central_jacobian(t, [&](const Vector& x) { return grad_log_growth(model, x); });
}

inline double log_prefactor(const PrimitiveModel& model, const Vector& t) {
  return std::log(tilt(model, t).prefactor_r);
}

/// grad log r(t), analytic. With P = u v' the spectral projector of M(t) and
/// S = (M(t) - yI + P)^{-1} - P the group inverse of M(t) - yI, the projector
/// derivative along dM is dP = -S dM P - P dM S.
inline Vector grad_log_prefactor(const PrimitiveModel& model, const Vector& t) {
  const auto& rep = model.rep();
  const TiltPoint p = tilt(model, t);
  const Vector s = symbol_scales(t);
  const Matrix mt = m_of_t(rep, t);
  const auto m = static_cast<Eigen::Index>(rep.dim);
  const Matrix proj = p.triple.right * p.triple.left.transpose();
  const Matrix group_inv =
      (mt - p.y * Matrix::Identity(m, m) + proj).partialPivLu().inverse() - proj;

  // xi'dP eta = -(xi'S) dM (P eta) - (xi'P) dM (S eta)
  const Vector xi_s = group_inv.transpose() * rep.xi;
  const Vector s_eta = group_inv * rep.eta;
  const Vector xi_p = proj.transpose() * rep.xi;
  const Vector p_eta = proj * rep.eta;
  const double base = rep.xi.dot(p_eta);

  Vector g(t.size());
  for (std::size_t i = 0; i < rep.ell; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const Matrix dm = rep.counted[i] * s(ii);
    g(ii) = -(xi_s.dot(dm * p_eta) + xi_p.dot(dm * s_eta)) / base;
  }
  return g;
}

/// H log r(t) by central differences of the analytic gradient.
inline Matrix hessian_log_prefactor(const PrimitiveModel& model, const Vector& t) {
  check_tilt_size(model.rep(), t);
  return detail::central_jacobian(t, [&](const Vector& x) { return grad_log_prefactor(model, x); });
}

}  // namespace ratstat
