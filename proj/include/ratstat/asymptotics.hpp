#pragma once

#include "ratstat/exact.hpp"
#include "ratstat/linalg.hpp"
#include "ratstat/model.hpp"
#include "ratstat/spectral.hpp"

#include <cmath>
#include <vector>

namespace ratstat {

/// Constants of the expansions E[Y_n] = beta n + c + O(eps^n) and
/// Cov(Y_n) = n Gamma + C + O(eps^n).
struct AsymptoticSummary {
  double lambda = 0.0;
  Vector beta;
  Vector c_const;   // grad r(0)
  Matrix gamma;     // H log y(0)
  Matrix c_matrix;  // H log r(0)
  double gamma_min_eigenvalue = 0.0;
};

inline AsymptoticSummary summary(const PrimitiveModel& model) {
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(model.ell()));
  const TiltPoint at0 = tilt(model, zero);
  AsymptoticSummary s;
  s.lambda = model.lambda();
  s.beta = at0.grad_y / at0.y;
  s.c_const = grad_log_prefactor(model, zero);  // r(0) = 1, so grad r(0) = grad log r(0)
  s.gamma = hessian_log_growth(model, zero);
  s.c_matrix = hessian_log_prefactor(model, zero);
  s.gamma_min_eigenvalue = min_symmetric_eigenvalue(s.gamma);
  return s;
}

struct MomentResidual {
  std::size_t n = 0;
  double mean_resid = 0.0;  // ||E[Y_n] - beta n - c||_inf
  double cov_resid = 0.0;   // max_ij |Cov(Y_n) - n Gamma - C|
};

inline MomentResidual moment_residual(const LinearRepresentation& rep, const AsymptoticSummary& s,
                                      std::size_t n) {
  const ExactMoments mom = exact_moments(rep, n);
  const double nd = static_cast<double>(n);
  MomentResidual r;
  r.n = n;
  r.mean_resid = (mom.mean - nd * s.beta - s.c_const).cwiseAbs().maxCoeff();
  r.cov_resid = (mom.covariance - nd * s.gamma - s.c_matrix).cwiseAbs().maxCoeff();
  return r;
}

inline std::vector<MomentResidual> moment_convergence(const PrimitiveModel& model,
                                                      const std::vector<std::size_t>& n_list) {
  const AsymptoticSummary s = summary(model);
  std::vector<MomentResidual> rows;
  rows.reserve(n_list.size());
  for (auto n : n_list) rows.push_back(moment_residual(model.rep(), s, n));
  return rows;
}

/// log M_n(t), the log-MGF of (Y_n - n beta)/sqrt(n), from the exact mgf:
/// log Psi_n(t/sqrt n) - sqrt(n) t.beta.
inline double centered_log_mgf(const LinearRepresentation& rep, const Vector& beta, const Vector& t,
                               std::size_t n) {
  const double rn = std::sqrt(static_cast<double>(n));
  return mgf(rep, t / rn, n) - rn * t.dot(beta);
}

struct CltRow {
  Vector t;
  double distance = 0.0;  // |log M_n(t) - t'Gamma t / 2|
};

inline std::vector<CltRow> clt_distance(const PrimitiveModel& model, std::size_t n,
                                        const std::vector<Vector>& t_grid) {
  const AsymptoticSummary s = summary(model);
  std::vector<CltRow> rows;
  rows.reserve(t_grid.size());
  for (const auto& t : t_grid) {
    check_tilt_size(model.rep(), t);
    const double gauss = 0.5 * t.dot(s.gamma * t);
    rows.push_back({t, std::abs(centered_log_mgf(model.rep(), s.beta, t, n) - gauss)});
  }
  return rows;
}

}  // namespace ratstat
