#pragma once

// Tabular outputs. Every file format the CLI emits is produced here, so the
// CLI only chooses which table to build and where to write it.

#include "ratstat/asymptotics.hpp"
#include "ratstat/deviations.hpp"
#include "ratstat/exact.hpp"
#include "ratstat/model.hpp"
#include "ratstat/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace ratstat {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// 17 significant digits; infinities as "inf" / "-inf".
inline std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const Table& t) {
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

inline void write_pretty(std::ostream& os, const Table& t) {
  std::vector<std::size_t> width(t.header.size(), 0);
  auto grow = [&width](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size() && i < width.size(); ++i) width[i] = std::max(width[i], cells[i].size());
  };
  grow(t.header);
  for (const auto& r : t.rows) grow(r);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << "  ";
      os << cells[i];
      if (i + 1 < cells.size()) os << std::string(width[i] - cells[i].size(), ' ');
    }
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

inline std::string to_csv(const Table& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

namespace detail {

inline std::vector<std::string> indexed(const std::string& prefix, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline void append_reals(std::vector<std::string>& row, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(format_real(v(i)));
}

}  // namespace detail

/// k_1..k_ell,prob in lexicographic k order.
inline Table distribution_table(const ExactDistribution& dist) {
  Table t;
  t.header = detail::indexed("k_", dist.ell);
  t.header.push_back("prob");
  for (std::size_t idx = 0; idx < dist.lattice.size(); ++idx) {
    std::vector<std::string> row;
    for (int k : dist.lattice.point(idx)) row.push_back(std::to_string(k));
    row.push_back(format_real(dist.probs[idx]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Table histogram_table(const Histogram& hist, std::size_t ell) {
  Table t;
  t.header = detail::indexed("k_", ell);
  t.header.push_back("count");
  for (const auto& [k, c] : hist) {
    std::vector<std::string> row;
    for (int v : k) row.push_back(std::to_string(v));
    row.push_back(std::to_string(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Table summary_table(const AsymptoticSummary& s) {
  Table t;
  t.header = {"quantity", "value"};
  t.rows.push_back({"lambda", format_real(s.lambda)});
  const auto l = s.beta.size();
  for (Eigen::Index i = 0; i < l; ++i) t.rows.push_back({"beta_" + std::to_string(i + 1), format_real(s.beta(i))});
  for (Eigen::Index i = 0; i < l; ++i) t.rows.push_back({"c_" + std::to_string(i + 1), format_real(s.c_const(i))});
  for (Eigen::Index i = 0; i < l; ++i)
    for (Eigen::Index j = 0; j < l; ++j)
      t.rows.push_back({"gamma_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), format_real(s.gamma(i, j))});
  for (Eigen::Index i = 0; i < l; ++i)
    for (Eigen::Index j = 0; j < l; ++j)
      t.rows.push_back({"C_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), format_real(s.c_matrix(i, j))});
  t.rows.push_back({"gamma_min_eigenvalue", format_real(s.gamma_min_eigenvalue)});
  return t;
}

inline Table moment_table(const std::vector<MomentResidual>& rows) {
  Table t;
  t.header = {"n", "mean_resid", "cov_resid"};
  for (const auto& r : rows) t.rows.push_back({std::to_string(r.n), format_real(r.mean_resid), format_real(r.cov_resid)});
  return t;
}

inline Table clt_table(const std::vector<CltRow>& rows, std::size_t ell) {
  Table t;
  t.header = detail::indexed("t_", ell);
  t.header.push_back("clt_distance");
  for (const auto& r : rows) {
    std::vector<std::string> row;
    detail::append_reals(row, r.t);
    row.push_back(format_real(r.distance));
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// x_1..x_ell,value,status,t_1..t_ell,iterations. The t cells are empty when
/// no maximizer exists (outside the simplex).
inline Table rate_table(const std::vector<RateResult>& rows, std::size_t ell) {
  Table t;
  t.header = detail::indexed("x_", ell);
  t.header.push_back("value");
  t.header.push_back("status");
  for (auto& h : detail::indexed("t_", ell)) t.header.push_back(h);
  t.header.push_back("iterations");
  for (const auto& r : rows) {
    std::vector<std::string> row;
    detail::append_reals(row, r.x);
    row.push_back(format_real(r.value));
    row.emplace_back(to_string(r.status));
    if (r.maximizer_t) detail::append_reals(row, *r.maximizer_t);
    else row.insert(row.end(), ell, "");
    row.push_back(std::to_string(r.iterations));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Table moderate_table(const std::vector<ModerateRateResult>& rows, std::size_t ell) {
  Table t;
  t.header = detail::indexed("x_", ell);
  t.header.push_back("value");
  t.header.push_back("gamma_invertible");
  for (const auto& r : rows) {
    std::vector<std::string> row;
    detail::append_reals(row, r.x);
    row.push_back(format_real(r.value));
    row.push_back(r.gamma_invertible ? "true" : "false");
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Table ldp_table(const std::vector<LdpRow>& rows) {
  Table t;
  t.header = {"n", "exact_rate", "theoretical_rate"};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.n), format_real(r.exact_rate), format_real(r.theoretical_rate)});
  return t;
}

inline std::string format_report(const ValidationReport& r) {
  std::ostringstream os;
  os << "primitive: " << (r.primitive ? "true" : "false") << '\n';
  os << "wielandt_exponent: " << r.wielandt_exponent_used << '\n';
  os << "lambda: " << format_real(r.perron_value) << '\n';
  for (const auto& w : r.warnings) os << "warning: " << w << '\n';
  return os.str();
}

}  // namespace ratstat
