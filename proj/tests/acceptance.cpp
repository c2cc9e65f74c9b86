// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "fixtures.hpp"
#include "oracles.hpp"
#include "stats.hpp"

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace ratstat;
using fixtures::vec;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    if (!detail.empty()) detail += "; ";
    detail += ok ? "" : "FAILED ";
    detail += buf;
    pass = pass && ok;
  }
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;
  std::function<Outcome()> body;
};

// 1 ---------------------------------------------------------------------------
Outcome brute_force() {
  Outcome o;
  double worst = 0;
  for (const auto& f : fixtures::all()) {
    for (std::size_t n = 0; n <= 7; ++n) {
      const auto dist = exact_distribution(f.rep, n);
      const auto oracle = oracles::enumerate_distribution(f.rep, n);
      for (std::size_t idx = 0; idx < dist.lattice.size(); ++idx) {
        const CountVector k(dist.lattice.point(idx).begin(), dist.lattice.point(idx).end());
        const auto it = oracle.find(k);
        worst = std::max(worst, std::abs(dist.probs[idx] - (it == oracle.end() ? 0.0 : it->second)));
      }
    }
  }
  o.require(worst <= 1e-12, "max |p - enumeration| = %.2e over F1-F4, n <= 7", worst);
  return o;
}

// 2 ---------------------------------------------------------------------------
Outcome multinomial() {
  Outcome o;
  const PrimitiveModel f1(fixtures::f1()), f2(fixtures::f2());
  const auto s1 = summary(f1), s2 = summary(f2);
  Matrix g2(2, 2);
  g2 << 3.0 / 16, -1.0 / 16, -1.0 / 16, 3.0 / 16;
  const double beta_err = std::max(std::abs(s1.beta(0) - 2.0 / 3), (s2.beta - vec({0.25, 0.25})).cwiseAbs().maxCoeff());
  const double gamma_err =
      std::max(std::abs(s1.gamma(0, 0) - 2.0 / 9), (s2.gamma - g2).cwiseAbs().maxCoeff());
  o.require(beta_err <= 1e-12, "beta err %.1e", beta_err);
  o.require(gamma_err <= 1e-9, "Gamma err %.1e", gamma_err);

  // 50 interior points per model; G* against relative entropy.
  double g_err = 0, j_err = 0;
  std::vector<Vector> pts1, pts2;
  for (int i = 1; i <= 50; ++i) pts1.push_back(vec({i / 51.0}));
  for (int i = 1; i < 12 && pts2.size() < 50; ++i)
    for (int j = 1; i + j < 12 && pts2.size() < 50; ++j) pts2.push_back(vec({i / 12.0, j / 12.0}));
  const Matrix g1 = Matrix::Constant(1, 1, 2.0 / 9);
  for (const auto& x : pts1) {
    g_err = std::max(g_err, std::abs(rate_g_star(f1, x).value - oracles::kl_composition(x, s1.beta)));
    const Vector d = x - vec({2.0 / 3});
    j_err = std::max(j_err, std::abs(rate_j_star(f1, d).value - 0.5 * d(0) * d(0) / (2.0 / 9)));
  }
  for (const auto& x : pts2) {
    g_err = std::max(g_err, std::abs(rate_g_star(f2, x).value - oracles::kl_composition(x, vec({0.25, 0.25}))));
    const Vector d = x - vec({0.25, 0.25});
    j_err = std::max(j_err, std::abs(rate_j_star(f2, d).value - 0.5 * d.dot(g2.inverse() * d)));
  }
  o.require(g_err <= 1e-8, "max |G* - KL| = %.1e on %zu points", g_err, pts1.size() + pts2.size());
  o.require(j_err <= 1e-8, "max |J* - x'G^-1x/2| = %.1e", j_err);
  return o;
}

// 3 ---------------------------------------------------------------------------
Outcome eigen_surfaces() {
  Outcome o;
  const auto f3 = summary(PrimitiveModel(fixtures::f3()));
  const auto f4 = summary(PrimitiveModel(fixtures::f4()));
  const double phi = (1 + std::sqrt(5.0)) / 2;
  const double e3 = std::max({std::abs(f3.lambda - 2), std::abs(f3.beta(0) - 0.75), std::abs(f3.gamma(0, 0) - 0.0625)});
  const double e4 = std::max(std::abs(f4.lambda - phi), std::abs(f4.beta(0) - (5 - std::sqrt(5.0)) / 10));
  o.require(e3 <= 1e-9, "F3 max err %.1e", e3);
  o.require(e4 <= 1e-9, "F4 max err %.1e", e4);
  return o;
}

// 4 ---------------------------------------------------------------------------
// The residual is |log r(t)|/n + O(eps^n)/n, so the 400/100 ratio equals 1/4 up
// to terms below 1e-40; the comparison allows relative rounding of 1e-9.
Outcome quasi_power() {
  Outcome o;
  for (const auto& [name, rep] : {std::pair{"F3", fixtures::f3()}, std::pair{"F4", fixtures::f4()}}) {
    const PrimitiveModel m(rep);
    for (double t : {-1.0, 0.5, 1.0}) {
      const double g = log_growth(m, vec({t}));
      auto resid = [&](std::size_t n) { return std::abs(mgf(rep, vec({t}), n) / static_cast<double>(n) - g); };
      const double r100 = resid(100), r200 = resid(200), r400 = resid(400);
      const double lo = std::min({100 * r100, 200 * r200, 400 * r400});
      const double hi = std::max({100 * r100, 200 * r200, 400 * r400});
      o.require(r400 <= 0.25 * r100 * (1 + 1e-9) && hi <= 1.5 * lo,
                "%s t=%g: r400/r100 = %.12f, n*r in [%.6f, %.6f]", name, t, r400 / r100, lo, hi);
    }
  }
  return o;
}

// 5 ---------------------------------------------------------------------------
Outcome moment_expansions() {
  Outcome o;
  const auto rows = moment_convergence(PrimitiveModel(fixtures::f3()), {20, 60});
  const auto &a = rows[0], &b = rows[1];
  o.require(b.mean_resid <= 1e-6 && b.mean_resid * 10 <= a.mean_resid,
            "F3 mean resid n=20 %.3e, n=60 %.3e", a.mean_resid, b.mean_resid);
  o.require(b.cov_resid <= 1e-6 && b.cov_resid * 10 <= a.cov_resid, "F3 cov resid n=20 %.3e, n=60 %.3e",
            a.cov_resid, b.cov_resid);
  // F3's second eigenvalue is 0, so both expansions are exact for n >= 3 and
  // the residuals above are rounding in Gamma and C. F4 (eps = 1/phi^2) shows
  // the geometric decay itself; reported only.
  const auto f4 = moment_convergence(PrimitiveModel(fixtures::f4()), {20, 60});
  char note[160];
  std::snprintf(note, sizeof note, "not gating: F4 mean %.2e -> %.2e, cov %.2e -> %.2e", f4[0].mean_resid,
                f4[1].mean_resid, f4[0].cov_resid, f4[1].cov_resid);
  o.detail += std::string("; ") + note;
  return o;
}

// 6 ---------------------------------------------------------------------------
Outcome gaussian_limit() {
  Outcome o;
  for (const auto& [name, rep] : {std::pair{"F1", fixtures::f1()}, std::pair{"F3", fixtures::f3()}}) {
    const PrimitiveModel m(rep);
    const double d100 = clt_distance(m, 100, {vec({1})})[0].distance;
    const double d400 = clt_distance(m, 400, {vec({1})})[0].distance;
    o.require(d100 / d400 >= 1.4 && d100 / d400 <= 2.8 && d400 <= 0.05, "%s ratio %.3f, d400 %.4f", name,
              d100 / d400, d400);
  }
  return o;
}

// 7 ---------------------------------------------------------------------------
Outcome ldp_decay() {
  Outcome o;
  const auto f1 = ldp_verify(PrimitiveModel(fixtures::f1()), vec({2.0 / 3}), 0.1, {2000});
  const double rel = std::abs(f1[0].exact_rate - 0.0216) / 0.0216;
  o.require(rel <= 0.15, "F1 n=2000 exact %.5f (rel err %.3f)", f1[0].exact_rate, rel);
  const auto f3 = ldp_verify(PrimitiveModel(fixtures::f3()), vec({0.75}), 0.15, {250, 500, 1000});
  double gap[3];
  for (int i = 0; i < 3; ++i) gap[i] = std::abs(f3[i].exact_rate - f3[i].theoretical_rate);
  o.require(gap[0] > gap[1] && gap[1] > gap[2], "F3 gaps %.5f > %.5f > %.5f", gap[0], gap[1], gap[2]);
  return o;
}

// 8 ---------------------------------------------------------------------------
Outcome rate_structure() {
  Outcome o;
  std::mt19937_64 gen(2024);
  double min_value = kInf, worst_legendre = 0;
  int spurious_zeros = 0, finite_outside = 0, points = 0;
  for (const auto& f : fixtures::all()) {
    const PrimitiveModel m(f.rep);
    const Vector beta = summary(m).beta;
    for (const auto& x : simplex_grid(f.rep.ell, f.rep.ell == 1 ? 0.001 : 1.0 / 44)) {
      if ((x.array() <= 0).any() || x.sum() >= 1) continue;
      const double v = rate_g_star(m, x).value;
      min_value = std::min(min_value, v);
      spurious_zeros += v <= 0 && (x - beta).norm() > 1e-6;
      ++points;
    }
    std::normal_distribution<double> nd(0, 1);
    for (int i = 0; i < 20; ++i) {
      Vector t(static_cast<Eigen::Index>(f.rep.ell));
      for (auto& v : t) v = nd(gen);
      t *= std::uniform_real_distribution<double>(0, 3)(gen) / t.norm();
      const Vector x = grad_log_growth(m, t);
      worst_legendre = std::max(worst_legendre, std::abs(rate_g_star(m, x).value - (t.dot(x) - log_growth(m, t))));
    }
    for (int i = 0; i < 10; ++i) {
      Vector x(static_cast<Eigen::Index>(f.rep.ell));
      for (auto& v : x) v = nd(gen);
      x = x.normalized() * 0.3;
      x(i % x.size()) = i % 2 ? -0.05 * (i + 1) : 1.05 + 0.1 * i;  // one coordinate off the simplex
      finite_outside += !std::isinf(rate_g_star(m, x).value);
    }
  }
  o.require(min_value >= 0 && spurious_zeros == 0, "min G* %.2e, spurious zeros %d on %d grid points", min_value,
            spurious_zeros, points);
  o.require(worst_legendre <= 1e-8, "Legendre max err %.1e", worst_legendre);
  o.require(finite_outside == 0, "finite values outside simplex: %d", finite_outside);
  return o;
}

// 9 ---------------------------------------------------------------------------
Outcome local_consistency() {
  Outcome o;
  std::mt19937_64 gen(99);
  std::normal_distribution<double> nd(0, 1);
  for (const auto& [name, rep] :
       {std::pair{"F1", fixtures::f1()}, std::pair{"F2", fixtures::f2()}, std::pair{"F3", fixtures::f3()}}) {
    const PrimitiveModel m(rep);
    const auto s = summary(m);
    double lo = kInf, hi = 0;
    for (int i = 0; i < 5; ++i) {
      Vector d(static_cast<Eigen::Index>(rep.ell));
      for (auto& v : d) v = nd(gen);
      d.normalize();
      const double eps = 1e-3;
      const double ratio = rate_g_star(m, s.beta + eps * d).value / (0.5 * eps * eps * d.dot(s.gamma.inverse() * d));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    o.require(lo >= 0.9 && hi <= 1.1, "%s ratios in [%.5f, %.5f]", name, lo, hi);
  }
  return o;
}

// 10 --------------------------------------------------------------------------
Outcome sampler_exactness() {
  Outcome o;
  const auto b1 = sample_counts(PrimitiveModel(fixtures::f1()), 10, 100000, 42);
  double tv = 0;
  for (int k = 0; k <= 10; ++k) {
    const auto it = b1.histogram.find(CountVector{k});
    tv += std::abs((it == b1.histogram.end() ? 0.0 : static_cast<double>(it->second) / 1e5) -
                   oracles::binomial_pmf(10, k, 2.0 / 3));
  }
  o.require(tv / 2 <= 0.02, "F1 TV %.4f", tv / 2);

  const PrimitiveModel f3(fixtures::f3());
  const auto dist = exact_distribution(fixtures::f3(), 6);
  int good = 0;
  double worst = 1;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto batch = sample_counts(f3, 6, 100000, seed);
    std::vector<std::uint64_t> obs(dist.lattice.size(), 0);
    for (const auto& [k, c] : batch.histogram) obs[dist.lattice.rank(k)] = c;
    const double p = stats::chi_square_p_value(dist.probs, obs);
    good += p >= 0.001;
    worst = std::min(worst, p);
  }
  o.require(good >= 19, "F3 chi-square p >= 0.001 for %d/20 seeds (min p %.4f)", good, worst);
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "brute-force equivalence", 10, brute_force},
      {2, "multinomial oracle", 5, multinomial},
      {3, "closed-form eigen-surfaces", 1, eigen_surfaces},
      {4, "quasi-power residual", 5, quasi_power},
      {5, "moment expansions", 5, moment_expansions},
      {6, "Gaussian limit", 10, gaussian_limit},
      {7, "LDP decay", 60, ldp_decay},
      {8, "rate-function structure", 30, rate_structure},
      {9, "moderate/large local consistency", 10, local_consistency},
      {10, "sampler exactness", 60, sampler_exactness},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.require(false, "exception: %s", e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.time_limit;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s %2d %-34s %7.2fs (limit %3.0fs%s)  %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                c.time_limit, in_time ? "" : ", EXCEEDED", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
