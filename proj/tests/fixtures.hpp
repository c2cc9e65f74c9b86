#pragma once

// Reference models built directly in code, so tests do not depend on the
// parser they are meant to check.

#include "ratstat/ratstat.hpp"

#include <initializer_list>
#include <string>
#include <vector>

namespace fixtures {

using ratstat::LinearRepresentation;
using ratstat::Matrix;
using ratstat::Vector;

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  Matrix m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline LinearRepresentation make(Vector xi, std::vector<Matrix> counted, Matrix rest, Vector eta,
                                 std::vector<std::string> names) {
  LinearRepresentation rep;
  rep.dim = static_cast<std::size_t>(xi.size());
  rep.ell = counted.size();
  rep.xi = std::move(xi);
  rep.eta = std::move(eta);
  rep.counted = std::move(counted);
  rep.rest = std::move(rest);
  rep.symbol_names = std::move(names);
  return rep;
}

// Bernoulli(2/3) letters.
inline LinearRepresentation f1() { return make(vec({1}), {mat({{2}})}, mat({{1}}), vec({1}), {"a", "b"}); }

// Multinomial (1/4, 1/4, 1/2).
inline LinearRepresentation f2() {
  return make(vec({1}), {mat({{1}}), mat({{1}})}, mat({{2}}), vec({1}), {"a", "c", "b"});
}

// y(t) = e^t + e^{t/2}; M = [[1,1],[1,1]].
inline LinearRepresentation f3() {
  return make(vec({1, 0}), {mat({{1, 1}, {0, 1}})}, mat({{0, 0}, {1, 0}}), vec({1, 1}), {"a", "b"});
}

// Uniform words over {a,b} with no factor "aa".
inline LinearRepresentation f4() {
  return make(vec({1, 0}), {mat({{0, 1}, {0, 0}})}, mat({{1, 0}, {1, 0}}), vec({1, 1}), {"a", "b"});
}

struct Named {
  const char* name;
  LinearRepresentation rep;
};

inline std::vector<Named> all() { return {{"F1", f1()}, {"F2", f2()}, {"F3", f3()}, {"F4", f4()}}; }

inline std::string data_path(const std::string& file) { return std::string(RATSTAT_DATA_DIR) + "/" + file; }

}  // namespace fixtures
