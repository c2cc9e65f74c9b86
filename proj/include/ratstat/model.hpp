#pragma once

// Linear representations (xi, {A_1..A_ell}, B, eta) of rational stochastic
// models, their JSON ingestion, the primitivity test, and the DFA to
// characteristic-series conversion.

#include "ratstat/error.hpp"
#include "ratstat/linalg.hpp"
#include "ratstat/perron.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ratstat {

/// Weighted automaton defining the model. Symbols are indexed positionally:
/// 0..ell-1 are the counted symbols a_1..a_ell, index ell is the uncounted b.
struct LinearRepresentation {
  std::size_t dim = 0;
  std::size_t ell = 0;
  Vector xi;
  Vector eta;
  std::vector<Matrix> counted;
  Matrix rest;
  std::vector<std::string> symbol_names;

  std::size_t alphabet_size() const { return ell + 1; }

  const Matrix& symbol_matrix(std::size_t symbol) const {
    return symbol < ell ? counted[symbol] : rest;
  }

  /// M = A_1 + ... + A_ell + B.
  Matrix total() const {
    Matrix m = rest;
    for (const auto& a : counted) m += a;
    return m;
  }
};

struct ValidationReport {
  bool primitive = false;
  std::size_t wielandt_exponent_used = 0;
  double perron_value = 0.0;
  std::vector<std::string> warnings;
};

struct DfaTransition {
  std::size_t from = 0;
  std::string label;
  std::size_t to = 0;
};

struct DfaTable {
  std::size_t states = 0;
  std::vector<std::string> alphabet;
  std::string uncounted_symbol;
  std::size_t initial = 0;
  std::vector<std::size_t> accepting;
  std::vector<DfaTransition> transitions;
};

namespace detail {

using json = nlohmann::json;

[[noreturn]] inline void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedInput, what);
}

inline json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
}

inline void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                                std::string_view where) {
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      malformed("unknown key '" + item.key() + "' in " + std::string(where));
  }
}

inline const json& require_key(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) malformed(std::string("missing key '") + key + "'");
  return *it;
}

inline std::size_t read_count(const json& j, const char* what) {
  if (!j.is_number_integer()) malformed(std::string(what) + " must be an integer");
  const auto v = j.get<long long>();
  if (v < 0) malformed(std::string(what) + " must be nonnegative");
  return static_cast<std::size_t>(v);
}

inline double read_weight(const json& j, const std::string& where) {
  if (!j.is_number()) malformed(where + ": expected a number");
  const double w = j.get<double>();
  if (!std::isfinite(w)) malformed(where + ": weight is not finite");
  if (w < 0.0) throw Error(ErrorCode::NegativeWeight, where + ": negative weight");
  return w;
}

inline Vector read_vector(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array()) malformed(where + " must be an array");
  if (j.size() != dim)
    throw Error(ErrorCode::DimensionMismatch,
                where + " has length " + std::to_string(j.size()) + ", expected " + std::to_string(dim));
  Vector v(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i)
    v(static_cast<Eigen::Index>(i)) = read_weight(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

inline Matrix read_matrix(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array()) malformed(where + " must be an array of rows");
  if (j.size() != dim)
    throw Error(ErrorCode::DimensionMismatch,
                where + " has " + std::to_string(j.size()) + " rows, expected " + std::to_string(dim));
  Matrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    const Vector row = read_vector(j[r], dim, where + "[" + std::to_string(r) + "]");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

inline std::string read_label(const json& j, const char* what) {
  if (!j.is_string()) malformed(std::string(what) + " must be a string");
  auto s = j.get<std::string>();
  if (s.empty()) malformed(std::string(what) + " must be nonempty");
  return s;
}

inline nlohmann::ordered_json vector_to_json(const Vector& v) {
  auto out = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline nlohmann::ordered_json matrix_to_json(const Matrix& m) {
  auto out = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

}  // namespace detail

/// Structural checks shared by parsing and programmatic construction:
/// dimensions, finiteness, signs, and distinct symbol names.
inline void check_structure(const LinearRepresentation& rep) {
  if (rep.dim == 0) throw Error(ErrorCode::DimensionMismatch, "dim must be positive");
  if (rep.ell == 0) throw Error(ErrorCode::MissingSymbol, "at least one counted symbol is required");
  if (rep.counted.size() != rep.ell)
    throw Error(ErrorCode::MissingSymbol, "expected one matrix per counted symbol");
  if (rep.symbol_names.size() != rep.ell + 1)
    throw Error(ErrorCode::MissingSymbol, "expected ell + 1 symbol names");
  std::set<std::string> names(rep.symbol_names.begin(), rep.symbol_names.end());
  if (names.size() != rep.symbol_names.size())
    throw Error(ErrorCode::MalformedInput, "symbol names must be distinct");
  const auto m = static_cast<Eigen::Index>(rep.dim);
  if (rep.xi.size() != m || rep.eta.size() != m)
    throw Error(ErrorCode::DimensionMismatch, "xi and eta must have length dim");
  for (std::size_t s = 0; s <= rep.ell; ++s) {
    const Matrix& a = rep.symbol_matrix(s);
    if (a.rows() != m || a.cols() != m)
      throw Error(ErrorCode::DimensionMismatch, "matrix for '" + rep.symbol_names[s] + "' is not dim x dim");
    if (!a.allFinite()) throw Error(ErrorCode::MalformedInput, "non-finite weight");
    if (!is_nonnegative(a))
      throw Error(ErrorCode::NegativeWeight, "matrix for '" + rep.symbol_names[s] + "' has a negative weight");
  }
  if (!rep.xi.allFinite() || !rep.eta.allFinite())
    throw Error(ErrorCode::MalformedInput, "non-finite weight");
  if ((rep.xi.array() < 0.0).any() || (rep.eta.array() < 0.0).any())
    throw Error(ErrorCode::NegativeWeight, "xi and eta must be nonnegative");
}

/// Parses a model file. Primitivity is not checked here.
inline LinearRepresentation parse_model(std::string_view text) {
  using detail::json;
  const json root = detail::parse_json(text);
  if (!root.is_object()) detail::malformed("model must be a JSON object");
  detail::reject_unknown_keys(root, {"dim", "counted_symbols", "uncounted_symbol", "xi", "eta", "matrices"},
                              "model");

  LinearRepresentation rep;
  rep.dim = detail::read_count(detail::require_key(root, "dim"), "dim");
  if (rep.dim == 0) throw Error(ErrorCode::DimensionMismatch, "dim must be positive");

  const json& counted = detail::require_key(root, "counted_symbols");
  if (!counted.is_array()) detail::malformed("counted_symbols must be an array");
  for (const auto& c : counted) rep.symbol_names.push_back(detail::read_label(c, "counted symbol"));
  rep.ell = rep.symbol_names.size();
  if (rep.ell == 0) throw Error(ErrorCode::MissingSymbol, "counted_symbols is empty");
  rep.symbol_names.push_back(detail::read_label(detail::require_key(root, "uncounted_symbol"), "uncounted_symbol"));

  rep.xi = detail::read_vector(detail::require_key(root, "xi"), rep.dim, "xi");
  rep.eta = detail::read_vector(detail::require_key(root, "eta"), rep.dim, "eta");

  const json& mats = detail::require_key(root, "matrices");
  if (!mats.is_object()) detail::malformed("matrices must be an object keyed by symbol");
  for (const auto& item : mats.items()) {
    if (std::find(rep.symbol_names.begin(), rep.symbol_names.end(), item.key()) == rep.symbol_names.end())
      detail::malformed("matrices: unknown symbol '" + item.key() + "'");
  }
  for (std::size_t s = 0; s <= rep.ell; ++s) {
    const std::string& name = rep.symbol_names[s];
    auto it = mats.find(name);
    if (it == mats.end()) throw Error(ErrorCode::MissingSymbol, "no matrix for symbol '" + name + "'");
    Matrix a = detail::read_matrix(*it, rep.dim, "matrices." + name);
    if (s < rep.ell) rep.counted.push_back(std::move(a));
    else rep.rest = std::move(a);
  }
  check_structure(rep);
  return rep;
}

/// Inverse of parse_model. Doubles are written in shortest round-trip form.
inline std::string serialize_model(const LinearRepresentation& rep) {
  using ojson = nlohmann::ordered_json;
  ojson root;
  root["dim"] = rep.dim;
  ojson counted = ojson::array();
  for (std::size_t i = 0; i < rep.ell; ++i) counted.push_back(rep.symbol_names[i]);
  root["counted_symbols"] = counted;
  root["uncounted_symbol"] = rep.symbol_names[rep.ell];
  root["xi"] = detail::vector_to_json(rep.xi);
  root["eta"] = detail::vector_to_json(rep.eta);
  ojson mats = ojson::object();
  for (std::size_t s = 0; s <= rep.ell; ++s)
    mats[rep.symbol_names[s]] = detail::matrix_to_json(rep.symbol_matrix(s));
  root["matrices"] = mats;
  return root.dump(2) + "\n";
}

inline std::size_t wielandt_exponent(std::size_t m) { return (m - 1) * (m - 1) + 1; }

/// True iff the support of `matrix` raised to the Wielandt exponent
/// (m-1)^2+1 is all-true. Uses boolean squaring; a primitive matrix has every
/// power beyond that exponent positive, so the first power of two at or above
/// it decides the question.
inline bool is_primitive(const Matrix& matrix) {
  const Eigen::Index m = matrix.rows();
  if (m == 0 || matrix.cols() != m) return false;
  using BoolMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
  BoolMatrix s = (matrix.array() > 0.0).cast<int>();
  const std::size_t target = wielandt_exponent(static_cast<std::size_t>(m));
  for (std::size_t power = 1; power < target; power *= 2) {
    BoolMatrix sq = (s * s).unaryExpr([](int x) { return x > 0 ? 1 : 0; });
    s = std::move(sq);
  }
  return (s.array() > 0).all();
}

/// Downstream analytics require primitivity; throws NotPrimitive otherwise.
inline void require_primitive(const LinearRepresentation& rep) {
  if (!is_primitive(rep.total()))
    throw Error(ErrorCode::NotPrimitive, "the matrix M = A_1 + ... + A_ell + B is not primitive");
}

inline ValidationReport validate(const LinearRepresentation& rep) {
  check_structure(rep);
  if (!(rep.xi.array() > 0.0).any()) throw Error(ErrorCode::ZeroVector, "xi is the zero vector");
  if (!(rep.eta.array() > 0.0).any()) throw Error(ErrorCode::ZeroVector, "eta is the zero vector");
  for (std::size_t s = 0; s <= rep.ell; ++s) {
    if (!(rep.symbol_matrix(s).array() > 0.0).any())
      throw Error(ErrorCode::ZeroMatrix, "matrix for '" + rep.symbol_names[s] + "' is all zero");
  }

  ValidationReport report;
  const Matrix m = rep.total();
  report.wielandt_exponent_used = wielandt_exponent(rep.dim);
  report.primitive = is_primitive(m);

  if ((rep.xi.array() == 0.0).any()) report.warnings.push_back("xi has zero entries");
  if ((rep.eta.array() == 0.0).any()) report.warnings.push_back("eta has zero entries");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!(m.row(i).array() > 0.0).any()) report.warnings.push_back("M has a zero row " + std::to_string(i));
    if (!(m.col(i).array() > 0.0).any()) report.warnings.push_back("M has a zero column " + std::to_string(i));
  }

  if (report.primitive) {
    report.perron_value = perron_triple(m).value;
    // xi' M^n eta > 0 at the Wielandt exponent (renormalized to avoid overflow).
    Vector z = rep.eta;
    for (std::size_t n = 0; n < report.wielandt_exponent_used; ++n) {
      z = m * z;
      z /= z.maxCoeff();
    }
    if (!(rep.xi.dot(z) > 0.0))
      report.warnings.push_back("xi' M^n eta vanishes at the Wielandt exponent");
  } else {
    // Informational only: spectral radius from a dense eigensolver.
    Eigen::EigenSolver<Matrix> es(m, false);
    report.perron_value = es.eigenvalues().cwiseAbs().maxCoeff();
    report.warnings.push_back("M is not primitive; downstream analytics are refused");
  }
  return report;
}

/// A representation that passed `validate` with primitive = true, bundled with
/// the untilted Perron triple (lambda, u, v) every analytic needs.
class PrimitiveModel {
 public:
  explicit PrimitiveModel(LinearRepresentation rep) : rep_(std::move(rep)) {
    const ValidationReport report = validate(rep_);
    if (!report.primitive)
      throw Error(ErrorCode::NotPrimitive, "the matrix M = A_1 + ... + A_ell + B is not primitive");
    base_ = perron_triple(rep_.total());
    base_overlap_ = rep_.xi.dot(base_.right) * base_.left.dot(rep_.eta);
  }

  const LinearRepresentation& rep() const { return rep_; }
  std::size_t dim() const { return rep_.dim; }
  std::size_t ell() const { return rep_.ell; }
  double lambda() const { return base_.value; }
  const PerronTriple& base_triple() const { return base_; }
  /// (xi'u)(v'eta) at t = 0, the denominator of the quasi-power prefactor.
  double base_overlap() const { return base_overlap_; }

 private:
  LinearRepresentation rep_;
  PerronTriple base_;
  double base_overlap_ = 0.0;
};

// DFA ingestion -------------------------------------------------------------

inline void check_dfa(const DfaTable& dfa) {
  if (dfa.states == 0) detail::malformed("dfa: states must be positive");
  if (dfa.alphabet.size() < 2) detail::malformed("dfa: alphabet needs a counted and an uncounted label");
  std::set<std::string> labels(dfa.alphabet.begin(), dfa.alphabet.end());
  if (labels.size() != dfa.alphabet.size()) detail::malformed("dfa: alphabet labels must be distinct");
  if (!labels.count(dfa.uncounted_symbol))
    throw Error(ErrorCode::MissingSymbol, "dfa: uncounted_symbol not in alphabet");
  if (dfa.initial >= dfa.states) detail::malformed("dfa: initial state out of range");
  for (auto q : dfa.accepting)
    if (q >= dfa.states) detail::malformed("dfa: accepting state out of range");
  std::set<std::pair<std::size_t, std::string>> seen;
  for (const auto& t : dfa.transitions) {
    if (t.from >= dfa.states || t.to >= dfa.states) detail::malformed("dfa: transition state out of range");
    if (!labels.count(t.label)) throw Error(ErrorCode::MissingSymbol, "dfa: unknown label '" + t.label + "'");
    if (!seen.emplace(t.from, t.label).second)
      detail::malformed("dfa: nondeterministic transition from state " + std::to_string(t.from) +
                        " on '" + t.label + "'");
  }
}

inline DfaTable parse_dfa(std::string_view text) {
  using detail::json;
  const json root = detail::parse_json(text);
  if (!root.is_object()) detail::malformed("dfa must be a JSON object");
  detail::reject_unknown_keys(root, {"states", "alphabet", "uncounted_symbol", "initial", "accepting", "transitions"},
                              "dfa");
  DfaTable dfa;
  dfa.states = detail::read_count(detail::require_key(root, "states"), "states");
  const json& alphabet = detail::require_key(root, "alphabet");
  if (!alphabet.is_array()) detail::malformed("alphabet must be an array");
  for (const auto& a : alphabet) dfa.alphabet.push_back(detail::read_label(a, "alphabet label"));
  dfa.uncounted_symbol = detail::read_label(detail::require_key(root, "uncounted_symbol"), "uncounted_symbol");
  dfa.initial = detail::read_count(detail::require_key(root, "initial"), "initial");
  const json& accepting = detail::require_key(root, "accepting");
  if (!accepting.is_array()) detail::malformed("accepting must be an array");
  for (const auto& q : accepting) dfa.accepting.push_back(detail::read_count(q, "accepting state"));
  const json& transitions = detail::require_key(root, "transitions");
  if (!transitions.is_array()) detail::malformed("transitions must be an array");
  for (const auto& t : transitions) {
    if (!t.is_object()) detail::malformed("transition must be an object");
    detail::reject_unknown_keys(t, {"from", "label", "to"}, "transition");
    dfa.transitions.push_back({detail::read_count(detail::require_key(t, "from"), "from"),
                               detail::read_label(detail::require_key(t, "label"), "label"),
                               detail::read_count(detail::require_key(t, "to"), "to")});
  }
  check_dfa(dfa);
  return dfa;
}

/// Characteristic-series representation of the DFA's language: the induced
/// law is uniform over accepted words of each length. Counted symbols keep
/// their alphabet order; the uncounted label is moved last.
inline LinearRepresentation dfa_to_model(const DfaTable& dfa) {
  check_dfa(dfa);
  LinearRepresentation rep;
  rep.dim = dfa.states;
  for (const auto& a : dfa.alphabet)
    if (a != dfa.uncounted_symbol) rep.symbol_names.push_back(a);
  rep.ell = rep.symbol_names.size();
  rep.symbol_names.push_back(dfa.uncounted_symbol);

  const auto m = static_cast<Eigen::Index>(dfa.states);
  rep.counted.assign(rep.ell, Matrix::Zero(m, m));
  rep.rest = Matrix::Zero(m, m);
  for (const auto& t : dfa.transitions) {
    const auto pos = static_cast<std::size_t>(
        std::find(rep.symbol_names.begin(), rep.symbol_names.end(), t.label) - rep.symbol_names.begin());
    Matrix& a = pos < rep.ell ? rep.counted[pos] : rep.rest;
    a(static_cast<Eigen::Index>(t.from), static_cast<Eigen::Index>(t.to)) = 1.0;
  }
  rep.xi = Vector::Zero(m);
  rep.xi(static_cast<Eigen::Index>(dfa.initial)) = 1.0;
  rep.eta = Vector::Zero(m);
  for (auto q : dfa.accepting) rep.eta(static_cast<Eigen::Index>(q)) = 1.0;
  return rep;
}

}  // namespace ratstat
