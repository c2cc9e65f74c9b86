#pragma once

// Command-line front end. Each subcommand parses its arguments, calls one
// library routine, and writes the matching table from ratstat/csv.hpp.

#include "ratstat/ratstat.hpp"

#include "CLI11.hpp"

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ratstat::cli {

enum ExitCode : int {
  kOk = 0,
  kNotPrimitive = 1,
  kUsage = 2,
  kModelError = 3,
  kBudget = 4,
};

struct RunConfig {
  std::string command;
  std::string model_path;
  std::string out_path = "-";
  std::string format = "csv";
  std::string n;  // a single length or a comma-separated list, per command
  std::string t;
  std::string x;
  std::string x0;
  std::string t_grid;
  double grid_step = 0.0;
  double delta = 0.0;
  std::uint64_t count = 1;
  std::uint64_t seed = 0;
  double budget = kDefaultCellBudget;
  bool words = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<double> parse_reals(const std::string& text, const char* what) {
  std::vector<double> out;
  if (text.empty()) throw UsageError(std::string(what) + " is required");
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size() || errno == ERANGE || !std::isfinite(v))
      throw UsageError(std::string(what) + ": '" + item + "' is not a finite decimal");
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::vector<std::size_t> parse_lengths(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  for (double v : parse_reals(text, what)) {
    if (v < 0 || v != std::floor(v) || v > 1e9) throw UsageError(std::string(what) + ": lengths must be nonnegative integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

inline std::size_t parse_length(const std::string& text, const char* what) {
  const auto v = parse_lengths(text, what);
  if (v.size() != 1) throw UsageError(std::string(what) + " takes a single length");
  return v.front();
}

inline Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Vector parse_point(const std::string& text, const char* what, std::size_t ell) {
  const auto v = parse_reals(text, what);
  if (v.size() != ell)
    throw UsageError(std::string(what) + " needs " + std::to_string(ell) + " comma-separated values");
  return to_vector(v);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::BudgetExceeded: return kBudget;
    default: return kModelError;
  }
}

/// Runs one subcommand; `out` receives results unless --out names a file.
inline int execute(const RunConfig& cfg, std::ostream& out) {
  std::ofstream file;
  std::ostream* sink = &out;
  if (cfg.out_path != "-") {
    file.open(cfg.out_path, std::ios::binary);
    if (!file) throw Error(ErrorCode::IoError, "cannot write '" + cfg.out_path + "'");
    sink = &file;
  }
  auto emit = [&](const Table& t) {
    if (cfg.format == "pretty") write_pretty(*sink, t);
    else write_csv(*sink, t);
  };

  if (cfg.command == "convert-dfa") {
    *sink << serialize_model(dfa_to_model(parse_dfa(read_file(cfg.model_path))));
    return kOk;
  }

  const LinearRepresentation rep = parse_model(read_file(cfg.model_path));
  if (cfg.command == "validate") {
    const ValidationReport report = validate(rep);
    *sink << format_report(report);
    return report.primitive ? kOk : kNotPrimitive;
  }

  const PrimitiveModel model(rep);
  const std::size_t ell = model.ell();

  if (cfg.command == "asymptotics") {
    emit(summary_table(summary(model)));
  } else if (cfg.command == "exact") {
    emit(distribution_table(exact_distribution(rep, parse_length(cfg.n, "--n"), cfg.budget)));
  } else if (cfg.command == "moments") {
    emit(moment_table(moment_convergence(model, parse_lengths(cfg.n, "--n"))));
  } else if (cfg.command == "mgf") {
    *sink << format_real(mgf(rep, parse_point(cfg.t, "--t", ell), parse_length(cfg.n, "--n"))) << '\n';
  } else if (cfg.command == "rate") {
    std::vector<Vector> points;
    if (!cfg.x.empty() && cfg.grid_step > 0.0) throw UsageError("rate takes --x or --grid, not both");
    if (cfg.grid_step > 0.0) points = simplex_grid(ell, cfg.grid_step);
    else points.push_back(parse_point(cfg.x, "--x", ell));
    std::vector<RateResult> rows;
    for (const auto& x : points) rows.push_back(rate_g_star(model, x));
    emit(rate_table(rows, ell));
  } else if (cfg.command == "moderate") {
    emit(moderate_table({rate_j_star(model, parse_point(cfg.x, "--x", ell))}, ell));
  } else if (cfg.command == "sample") {
    const SampleBatch batch =
        sample_counts(model, parse_length(cfg.n, "--n"), cfg.count, cfg.seed, cfg.words);
    if (cfg.words) {
      const WordSampler speller(model, 0);
      for (const auto& w : batch.words) *sink << speller.spell(w) << '\n';
    } else {
      emit(histogram_table(batch.histogram, ell));
    }
  } else if (cfg.command == "clt") {
    const auto flat = parse_reals(cfg.t_grid, "--t-grid");
    if (flat.size() % ell != 0)
      throw UsageError("--t-grid length must be a multiple of " + std::to_string(ell));
    std::vector<Vector> grid;
    for (std::size_t i = 0; i < flat.size(); i += ell)
      grid.push_back(Eigen::Map<const Vector>(flat.data() + i, static_cast<Eigen::Index>(ell)));
    emit(clt_table(clt_distance(model, parse_length(cfg.n, "--n"), grid), ell));
  } else if (cfg.command == "ldp") {
    emit(ldp_table(ldp_verify(model, parse_point(cfg.x0, "--x0", ell), cfg.delta, parse_lengths(cfg.n, "--n"),
                              cfg.budget)));
  } else {
    throw UsageError("unknown command '" + cfg.command + "'");
  }
  return kOk;
}

inline void add_output_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--out", cfg.out_path, "output file, '-' for stdout");
  sub->add_option("--format", cfg.format, "csv or pretty")->check(CLI::IsMember({"csv", "pretty"}));
}

/// Parses argv into a RunConfig, executes it, and maps failures to exit codes
/// with a machine-readable "error: <CODE>: <message>" line on `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Symbol-count statistics for rational stochastic models"};
  app.require_subcommand(1, 1);
  RunConfig cfg;

  auto command = [&](const char* name, const char* help, const char* file_help = "model file (JSON)") {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("MODEL", cfg.model_path, file_help)->required();
    sub->callback([&cfg, name] { cfg.command = name; });
    return sub;
  };

  command("validate", "check a model and report primitivity and lambda");
  add_output_options(command("asymptotics", "lambda, beta, c, Gamma, C"), cfg);

  auto* exact = command("exact", "exact distribution of Y_n");
  exact->add_option("--n", cfg.n, "length")->required();
  exact->add_option("--budget", cfg.budget, "maximum lattice cells");
  add_output_options(exact, cfg);

  auto* moments = command("moments", "moment expansion residuals");
  moments->add_option("--n", cfg.n, "comma-separated lengths")->required();
  add_output_options(moments, cfg);

  auto* mgf_cmd = command("mgf", "log moment generating function log Psi_n(t)");
  mgf_cmd->add_option("--n", cfg.n, "length")->required();
  mgf_cmd->add_option("--t", cfg.t, "tilt vector")->required();
  add_output_options(mgf_cmd, cfg);

  auto* rate = command("rate", "large deviation rate G*(x)");
  rate->add_option("--x", cfg.x, "point");
  rate->add_option("--grid", cfg.grid_step, "sweep the simplex with this spacing");
  add_output_options(rate, cfg);

  auto* moderate = command("moderate", "moderate deviation rate J*(x)");
  moderate->add_option("--x", cfg.x, "point")->required();
  add_output_options(moderate, cfg);

  auto* sample = command("sample", "exact random words");
  sample->add_option("--n", cfg.n, "length")->required();
  sample->add_option("--count", cfg.count, "number of words")->required();
  sample->add_option("--seed", cfg.seed, "master seed");
  sample->add_flag("--words", cfg.words, "print words instead of the histogram");
  add_output_options(sample, cfg);

  auto* clt = command("clt", "Gaussian-limit MGF distance");
  clt->add_option("--n", cfg.n, "length")->required();
  clt->add_option("--t-grid", cfg.t_grid, "flat comma list; consecutive ell-tuples are points")->required();
  add_output_options(clt, cfg);

  auto* ldp = command("ldp", "exact tail rates vs inf G* over the region");
  ldp->add_option("--x0", cfg.x0, "ball center")->required();
  ldp->add_option("--delta", cfg.delta, "sup-norm radius")->required();
  ldp->add_option("--n", cfg.n, "comma-separated lengths")->required();
  ldp->add_option("--budget", cfg.budget, "maximum lattice cells");
  add_output_options(ldp, cfg);

  auto* conv = command("convert-dfa", "DFA file to model file", "DFA file (JSON)");
  conv->add_option("--out", cfg.out_path, "output model file, '-' for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: Usage: " << e.what() << '\n';
    return kUsage;
  }

  try {
    return execute(cfg, out);
  } catch (const UsageError& e) {
    err << "error: Usage: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}

}  // namespace ratstat::cli
