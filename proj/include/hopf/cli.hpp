#pragma once

#include <map>
#include <string>
#include <vector>

#include "hopf/calculus.hpp"

namespace hopf::cli {

struct RunConfig {
  std::string command;
  int band = 12;    // fiber frequency cap, 2L units
  int x_band = 4;   // symbol x-band cap, 2L units
  int bundle = 0;
  int order = 3;
  std::string format = "json";  // csv | json
  std::string out;              // empty = stdout
  std::string cache_dir;        // empty = HOPF_PDO_CACHE or ./cache
  std::uint64_t seed = 42;
  std::vector<std::string> specs;  // operator expressions (positional)
  std::string input;               // sample CSV (heat)
  std::vector<double> t_list;
  std::map<std::string, double> tol;  // named tolerance overrides (verify)
};

// flat key=value file; '#' comments; keys: band, x_band, bundle, order,
// format, cache_dir, seed, out, input, spec, spec_a, spec_b, t_list,
// tol.<name>. Later command-line flags override these.
void apply_config_file(RunConfig& rc, const std::string& path);

// operator expressions: expr := term (('+'|'-') term)*, term := factor ('*' factor)*,
// factor := number | I | H | X | Y | Lap | mul:<csv-path>. '*' composes left to
// right (the right factor acts first).
struct Factor {
  enum Kind { Number, Ident, FieldH, FieldX, FieldY, Laplacian, Multiplier } kind = Ident;
  double value = 1.0;    // Number
  std::string path;      // Multiplier
};
struct Term {
  double sign = 1.0;
  std::vector<Factor> factors;
};
std::vector<Term> parse_operator_expr(const std::string& text);

// an operator together with its exact symbol, graded for parametrix use
struct BuiltOperator {
  op::OperatorFn fn;
  calc::GradedSymbol graded;
  sym::Symbol total;
  bool invariant = true;
};
BuiltOperator build_operator(const fourier::Engine& eng, const std::vector<Term>& terms);

int run(const RunConfig& rc);  // returns process exit code

}  // namespace hopf::cli
