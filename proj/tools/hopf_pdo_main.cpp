#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hopf/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"matrix-symbol calculus for homogeneous line bundles over the Hopf fibration"};
  app.require_subcommand(1);

  struct Flags {
    std::string config, out, format, cache_dir, input;
    int band = 0, x_band = 0, bundle = 0, order = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> specs;
    std::vector<double> t_list;
    std::vector<std::string> tols;
  };

  auto add_common = [](CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "flat key=value configuration file");
    cmd->add_option("--band", f.band, "fiber frequency cap (in 2L units)");
    cmd->add_option("--x-band", f.x_band, "symbol x-band cap (in 2L units)");
    cmd->add_option("--bundle", f.bundle, "bundle index n of O(n)");
    cmd->add_option("--order", f.order, "calculus truncation order");
    cmd->add_option("--out", f.out, "output path (default stdout)");
    cmd->add_option("--format", f.format, "csv or json");
    cmd->add_option("--seed", f.seed, "seed for any randomized inputs");
    cmd->add_option("--cache-dir", f.cache_dir, "cache directory (default HOPF_PDO_CACHE or ./cache)");
  };

  Flags f;
  CLI::App* repr = app.add_subcommand("repr", "tabulate irreducible representation data");
  add_common(repr, f);
  CLI::App* symbol = app.add_subcommand("symbol", "exact symbol of an operator expression");
  add_common(symbol, f);
  symbol->add_option("expr", f.specs, "operator expression, e.g. 'I + Lap + mul:phi.csv * X'");
  CLI::App* compose = app.add_subcommand("compose", "composed symbol of two operator expressions");
  add_common(compose, f);
  compose->add_option("expr", f.specs, "two operator expressions");
  CLI::App* parametrix = app.add_subcommand("parametrix", "left parametrix of an elliptic expression");
  add_common(parametrix, f);
  parametrix->add_option("expr", f.specs, "operator expression");
  CLI::App* heat = app.add_subcommand("heat", "heat evolution of a section");
  add_common(heat, f);
  heat->add_option("--input", f.input, "input section samples (csv)");
  heat->add_option("--t", f.t_list, "evolution times");
  CLI::App* verify = app.add_subcommand("verify", "run the acceptance battery");
  add_common(verify, f);
  verify->add_option("--tol", f.tols, "tolerance override name=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  hopf::cli::RunConfig rc;
  CLI::App* active = app.get_subcommands().front();
  rc.command = active->get_name();
  // not every subcommand carries every flag
  const auto given = [&](const std::string& name) {
    const CLI::Option* o = active->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  try {
    if (given("--config")) hopf::cli::apply_config_file(rc, f.config);
    if (given("--band")) rc.band = f.band;
    if (given("--x-band")) rc.x_band = f.x_band;
    if (given("--bundle")) rc.bundle = f.bundle;
    if (given("--order")) rc.order = f.order;
    if (given("--out")) rc.out = f.out;
    if (given("--format")) rc.format = f.format;
    if (given("--seed")) rc.seed = f.seed;
    if (given("--cache-dir")) rc.cache_dir = f.cache_dir;
    if (given("--input")) rc.input = f.input;
    if (given("--t")) rc.t_list = f.t_list;
    if (!f.specs.empty()) rc.specs = f.specs;
    for (const std::string& s : f.tols) {
      const size_t eq = s.find('=');
      if (eq == std::string::npos)
        throw hopf::ParseError("--tol expects name=value, got '" + s + "'");
      rc.tol[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
    }
  } catch (const hopf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  return hopf::cli::run(rc);
}
