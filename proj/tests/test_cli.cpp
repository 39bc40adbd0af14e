#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hopf/cli.hpp"
#include "hopf/operators.hpp"
#include "hopf/repr.hpp"

using namespace hopf;
using fourier::Coeffs;
using fourier::Engine;
using nlohmann::json;
using sym::Symbol;

namespace fs = std::filesystem;

namespace {

const fs::path& temp_root() {
  static const fs::path p = [] {
    std::random_device rd;
    fs::path q = fs::temp_directory_path() /
                 ("hopf_cli_test_" + std::to_string(std::uniform_int_distribution<unsigned>()(rd)));
    fs::create_directories(q);
    return q;
  }();
  return p;
}

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path p = temp_root() / name;
  std::ofstream f(p, std::ios::binary);
  f << content;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

cli::RunConfig base_config(const std::string& command) {
  cli::RunConfig rc;
  rc.command = command;
  rc.band = 6;
  rc.x_band = 2;
  rc.order = 2;
  rc.seed = 7;
  rc.cache_dir = (temp_root() / "cache").string();
  return rc;
}

const Engine& test_engine() {
  static fourier::EngineParams p = [] {
    fourier::EngineParams q;
    q.twol_max = 6;
    q.twolx_max = 2;
    q.order = 2;
    q.seed = 7;
    q.cache_dir = (temp_root() / "cache").string();
    return q;
  }();
  static Engine eng(p);
  return eng;
}

// a band-limited multiplier written to disk as a samples csv on the engine grid
fs::path multiplier_csv(const Engine& eng, Coeffs* hat_out = nullptr) {
  static fs::path cached;
  static Coeffs hat;
  if (cached.empty()) {
    RandomStream rng(seed_for(11, "cli-phi"));
    hat = fourier::random_bandlimited(eng.p.twolx_max, rng);
    const Vec samples = eng.Y.inverse(op::padded(hat, eng.Y.band));
    cached = write_temp("phi.csv", fourier::samples_to_csv(eng.Y, samples));
  }
  if (hat_out) *hat_out = hat;
  return cached;
}

double block_defect(const Engine& eng, const Symbol& a, const Symbol& b, int up_to) {
  const Symbol d = sym::sym_add(a, sym::sym_scale(b, cd(-1, 0)));
  double worst = 0;
  for (int t = 0; t <= std::min({up_to, d.twol_max}); ++t)
    worst = std::max(worst, sym::max_block_norm(eng, d, t));
  return worst;
}

}  // namespace

TEST_CASE("operator expression parsing") {
  SUBCASE("terms, factors, signs and precedence") {
    const auto terms = cli::parse_operator_expr("2 * Lap + mul:p.csv * X - I");
    REQUIRE(terms.size() == 3);
    CHECK(terms[0].sign == 1.0);
    REQUIRE(terms[0].factors.size() == 2);
    CHECK(terms[0].factors[0].kind == cli::Factor::Number);
    CHECK(terms[0].factors[0].value == 2.0);
    CHECK(terms[0].factors[1].kind == cli::Factor::Laplacian);
    REQUIRE(terms[1].factors.size() == 2);
    CHECK(terms[1].factors[0].kind == cli::Factor::Multiplier);
    CHECK(terms[1].factors[0].path == "p.csv");
    CHECK(terms[1].factors[1].kind == cli::Factor::FieldX);
    CHECK(terms[2].sign == -1.0);
    REQUIRE(terms[2].factors.size() == 1);
    CHECK(terms[2].factors[0].kind == cli::Factor::Ident);
  }
  SUBCASE("leading sign and lone number") {
    const auto terms = cli::parse_operator_expr("-X + H");
    REQUIRE(terms.size() == 2);
    CHECK(terms[0].sign == -1.0);
    CHECK(terms[0].factors[0].kind == cli::Factor::FieldX);
    CHECK(terms[1].sign == 1.0);
    const auto num = cli::parse_operator_expr(" 3.5 ");
    REQUIRE(num.size() == 1);
    CHECK(num[0].factors[0].value == doctest::Approx(3.5));
  }
  SUBCASE("malformed expressions are parse errors") {
    for (const char* bad : {"I + + X", "mul:", "", "I *", "* X", "I Q", "X +", "I & X"})
      CHECK_THROWS_AS(cli::parse_operator_expr(bad), ParseError);
  }
}

TEST_CASE("config file parsing") {
  SUBCASE("all keys, comments, and blank lines") {
    const fs::path p = write_temp("good.cfg",
                                  "# run settings\n"
                                  "band = 10\n"
                                  "x_band=2\n"
                                  "bundle = -1   # line bundle\n"
                                  "order = 2\n"
                                  "format = csv\n"
                                  "cache_dir = /tmp/hopf-cache\n"
                                  "seed = 99\n"
                                  "out = report.csv\n"
                                  "input = u0.csv\n"
                                  "\n"
                                  "spec = I + Lap\n"
                                  "spec_b = X\n"
                                  "t_list = 0.1, 0.25\n"
                                  "tol.plancherel-roundtrip = 2e-8\n");
    cli::RunConfig rc;
    cli::apply_config_file(rc, p.string());
    CHECK(rc.band == 10);
    CHECK(rc.x_band == 2);
    CHECK(rc.bundle == -1);
    CHECK(rc.order == 2);
    CHECK(rc.format == "csv");
    CHECK(rc.cache_dir == "/tmp/hopf-cache");
    CHECK(rc.seed == 99);
    CHECK(rc.out == "report.csv");
    CHECK(rc.input == "u0.csv");
    REQUIRE(rc.specs.size() == 2);
    CHECK(rc.specs[0] == "I + Lap");
    CHECK(rc.specs[1] == "X");
    REQUIRE(rc.t_list.size() == 2);
    CHECK(rc.t_list[0] == doctest::Approx(0.1));
    CHECK(rc.t_list[1] == doctest::Approx(0.25));
    REQUIRE(rc.tol.count("plancherel-roundtrip") == 1);
    CHECK(rc.tol.at("plancherel-roundtrip") == doctest::Approx(2e-8));
  }
  SUBCASE("bad files are parse errors with the offending line") {
    cli::RunConfig rc;
    const fs::path unknown = write_temp("unknown.cfg", "bands = 3\n");
    CHECK_THROWS_WITH_AS(cli::apply_config_file(rc, unknown.string()),
                         doctest::Contains("unknown key"), ParseError);
    const fs::path noeq = write_temp("noeq.cfg", "band 3\n");
    CHECK_THROWS_WITH_AS(cli::apply_config_file(rc, noeq.string()),
                         doctest::Contains("expected key=value"), ParseError);
    const fs::path badint = write_temp("badint.cfg", "band = six\n");
    CHECK_THROWS_AS(cli::apply_config_file(rc, badint.string()), ParseError);
    const fs::path badseed = write_temp("badseed.cfg", "seed = 12x\n");
    CHECK_THROWS_WITH_AS(cli::apply_config_file(rc, badseed.string()),
                         doctest::Contains("bad integer for seed"), ParseError);
    CHECK_THROWS_AS(cli::apply_config_file(rc, (temp_root() / "missing.cfg").string()),
                    ParseError);
  }
}

TEST_CASE("operator building") {
  const Engine& eng = test_engine();
  Coeffs phi;
  const fs::path phi_csv = multiplier_csv(eng, &phi);

  SUBCASE("grading and the exact total symbol") {
    const std::string expr = "I + Lap + mul:" + phi_csv.string() + " * X";
    const cli::BuiltOperator b = cli::build_operator(eng, cli::parse_operator_expr(expr));
    CHECK_FALSE(b.invariant);
    CHECK(b.graded.top_order == 2.0);
    // grades: invariant part on top, the x-dependent first-order term one down,
    // nothing at the bottom
    REQUIRE(b.graded.terms.size() == 3);
    CHECK(b.graded.terms[0].invariant());
    CHECK_FALSE(b.graded.terms[1].invariant());
    double bottom = 0;
    for (int t = 0; t <= b.graded.terms[2].twol_max; ++t)
      bottom = std::max(bottom, sym::max_block_norm(eng, b.graded.terms[2], t));
    CHECK(bottom == 0.0);

    const Symbol want = sym::sym_add(
        sym::sym_add(sym::identity_symbol(eng), sym::laplacian_symbol(eng)),
        sym::x_product(eng, sym::mult_symbol(eng, phi),
                       sym::field_symbol(eng, su2::AlgebraElement::X())));
    CHECK(block_defect(eng, b.total, want, b.total.twol_max) < 1e-9);
    CHECK(block_defect(eng, b.graded.collapse(eng), want, b.total.twol_max) < 1e-9);
  }
  SUBCASE("the operator function quantizes the symbol") {
    const std::string expr = "2 * H + mul:" + phi_csv.string() + " - Lap";
    const cli::BuiltOperator b = cli::build_operator(eng, cli::parse_operator_expr(expr));
    RandomStream rng(seed_for(13, "cli-u"));
    const Coeffs u = fourier::random_bandlimited(eng.p.twol_max - eng.p.twolx_max, rng);
    const Coeffs via_fn = b.fn(op::GridFunction::from_coeffs(eng.Y, u)).coeffs();
    const Coeffs via_sym = sym::op_apply(eng, b.total, u);
    const int band = std::max(via_fn.twol_max, via_sym.twol_max);
    const Coeffs diff = fourier::add(op::padded(via_fn, band),
                                     fourier::scale(op::padded(via_sym, band), cd(-1, 0)));
    CHECK(fourier::l2_norm(diff) < 1e-9 * (1 + fourier::l2_norm(via_fn)));
  }
  SUBCASE("empty expressions are rejected") {
    CHECK_THROWS_AS(cli::build_operator(eng, {}), ParseError);
  }
}

TEST_CASE("run exit codes") {
  const Engine& eng = test_engine();
  const fs::path sink = temp_root() / "sink.json";
  SUBCASE("parse failures exit 2") {
    cli::RunConfig rc = base_config("symbol");
    rc.specs = {"Lap"};
    rc.format = "yaml";
    rc.out = sink.string();
    CHECK(cli::run(rc) == 2);
    rc.format = "json";
    rc.specs = {};
    CHECK(cli::run(rc) == 2);
    rc.specs = {"Lap", "X"};
    CHECK(cli::run(rc) == 2);
    cli::RunConfig heat = base_config("heat");
    heat.format = "csv";
    heat.t_list = {0.1, 0.2};
    heat.out = sink.string();
    CHECK(cli::run(heat) == 2);
    cli::RunConfig missing = base_config("heat");
    missing.input = (temp_root() / "no-such-input.csv").string();
    missing.out = sink.string();
    CHECK(cli::run(missing) == 2);
    cli::RunConfig unknown = base_config("spectralize");
    CHECK(cli::run(unknown) == 2);
  }
  SUBCASE("domain failures exit 3") {
    cli::RunConfig rc = base_config("symbol");
    rc.specs = {"Lap"};
    rc.band = -1;
    rc.out = sink.string();
    CHECK(cli::run(rc) == 3);
  }
  SUBCASE("ellipticity failures exit 5") {
    cli::RunConfig rc = base_config("parametrix");
    rc.specs = {"Lap"};  // singular at the trivial frequency
    rc.out = sink.string();
    CHECK(cli::run(rc) == 5);
  }
  SUBCASE("error exit codes are pinned") {
    CHECK(ParseError("x").exit_code == 2);
    CHECK(DomainError("x").exit_code == 3);
    CHECK(PrecisionError("x").exit_code == 4);
    CHECK(EllipticityError("x").exit_code == 5);
    CHECK(InternalError("x").exit_code == 10);
  }
  (void)eng;
}

TEST_CASE("command outputs") {
  const Engine& eng = test_engine();
  SUBCASE("repr csv and json") {
    cli::RunConfig rc = base_config("repr");
    rc.format = "csv";
    rc.out = (temp_root() / "repr.csv").string();
    REQUIRE(cli::run(rc) == 0);
    const std::string csv = slurp(rc.out);
    CHECK(csv.rfind("ell,dim,casimir,weight_bracket,lambda\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == rc.band + 2);

    rc.format = "json";
    rc.out = (temp_root() / "repr.json").string();
    REQUIRE(cli::run(rc) == 0);
    const json doc = json::parse(slurp(rc.out));
    CHECK(doc.at("schema") == "hopf-pdo/repr/1");
    REQUIRE(doc.at("irreps").size() == size_t(rc.band + 1));
    CHECK(doc.at("irreps")[2].at("dim") == 3);
    CHECK(double(doc.at("irreps")[2].at("casimir")) ==
          doctest::Approx(repr::casimir_eigenvalue(2)).epsilon(1e-12));
  }
  SUBCASE("symbol csv schema") {
    cli::RunConfig rc = base_config("symbol");
    rc.specs = {"Lap"};
    rc.format = "csv";
    rc.out = (temp_root() / "lap.csv").string();
    REQUIRE(cli::run(rc) == 0);
    const std::string csv = slurp(rc.out);
    CHECK(csv.rfind("ell,twolx,s,r,i,j,re,im\n", 0) == 0);
    // the operator is invariant, so each frequency carries a single slot
    long expect = 1;
    for (int t = 0; t <= rc.band; ++t) expect += (t + 1) * (t + 1);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == expect);
  }
  SUBCASE("symbol and compose json schema") {
    Coeffs phi;
    const fs::path phi_csv = multiplier_csv(eng, &phi);
    cli::RunConfig rc = base_config("symbol");
    rc.specs = {"mul:" + phi_csv.string()};
    rc.out = (temp_root() / "mul.json").string();
    REQUIRE(cli::run(rc) == 0);
    const json doc = json::parse(slurp(rc.out));
    CHECK(doc.at("schema") == "hopf-pdo/symbol/1");
    CHECK(doc.at("twol_max") == rc.band);
    CHECK(doc.at("twolx_max") == rc.x_band);

    cli::RunConfig cc = base_config("compose");
    cc.specs = {"X", "mul:" + phi_csv.string()};
    cc.out = (temp_root() / "comp.json").string();
    REQUIRE(cli::run(cc) == 0);
    CHECK(json::parse(slurp(cc.out)).at("schema") == "hopf-pdo/symbol/1");
  }
  SUBCASE("parametrix json") {
    cli::RunConfig rc = base_config("parametrix");
    rc.specs = {"I + Lap"};
    rc.out = (temp_root() / "par.json").string();
    REQUIRE(cli::run(rc) == 0);
    const json doc = json::parse(slurp(rc.out));
    CHECK(doc.at("schema") == "hopf-pdo/parametrix/1");
    CHECK(double(doc.at("top_order")) == doctest::Approx(-2.0));
    CHECK(doc.at("terms").size() == size_t(rc.order + 1));
    CHECK(doc.at("collapsed").at("schema") == "hopf-pdo/symbol/1");
  }
  SUBCASE("heat json decay and csv roundtrip") {
    cli::RunConfig rc = base_config("heat");
    rc.bundle = 1;
    rc.t_list = {0.01, 0.05};
    rc.out = (temp_root() / "heat.json").string();
    REQUIRE(cli::run(rc) == 0);
    const json doc = json::parse(slurp(rc.out));
    CHECK(doc.at("schema") == "hopf-pdo/heat/1");
    CHECK(doc.at("bundle") == 1);
    REQUIRE(doc.at("runs").size() == 2);
    const double l2_0 = doc.at("runs")[0].at("l2");
    const double l2_1 = doc.at("runs")[1].at("l2");
    const double input_l2 = doc.at("input_l2");
    CHECK(l2_0 < input_l2);
    CHECK(l2_1 < l2_0);
    CHECK(l2_0 > 0);

    // feed explicit samples in and ask for samples out
    RandomStream rng(seed_for(17, "heat-u0"));
    const Coeffs u = fourier::random_section(1, eng.p.twol_max, rng).coeffs;
    const fs::path in_csv = write_temp(
        "heat_in.csv", fourier::samples_to_csv(eng.Y, eng.Y.inverse(op::padded(u, eng.Y.band))));
    cli::RunConfig hc = base_config("heat");
    hc.bundle = 1;
    hc.t_list = {0.25};
    hc.format = "csv";
    hc.input = in_csv.string();
    hc.out = (temp_root() / "heat.csv").string();
    REQUIRE(cli::run(hc) == 0);
    const std::string csv = slurp(hc.out);
    CHECK(csv.rfind("xi1,xi2,eta,re,im\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + long(eng.Y.n_nodes()));
  }
  SUBCASE("fixed seeds give byte-identical reports") {
    for (const bool heat : {false, true}) {
      cli::RunConfig a = heat ? base_config("heat") : base_config("symbol");
      if (heat) {
        a.bundle = -2;
        a.t_list = {0.1, 0.3};
      } else {
        a.specs = {"I + 0.5 * Lap"};
      }
      cli::RunConfig b = a;
      a.out = (temp_root() / "det_a.json").string();
      b.out = (temp_root() / "det_b.json").string();
      REQUIRE(cli::run(a) == 0);
      REQUIRE(cli::run(b) == 0);
      CHECK(slurp(a.out) == slurp(b.out));
    }
  }
}
