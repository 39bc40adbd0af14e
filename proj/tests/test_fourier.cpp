#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "helpers.hpp"

#include <filesystem>
#include <sstream>

using namespace hopf;
using namespace hopf::su2;
using namespace hopf::repr;
using namespace hopf::fourier;

namespace {

Grid make_grid(int band) { return Grid(build_quadrature(band)); }

Coeffs random_coeffs(int twol_max, RandomStream& rng) {
  Coeffs c = Coeffs::zero(twol_max);
  for (int twol = 0; twol <= twol_max; ++twol)
    for (int i = 0; i <= twol; ++i)
      for (int j = 0; j <= twol; ++j) c.blocks[twol](i, j) = rng.cnormal() / double(twol + 1);
  return c;
}

}  // namespace

TEST_CASE("t_samples agree with direct irrep evaluation at the nodes") {
  const Grid grid = make_grid(4);
  for (int twol : {0, 1, 2, 3}) {
    for (int i = 0; i <= twol; ++i)
      for (int j = 0; j <= twol; ++j) {
        const Vec s = grid.t_samples(twol, i, j);
        for (int p = 0; p < grid.n_xi; p += 3)
          for (int q = 0; q < grid.n_xi; q += 2)
            for (int r = 0; r < grid.n_eta; ++r) {
              const int idx = grid.node_index(p, q, r);
              const cd direct = irrep_matrix(twol, grid.node_element(p, q, r))(i, j);
              CHECK(std::abs(s[idx] - direct) < 1e-13);
            }
      }
  }
}

TEST_CASE("forward transform of matrix-entry functions hits a single coefficient") {
  const Grid grid = make_grid(5);
  for (int twol : {0, 1, 2, 3}) {
    const int dim = twol + 1;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        const Coeffs c = grid.forward(grid.t_samples(twol, i, j), 4);
        for (int t = 0; t <= 4; ++t)
          for (int a = 0; a <= t; ++a)
            for (int b = 0; b <= t; ++b) {
              const cd want = (t == twol && a == j && b == i) ? cd(1.0 / dim, 0) : cd(0, 0);
              CHECK(std::abs(c.blocks[t](a, b) - want) < 1e-12);
            }
      }
  }
  // constants land in the trivial block
  const Vec ones = Vec::Constant(grid.n_nodes(), cd(2.5, -1.0));
  const Coeffs c = grid.forward(ones, 3);
  CHECK(std::abs(c.blocks[0](0, 0) - cd(2.5, -1.0)) < 1e-13);
  CHECK(std::abs(plancherel_energy(c) - std::norm(cd(2.5, -1.0))) < 1e-12);
}

TEST_CASE("roundtrip: inverse then forward recovers band-limited coefficients") {
  const Grid grid = make_grid(6);
  RandomStream rng(31);
  for (int it = 0; it < 5; ++it) {
    const Coeffs c = random_coeffs(6, rng);
    const Vec samples = grid.inverse(c);
    const Coeffs back = grid.forward(samples, 6);
    for (int twol = 0; twol <= 6; ++twol)
      CHECK((back.blocks[twol] - c.blocks[twol]).norm() < 1e-12);
    // and samples roundtrip the other way
    const Vec again = grid.inverse(back);
    CHECK((again - samples).norm() < 1e-11 * samples.norm());
  }
}

TEST_CASE("plancherel identity against direct grid integration") {
  const Grid grid = make_grid(6);
  RandomStream rng(32);
  const Coeffs c = random_coeffs(5, rng);
  const Vec f = grid.inverse(c);
  double direct = 0;
  for (int idx = 0; idx < grid.n_nodes(); ++idx) direct += grid.w[idx] * std::norm(f[idx]);
  CHECK(std::abs(direct - plancherel_energy(c)) < 1e-9 * (1.0 + direct));
  CHECK(std::abs(l2_norm(c) - std::sqrt(direct)) < 1e-9);
}

TEST_CASE("inverse_at matches grid samples at nodes and extends off-grid") {
  const Grid grid = make_grid(4);
  RandomStream rng(33);
  const Coeffs c = random_coeffs(3, rng);
  const Vec f = grid.inverse(c);
  for (int p = 0; p < grid.n_xi; p += 2)
    for (int r = 0; r < grid.n_eta; r += 2) {
      const int idx = grid.node_index(p, 1, r);
      CHECK(std::abs(inverse_at(c, grid.node_element(p, 1, r)) - f[idx]) < 1e-11);
    }
  // off-grid smoke: value is finite and reproducible
  const GroupElement g = th::random_group(rng);
  CHECK(std::abs(inverse_at(c, g) - inverse_at(c, g)) == 0.0);
}

TEST_CASE("forward/inverse batch variants agree with singles") {
  const Grid grid = make_grid(5);
  RandomStream rng(34);
  Eigen::MatrixXcd samples(grid.n_nodes(), 3);
  for (int k = 0; k < 3; ++k) samples.col(k) = grid.inverse(random_coeffs(4, rng));
  const auto batch = grid.forward_batch(samples, 4);
  REQUIRE(batch.size() == 3);
  for (int k = 0; k < 3; ++k) {
    const Coeffs single = grid.forward(samples.col(k), 4);
    for (int twol = 0; twol <= 4; ++twol)
      CHECK((batch[k].blocks[twol] - single.blocks[twol]).norm() < 1e-13);
  }
  const Eigen::MatrixXcd recon = grid.inverse_batch(batch);
  CHECK((recon - samples).norm() < 1e-11 * samples.norm());
}

TEST_CASE("field_apply differentiates right translation") {
  const Grid grid = make_grid(5);
  RandomStream rng(35);
  const Coeffs c = random_coeffs(4, rng);
  for (const AlgebraElement& a :
       {AlgebraElement::H(), AlgebraElement(0, cd(0.5, 0), cd(0.5, 0)), th::random_hermitian(rng)}) {
    const Coeffs dc = field_apply(c, a);
    for (int it = 0; it < 4; ++it) {
      const GroupElement g = th::random_group(rng);
      const double h = 1e-5;
      const cd num =
          (inverse_at(c, g * exp_group(a, h)) - inverse_at(c, g * exp_group(a, -h))) / (2.0 * h);
      CHECK(std::abs(num - inverse_at(dc, g)) < 1e-5 * (1.0 + std::abs(num)));
    }
  }
}

TEST_CASE("laplacian: eigenvalue action and sum-of-squares consistency") {
  const Grid grid = make_grid(4);
  RandomStream rng(36);
  const Coeffs c = random_coeffs(4, rng);
  const Coeffs lc = laplacian_apply(c);
  for (int twol = 0; twol <= 4; ++twol)
    CHECK((lc.blocks[twol] - casimir_eigenvalue(twol) * c.blocks[twol]).norm() < 1e-10);

  Coeffs acc = Coeffs::zero(4);
  for (const AlgebraElement& e : casimir_basis()) {
    const Coeffs d2 = field_apply(field_apply(c, e), e);
    for (int twol = 0; twol <= 4; ++twol) acc.blocks[twol] -= d2.blocks[twol];
  }
  for (int twol = 0; twol <= 4; ++twol) CHECK((acc.blocks[twol] - lc.blocks[twol]).norm() < 1e-9);
}

TEST_CASE("sobolev norms") {
  RandomStream rng(37);
  // s=0 reduces to L2
  const Coeffs c = random_coeffs(5, rng);
  CHECK(std::abs(sobolev_norm(c, 0.0) - l2_norm(c)) < 1e-12);
  // matrix entry scaling law
  for (int twol : {1, 3}) {
    Coeffs e = Coeffs::zero(twol);
    e.blocks[twol](0, twol / 2) = 1.0 / double(twol + 1);
    const double base = l2_norm(e);
    for (double s : {-1.0, 0.5, 2.0}) {
      const double want = std::pow(1.0 + casimir_eigenvalue(twol), 0.5 * s) * base;
      CHECK(std::abs(sobolev_norm(e, s) - want) < 1e-12 * want);
    }
  }
}

TEST_CASE("sections: projection, equivariance, torus eigenvalue") {
  const Grid grid = make_grid(6);
  RandomStream rng(38);
  for (int n = -3; n <= 3; ++n) {
    Coeffs c = random_coeffs(6, rng);
    project_section(c, n);
    // idempotent
    Coeffs c2 = c;
    project_section(c2, n);
    for (int twol = 0; twol <= 6; ++twol) CHECK((c2.blocks[twol] - c.blocks[twol]).norm() < 1e-15);
    if (l2_norm(c) < 1e-12) continue;  // parity can wipe everything only if twol range misses n

    // equivariance under the right torus action
    for (int it = 0; it < 6; ++it) {
      const GroupElement g = th::random_group(rng);
      const double t = rng.uniform01();
      const cd lhs = inverse_at(c, g * exp_group(AlgebraElement::H(), t));
      const cd rhs = std::exp(-2.0 * PI * IU * double(n) * t) * inverse_at(c, g);
      CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
    }

    // H acts by -2 pi i n
    const Coeffs hc = field_apply(c, AlgebraElement::H());
    for (int twol = 0; twol <= 6; ++twol)
      CHECK((hc.blocks[twol] + 2.0 * PI * IU * double(n) * c.blocks[twol]).norm() < 1e-10);
  }

  // orthogonal sectors: projecting to m after n kills everything
  for (int n : {-2, 0, 1}) {
    Coeffs c = random_coeffs(5, rng);
    project_section(c, n);
    Coeffs c2 = c;
    project_section(c2, n == 1 ? -1 : n + 1);
    CHECK(l2_norm(c2) < 1e-14);
  }
}

TEST_CASE("coordinate monomials live in the expected sectors") {
  const Grid grid = make_grid(6);
  // alpha^a beta^b is a section of O(-(a+b))
  for (auto [a, b] : {std::pair{1, 0}, std::pair{0, 1}, std::pair{2, 1}, std::pair{1, 2}}) {
    Vec s(grid.n_nodes());
    for (int p = 0; p < grid.n_xi; ++p)
      for (int q = 0; q < grid.n_xi; ++q)
        for (int r = 0; r < grid.n_eta; ++r) {
          const GroupElement g = grid.node_element(p, q, r);
          s[grid.node_index(p, q, r)] = std::pow(g.alpha, a) * std::pow(g.beta, b);
        }
    Coeffs c = grid.forward(s, a + b);
    const double full = l2_norm(c);
    REQUIRE(full > 0.1);
    Coeffs proj = c;
    project_section(proj, -(a + b));
    const Coeffs diff = add(proj, scale(c, -1.0));
    CHECK(l2_norm(diff) < 1e-12);

    Coeffs other = c;
    project_section(other, a + b == 1 ? 1 : 0);
    CHECK(l2_norm(other) < 1e-12);
  }
}

TEST_CASE("random_section lands in one sector and respects the band") {
  RandomStream rng(39);
  for (int n : {-3, -1, 0, 2}) {
    const SectionModel sec = random_section(n, 7, rng);
    CHECK(sec.n == n);
    CHECK(l2_norm(sec.coeffs) > 1e-6);
    Coeffs c = sec.coeffs;
    project_section(c, n);
    const Coeffs diff = add(c, scale(sec.coeffs, -1.0));
    CHECK(l2_norm(diff) < 1e-14);
    const Coeffs hc = field_apply(sec.coeffs, AlgebraElement::H());
    for (int twol = 0; twol < int(hc.blocks.size()); ++twol)
      CHECK((hc.blocks[twol] + 2.0 * PI * IU * double(n) * sec.coeffs.blocks[twol]).norm() < 1e-10);
  }
  // determinism
  RandomStream r1(5), r2(5);
  const SectionModel a = random_section(1, 5, r1), b = random_section(1, 5, r2);
  for (int twol = 0; twol < int(a.coeffs.blocks.size()); ++twol)
    CHECK((a.coeffs.blocks[twol] - b.coeffs.blocks[twol]).norm() == 0.0);
}

TEST_CASE("coefficient json and sample csv roundtrips") {
  const Grid grid = make_grid(4);
  RandomStream rng(40);
  const Coeffs c = random_coeffs(4, rng);
  const Coeffs back = coeffs_from_json(coeffs_to_json(c));
  REQUIRE(back.twol_max == c.twol_max);
  for (int twol = 0; twol <= 4; ++twol) {
    CHECK((back.blocks[twol] - c.blocks[twol]).norm() == 0.0);  // exact decimal roundtrip
  }

  const Vec f = grid.inverse(c);
  const std::string csv = samples_to_csv(grid, f);
  std::istringstream head(csv);
  std::string first;
  std::getline(head, first);
  CHECK(first == "xi1,xi2,eta,re,im");
  const Vec g = samples_from_csv(grid, csv);
  CHECK((g - f).norm() < 1e-12 * f.norm());

  // missing header or truncated rows are parse errors
  CHECK_THROWS_AS(samples_from_csv(grid, "1,2,3,4,5\n"), ParseError);
  std::string truncated = csv.substr(0, csv.size() / 2);
  CHECK_THROWS_AS(samples_from_csv(grid, truncated), ParseError);
}

TEST_CASE("engine wiring: grid bands, cache layout, validation") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "hopf_engine_cache_test";
  fs::remove_all(dir);
  EngineParams p;
  p.twol_max = 4;
  p.twolx_max = 2;
  p.cache_dir = dir.string();
  const Engine eng(p);
  CHECK(eng.twol_grid == 8);   // 4 + max(2,4)
  CHECK(eng.twolx_grid == 4);  // max(2*2, 4)
  CHECK(eng.Y.band == 8);
  CHECK(eng.X.band == 4);
  CHECK(fs::exists(dir / "quadrature_L8.json"));
  CHECK(fs::exists(dir / "quadrature_L4.json"));
  fs::remove_all(dir);

  EngineParams bad = p;
  bad.twol_max = 1;
  bad.bundle = 3;
  CHECK_THROWS_AS(Engine{bad}, DomainError);
  EngineParams bad2 = p;
  bad2.order = 9;
  CHECK_THROWS_AS(Engine{bad2}, DomainError);
  EngineParams bad3 = p;
  bad3.twol_max = -1;
  CHECK_THROWS_AS(Engine{bad3}, DomainError);
}
