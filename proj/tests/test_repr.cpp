#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "helpers.hpp"

#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

using namespace hopf;
using namespace hopf::su2;
using namespace hopf::repr;

TEST_CASE("sym_power is multiplicative and matches small closed forms") {
  RandomStream rng(21);
  for (int twol : {0, 1, 2, 3, 5}) {
    for (int it = 0; it < 10; ++it) {
      Mat2 a, b;
      a << rng.cnormal(), rng.cnormal(), rng.cnormal(), rng.cnormal();
      b << rng.cnormal(), rng.cnormal(), rng.cnormal(), rng.cnormal();
      const Mat pa = sym_power(a, twol), pb = sym_power(b, twol), pab = sym_power(Mat2(a * b), twol);
      CHECK((pab - pa * pb).norm() < 1e-10 * (1.0 + pa.norm() * pb.norm()));
    }
  }
  // twol=1 is the matrix itself
  Mat2 m;
  m << cd(1, 2), cd(0, -1), cd(3, 0), cd(-1, 1);
  CHECK((sym_power(m, 1) - m).norm() < 1e-15);
  // twol=0 is the 1x1 identity
  CHECK(sym_power(m, 0)(0, 0) == cd(1, 0));
}

TEST_CASE("irrep basics: identity, homomorphism, unitarity, torus weights") {
  RandomStream rng(22);
  for (int twol = 0; twol <= 5; ++twol) {
    CHECK((irrep_matrix(twol, GroupElement::identity()) - Mat::Identity(twol + 1, twol + 1)).norm() < 1e-13);
    for (int it = 0; it < 8; ++it) {
      const GroupElement g = th::random_group(rng), h = th::random_group(rng);
      const Mat lg = irrep_matrix(twol, g), lh = irrep_matrix(twol, h);
      CHECK((irrep_matrix(twol, g * h) - lg * lh).norm() < 1e-12);
      CHECK((lg.adjoint() * lg - Mat::Identity(twol + 1, twol + 1)).norm() < 1e-12);
    }
    // exp(tH) acts diagonally with phases e^{2 pi i m t}, m = weight_vector
    const double t = 0.37;
    const Mat d = irrep_matrix(twol, exp_group(AlgebraElement::H(), t));
    const std::vector<int> w = weight_vector(twol);
    for (int k = 0; k <= twol; ++k) {
      CHECK(std::abs(d(k, k) - std::exp(2.0 * PI * IU * double(w[k]) * t)) < 1e-12);
      for (int j = 0; j <= twol; ++j)
        if (j != k) CHECK(std::abs(d(j, k)) < 1e-12);
    }
  }
  // spin-1 torus example
  const Mat d1 = irrep_matrix(2, exp_group(AlgebraElement::H(), 0.1));
  CHECK(std::abs(d1(0, 0) - std::exp(4.0 * PI * IU * 0.1)) < 1e-13);
  CHECK(std::abs(d1(1, 1) - 1.0) < 1e-13);
  CHECK(std::abs(d1(2, 2) - std::exp(-4.0 * PI * IU * 0.1)) < 1e-13);
}

TEST_CASE("derived_rep: ladder entries, differentiation oracle, matrix-exponential oracle") {
  // twol=1 recovers 2 pi i times the defining matrix
  RandomStream rng(23);
  for (int it = 0; it < 10; ++it) {
    const AlgebraElement a = th::random_algebra(rng);
    CHECK((derived_rep(1, a) - 2.0 * PI * IU * a.matrix()).norm() < 1e-13);
  }
  // twol=2, H: diag(2,0,-2) * 2 pi i
  Mat dh = derived_rep(2, AlgebraElement::H());
  Vec want(3);
  want << cd(0, 4 * PI), cd(0, 0), cd(0, -4 * PI);
  CHECK((dh - Mat(want.asDiagonal())).norm() < 1e-13);

  // numerical derivative of the irrep along one-parameter subgroups
  for (int twol : {1, 2, 3, 4}) {
    for (int it = 0; it < 6; ++it) {
      const AlgebraElement a = th::random_hermitian(rng);
      const double h = 1e-5;
      const Mat num =
          (irrep_matrix(twol, exp_group(a, h)) - irrep_matrix(twol, exp_group(a, -h))) / (2.0 * h);
      CHECK((num - derived_rep(twol, a)).norm() < 1e-6 * (1.0 + num.norm()));
    }
  }

  // exact oracle: sym_power(exp_matrix(a,t)) = expm(t * derived_rep(a))
  for (int twol : {1, 2, 3, 5}) {
    for (int it = 0; it < 6; ++it) {
      const AlgebraElement a = th::random_algebra(rng);
      const double t = 0.4 * (rng.uniform01() - 0.5);
      const Mat lhs = sym_power(exp_matrix(a, t), twol);
      const Mat rhs = Mat(t * derived_rep(twol, a)).exp();
      CHECK((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
    }
  }
}

TEST_CASE("derived_rep respects brackets") {
  RandomStream rng(24);
  for (int twol : {1, 2, 3, 4}) {
    for (int it = 0; it < 8; ++it) {
      const AlgebraElement a = th::random_algebra(rng), b = th::random_algebra(rng);
      const Mat da = derived_rep(twol, a), db = derived_rep(twol, b);
      const Mat lhs = da * db - db * da;
      const Mat rhs = 2.0 * PI * IU * derived_rep(twol, commutator(a, b));
      CHECK((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
    }
  }
}

TEST_CASE("casimir eigenvalues") {
  CHECK(casimir_eigenvalue(0) == 0.0);
  // spin 1/2: 3 pi^2
  CHECK(std::abs(casimir_eigenvalue(1) - 3.0 * PI * PI) < 1e-12);
  // ratio law c_l / c_{1/2} = l(l+1)/(3/4)
  for (int twol = 1; twol <= 10; ++twol) {
    const double l = 0.5 * twol;
    CHECK(std::abs(casimir_eigenvalue(twol) / casimir_eigenvalue(1) - l * (l + 1) / 0.75) < 1e-12);
  }
  // monotone increasing, nonnegative
  double prev = -1;
  for (int twol = 0; twol <= 12; ++twol) {
    const double c = casimir_eigenvalue(twol);
    CHECK(c >= 0.0);
    CHECK(c > prev);
    prev = c;
  }
  // direct assembly check against an independent summation at twol=3
  const auto basis = casimir_basis();
  Mat acc = Mat::Zero(4, 4);
  for (const auto& e : basis) {
    const Mat d = derived_rep(3, e);
    acc -= d * d;
  }
  CHECK((acc - casimir_eigenvalue(3) * Mat::Identity(4, 4)).norm() < 1e-10);
}

TEST_CASE("casimir basis is orthonormal for the scaled trace form") {
  const auto basis = casimir_basis();
  REQUIRE(basis.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    // Hermitian check
    const Mat2 m = basis[i].matrix();
    CHECK((m - m.adjoint()).norm() < 1e-15);
    for (size_t j = 0; j < 3; ++j) {
      const cd form = 2.0 * (basis[i].matrix() * basis[j].matrix()).trace();
      CHECK(std::abs(form - (i == j ? 1.0 : 0.0)) < 1e-14);
    }
  }
}

TEST_CASE("spectral weights") {
  CHECK(weight_bracket(0) == 1.0);
  for (int twol = 0; twol <= 8; ++twol) {
    const double c = casimir_eigenvalue(twol);
    CHECK(std::abs(weight_bracket(twol) - std::sqrt(1.0 + c * c)) < 1e-12);
    CHECK(std::abs(lambda_weight(twol) - std::sqrt(1.0 + c)) < 1e-12);
    CHECK(weight_bracket(twol) >= 1.0);
    CHECK(lambda_weight(twol) >= 1.0);
  }
}

TEST_CASE("tensor products") {
  RandomStream rng(25);
  const GroupElement g = th::random_group(rng);
  // trivial factor
  CHECK((tensor_rep(0, 3, g) - irrep_matrix(3, g)).norm() < 1e-13);
  // character identity: chi_{1/2} * chi_{1/2} = chi_1 + chi_0
  for (int it = 0; it < 10; ++it) {
    const GroupElement h = th::random_group(rng);
    const cd lhs = tensor_rep(1, 1, h).trace();
    const cd rhs = irrep_matrix(2, h).trace() + irrep_matrix(0, h).trace();
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
  // homomorphism
  const GroupElement h = th::random_group(rng);
  CHECK((tensor_rep(1, 2, g * h) - tensor_rep(1, 2, g) * tensor_rep(1, 2, h)).norm() < 1e-12);
}

TEST_CASE("irrep table and csv") {
  const auto table = irrep_table(4);
  REQUIRE(table.size() == 5);
  CHECK(table[0].twol == 0);
  CHECK(table[0].dim == 1);
  CHECK(table[2].casimir == casimir_eigenvalue(2));

  const std::string csv = casimir_csv(2, false);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "ell,dim,casimir,weight_bracket");
  std::getline(in, line);
  CHECK(line.rfind("0,1,0,1", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("0.5,2,", 0) == 0);

  const std::string csv2 = casimir_csv(2, true);
  std::istringstream in2(csv2);
  std::getline(in2, line);
  CHECK(line == "ell,dim,casimir,weight_bracket,lambda");
}
