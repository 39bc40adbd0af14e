#include "hopf/repr.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace hopf::repr {

Mat sym_power(const Mat2& g, int twol) {
  if (twol < 0) throw DomainError("sym_power: negative spin");
  const int n = twol, dim = twol + 1;
  const cd a = g(0, 0), b = g(0, 1), c = g(1, 0), d = g(1, 1);
  Mat out = Mat::Zero(dim, dim);
  // column k: (a e1 + c e2)^(n-k) (b e1 + d e2)^k expanded on monomials e1^(n-j) e2^j
  for (int k = 0; k <= n; ++k) {
    // powers of a,c up to n-k and b,d up to k
    std::vector<cd> ap(n - k + 1), cp(n - k + 1), bp(k + 1), dp(k + 1);
    ap[0] = cp[0] = bp[0] = dp[0] = 1.0;
    for (int i = 1; i <= n - k; ++i) {
      ap[i] = ap[i - 1] * a;
      cp[i] = cp[i - 1] * c;
    }
    for (int i = 1; i <= k; ++i) {
      bp[i] = bp[i - 1] * b;
      dp[i] = dp[i - 1] * d;
    }
    for (int j = 0; j <= n; ++j) {
      cd s = 0.0;
      // j = p + q with p from the first factor, q from the second
      const int plo = std::max(0, j - k), phi = std::min(n - k, j);
      for (int p = plo; p <= phi; ++p) {
        const int q = j - p;
        s += binomial(n - k, p) * ap[n - k - p] * cp[p] * binomial(k, q) * bp[k - q] * dp[q];
      }
      out(j, k) = s * std::sqrt(binomial(n, k) / binomial(n, j));
    }
  }
  return out;
}

std::vector<int> weight_vector(int twol) {
  std::vector<int> m(twol + 1);
  for (int k = 0; k <= twol; ++k) m[k] = twol - 2 * k;
  return m;
}

Mat derived_rep(int twol, const su2::AlgebraElement& alg) {
  const Mat2 m2 = (2.0 * PI * IU) * alg.matrix();
  const cd a = m2(0, 0), b = m2(0, 1), c = m2(1, 0), d = m2(1, 1);
  const int n = twol, dim = twol + 1;
  Mat out = Mat::Zero(dim, dim);
  for (int k = 0; k <= n; ++k) {
    out(k, k) = double(n - k) * a + double(k) * d;
    if (k + 1 <= n) out(k + 1, k) = c * std::sqrt(double(n - k) * (k + 1));
    if (k - 1 >= 0) out(k - 1, k) = b * std::sqrt(double(k) * (n - k + 1));
  }
  return out;
}

std::array<su2::AlgebraElement, 3> casimir_basis() {
  using su2::AlgebraElement;
  // sigma_x/2, sigma_y/2, sigma_z/2 in the (H, X, Y) coordinates
  return {AlgebraElement(0.0, 0.5, 0.5), AlgebraElement(0.0, cd(0, -0.5), cd(0, 0.5)),
          AlgebraElement(0.5, 0.0, 0.0)};
}

double casimir_eigenvalue(int twol) {
  static std::map<int, double> cache;
  if (auto it = cache.find(twol); it != cache.end()) return it->second;
  const auto basis = casimir_basis();
  const int dim = twol + 1;
  Mat cas = Mat::Zero(dim, dim);
  for (const auto& a : basis) {
    const Mat d = derived_rep(twol, a);
    cas -= d * d;
  }
  const double scale = std::max(1.0, cas.norm());
  double diag_min = cas(0, 0).real(), diag_max = diag_min, offdiag = 0.0, imag_max = 0.0;
  for (int i = 0; i < dim; ++i) {
    diag_min = std::min(diag_min, cas(i, i).real());
    diag_max = std::max(diag_max, cas(i, i).real());
    imag_max = std::max(imag_max, std::abs(cas(i, i).imag()));
    for (int j = 0; j < dim; ++j)
      if (i != j) offdiag = std::max(offdiag, std::abs(cas(i, j)));
  }
  if (offdiag > 1e-11 * scale || (diag_max - diag_min) > 1e-11 * scale || imag_max > 1e-11 * scale)
    throw InternalError("casimir_eigenvalue: assembled operator is not scalar at twol=" +
                        std::to_string(twol));
  double c = 0.0;
  for (int i = 0; i < dim; ++i) c += cas(i, i).real();
  c /= dim;
  cache[twol] = c;
  return c;
}

double weight_bracket(int twol) {
  const double c = casimir_eigenvalue(twol);
  return std::sqrt(1.0 + c * c);
}

double lambda_weight(int twol) { return std::sqrt(1.0 + casimir_eigenvalue(twol)); }

Mat tensor_rep(int twol1, int twol2, const su2::GroupElement& g) {
  const Mat m1 = irrep_matrix(twol1, g);
  const Mat m2 = irrep_matrix(twol2, g);
  Mat out(m1.rows() * m2.rows(), m1.cols() * m2.cols());
  for (int i = 0; i < m1.rows(); ++i)
    for (int j = 0; j < m1.cols(); ++j)
      out.block(i * m2.rows(), j * m2.cols(), m2.rows(), m2.cols()) = m1(i, j) * m2;
  return out;
}

std::vector<IrrepInfo> irrep_table(int twol_max) {
  std::vector<IrrepInfo> t;
  for (int twol = 0; twol <= twol_max; ++twol)
    t.push_back({twol, twol + 1, casimir_eigenvalue(twol), weight_bracket(twol), lambda_weight(twol)});
  return t;
}

std::string casimir_csv(int twol_max, bool with_lambda) {
  std::ostringstream os;
  os.precision(17);
  os << "ell,dim,casimir,weight_bracket";
  if (with_lambda) os << ",lambda";
  os << "\n";
  for (const auto& r : irrep_table(twol_max)) {
    os << ell_string(r.twol) << "," << r.dim << "," << r.casimir << "," << r.weight_bracket;
    if (with_lambda) os << "," << r.lambda;
    os << "\n";
  }
  return os.str();
}

}  // namespace hopf::repr
