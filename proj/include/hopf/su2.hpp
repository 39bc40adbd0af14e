#pragma once

#include <optional>
#include <vector>

#include "hopf/common.hpp"

namespace hopf::su2 {

// Point of SU(2) stored as (alpha, beta); the matrix [[a,-conj(b)],[b,conj(a)]]
// is derived on demand.
struct GroupElement {
  cd alpha{1.0, 0.0};
  cd beta{0.0, 0.0};

  GroupElement() = default;
  GroupElement(cd a, cd b);  // renormalizes |a|^2+|b|^2 to 1

  static GroupElement identity() { return GroupElement(); }

  Mat2 matrix() const {
    Mat2 m;
    m << alpha, -std::conj(beta), beta, std::conj(alpha);
    return m;
  }
  GroupElement inverse() const;
  double unitarity_defect() const;  // ||g g* - I||
};

GroupElement from_angles(double xi1, double xi2, double eta);
GroupElement multiply(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);
inline GroupElement operator*(const GroupElement& g, const GroupElement& h) { return multiply(g, h); }

// Distance to the identity in Frobenius norm of the fundamental matrix.
double dist_to_identity(const GroupElement& g);

// Element A = h*H + x*X + y*Y of the complexified Lie algebra, H=[[1,0],[0,-1]],
// X=[[0,1],[0,0]], Y=[[0,0],[1,0]].
struct AlgebraElement {
  cd h{0.0, 0.0}, x{0.0, 0.0}, y{0.0, 0.0};

  AlgebraElement() = default;
  AlgebraElement(cd h_, cd x_, cd y_) : h(h_), x(x_), y(y_) {}

  static AlgebraElement H() { return {1.0, 0.0, 0.0}; }
  static AlgebraElement X() { return {0.0, 1.0, 0.0}; }
  static AlgebraElement Y() { return {0.0, 0.0, 1.0}; }

  Mat2 matrix() const {
    Mat2 m;
    m << h, x, y, -h;
    return m;
  }
  AlgebraElement operator+(const AlgebraElement& o) const { return {h + o.h, x + o.x, y + o.y}; }
  AlgebraElement operator*(cd c) const { return {c * h, c * x, c * y}; }
};

// Matrix commutator [A,B] = AB - BA as an AlgebraElement (sl2 closes under it).
AlgebraElement commutator(const AlgebraElement& a, const AlgebraElement& b);

// exp(2*pi*i*t*M) for traceless 2x2 M, closed form with a series fallback near
// delta = 0; equals the literal power series to machine precision.
Mat2 exp2_traceless(const Mat2& m);

// exp(tA) = e^{2 pi i t A} as a raw 2x2 matrix (always defined).
Mat2 exp_matrix(const AlgebraElement& a, double t);

// Same, coerced to a GroupElement; throws DomainError when the result is not
// in SU(2) (message carries the unitarity defect and the raw matrix).
GroupElement exp_group(const AlgebraElement& a, double t);

// Gauss-Legendre nodes/weights on [0,1] with unit weight function.
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Tensor-product Haar rule. band is in twol units (= 2L): 2*band+1 uniform
// points in each xi, band+1 Gauss-Legendre points in s = sin^2(eta).
// Node layout is (p, q, r) -> (p*n_xi + q)*n_eta + r.
struct QuadratureRule {
  int band = 0;  // twol units
  int n_xi = 0, n_eta = 0;
  std::vector<double> xi;     // n_xi values p/n_xi
  std::vector<double> eta;    // n_eta values asin(sqrt(s_r))
  std::vector<double> w_eta;  // n_eta weights, sum normalized to 1

  std::size_t n_nodes() const { return std::size_t(n_xi) * n_xi * n_eta; }
  std::size_t node_index(int p, int q, int r) const {
    return (std::size_t(p) * n_xi + q) * n_eta + r;
  }
  GroupElement node_element(int p, int q, int r) const { return from_angles(xi[p], xi[q], eta[r]); }
  double node_weight(int p, int q, int r) const {
    (void)p;
    (void)q;
    return w_eta[r] / (double(n_xi) * n_xi);
  }
  // Flattened per-node weights in node_index order.
  Eigen::VectorXd node_weights() const;
};

QuadratureRule build_quadrature(int band);

// JSON-cached variant; cache_dir/"quadrature_L<band>.json". Corrupt or
// mismatched cache entries are rebuilt and overwritten.
QuadratureRule load_or_build_quadrature(int band, const std::string& cache_dir);

// Resolves the cache directory: explicit arg > HOPF_PDO_CACHE > "cache".
std::string resolve_cache_dir(const std::string& explicit_dir);

}  // namespace hopf::su2
