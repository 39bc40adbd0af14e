#pragma once

#include <array>
#include <vector>

#include "hopf/su2.hpp"

namespace hopf::repr {

// Sym^twol of an arbitrary 2x2 matrix in the orthonormal basis
// v_k = sqrt(C(twol,k)) e1^(twol-k) e2^k. For g in SU(2) this is the spin-
// (twol/2) irrep matrix; it is multiplicative for any pair of 2x2 matrices.
Mat sym_power(const Mat2& g, int twol);

inline Mat irrep_matrix(int twol, const su2::GroupElement& g) {
  if (twol < 0) throw DomainError("irrep_matrix: negative spin");
  return sym_power(g.matrix(), twol);
}

// T-weights of the basis vectors: m_k = twol - 2k, so that
// irrep(exp(tH)) = diag(e^{2 pi i m_k t}).
std::vector<int> weight_vector(int twol);

// Derivative at t=0 of t -> irrep_matrix(twol, exp(tA)) with exp(tA)=e^{2 pi i t A};
// the 2 pi i of that convention is folded in. Ladder form, exact.
Mat derived_rep(int twol, const su2::AlgebraElement& a);

// Orthonormal basis of su(2)-directions used for the Laplacian, Hermitian so
// that exp_group stays unitary: sigma_x/2, sigma_y/2, sigma_z/2 (orthonormal
// for the bi-invariant form B(A,B) = 2 tr(AB)).
std::array<su2::AlgebraElement, 3> casimir_basis();

// Assembles -sum_j derived_rep(twol, X_j)^2, verifies it is scalar, returns the
// scalar. Values are memoized. Throws InternalError if the matrix is not scalar.
double casimir_eigenvalue(int twol);

// <ell> = sqrt(1 + c_ell^2)  (the Japanese-bracket weight of the Casimir), and
// Lambda(ell) = sqrt(1 + c_ell)  (the classical first-order scale used for
// order regressions).
double weight_bracket(int twol);
double lambda_weight(int twol);

// Kronecker product irrep(twol1) (x) irrep(twol2).
Mat tensor_rep(int twol1, int twol2, const su2::GroupElement& g);

struct IrrepInfo {
  int twol;
  int dim;
  double casimir;
  double weight_bracket;
  double lambda;
};
std::vector<IrrepInfo> irrep_table(int twol_max);

// CSV emission: "ell,dim,casimir,weight_bracket" plus optional trailing
// "lambda" column.
std::string casimir_csv(int twol_max, bool with_lambda);

}  // namespace hopf::repr
