#pragma once

#include <array>
#include <functional>

#include "hopf/operators.hpp"

namespace hopf::sym {

// Multi-index over the coordinate functions (q00, q01, q10, q11),
// q_ab = t^{1/2}_ab - delta_ab. The dual-derivative lattice uses only the
// first three (the fourth is functionally dependent near the identity).
using MultiIndex = std::array<int, 4>;
int mi_total(const MultiIndex& a);
double mi_factorial(const MultiIndex& a);

// Matrix-valued symbol sigma(l, x): for each fiber frequency twol a
// (twol+1)x(twol+1) matrix depending on the base point x through a finite
// x-frequency expansion. Storage: xc[twol] has one row per x-slot
// (twolx, s, r) and one column per fiber entry (i, j) flattened i*dim+j; the
// slot row holds the x-Fourier coefficient C(twolx)_{sr} of that entry, so
//   sigma(l, x)_{ij} = sum_slots (twolx+1) t^{twolx}_{rs}(x) xc[twol](slot, i*dim+j).
struct Symbol {
  int twol_max = -1;
  int twolx_max = 0;
  int twol_reliable = -1;   // blocks with twol <= twol_reliable are trusted
  double analytic_order = 0;
  std::vector<Eigen::MatrixXcd> xc;

  static Symbol zero(int twol_max, int twolx_max);
  bool invariant() const { return twolx_max == 0; }
};

int n_slots(int twolx_max);
int slot_index(int twolx, int s, int r);
struct SlotId {
  int twolx, s, r;
};
SlotId slot_id(int slot);

Symbol sym_add(const Symbol& a, const Symbol& b);
Symbol sym_scale(const Symbol& a, cd s);
// sigma(l,x) -> g * sigma(l,x) resp. sigma(l,x) * g for a fixed matrix g
void block_lmul(Symbol& a, int twol, const Mat& g);
void block_rmul(Symbol& a, int twol, const Mat& g);
Mat evaluate(const Symbol& a, int twol, const su2::GroupElement& x);
double max_block_norm(const fourier::Engine& eng, const Symbol& a, int twol);  // max over x nodes of op norm

// constructors for the basic operator families
Symbol identity_symbol(const fourier::Engine& eng);
Symbol laplacian_symbol(const fourier::Engine& eng);
Symbol field_symbol(const fourier::Engine& eng, const su2::AlgebraElement& a);
Symbol invariant_symbol(const fourier::Engine& eng, const std::function<Mat(int twol)>& block);
// multiplication by phi, given through its x-Fourier coefficients
Symbol mult_symbol(const fourier::Engine& eng, const fourier::Coeffs& phi_hat);

// x-side evaluation/projection on the small grid: rows = x nodes, cols = fiber entries
Eigen::MatrixXcd x_samples(const fourier::Engine& eng, const Symbol& a, int twol);
void set_from_x_samples(const fourier::Engine& eng, Symbol& a, int twol,
                        const Eigen::Ref<const Eigen::MatrixXcd>& samples, int twolx_out);

// quantization: apply Op(sigma) to u given by Peter-Weyl coefficients
fourier::Coeffs op_apply(const fourier::Engine& eng, const Symbol& a, const fourier::Coeffs& u);

// full symbol of a black-box operator; throws PrecisionError if more than
// oob_tol of some entry's energy lies above x-band twolx_out
Symbol symbol_of_operator(const fourier::Engine& eng, const op::OperatorFn& fn, int twolx_out,
                          double oob_tol = 1e-8);

// base-space derivative D_a in x (left-invariant field acting on the x slot)
Symbol x_field(const fourier::Engine& eng, const Symbol& a, const su2::AlgebraElement& v);
// exact symbol of D_v composed with Op(a): dlambda(v) a + D_v^x a
Symbol leibniz_field(const fourier::Engine& eng, const su2::AlgebraElement& v, const Symbol& a);
// pointwise product sigma(l,x) tau(l,x)
Symbol x_product(const fourier::Engine& eng, const Symbol& a, const Symbol& b);

// difference operators on the fiber-frequency side. The kernel samples of a
// symbol (one column per x-slot) can be formed once and reused across indices.
Eigen::MatrixXcd kernel_samples(const fourier::Engine& eng, const Symbol& a);
Symbol diff_from_kernels(const fourier::Engine& eng, const Symbol& a,
                         const Eigen::Ref<const Eigen::MatrixXcd>& kernels, const MultiIndex& alpha);
Symbol diff_q(const fourier::Engine& eng, const Symbol& a, const MultiIndex& alpha);
// same first-order operator obtained through the defining pairing with
// t^{1/2} tensor blocks (independent route used for cross-checks)
Symbol diff_abstract(const fourier::Engine& eng, const Symbol& a, int qi, int qj);

// dual derivatives: operator monomials X^beta = D_H^b1 D_X^b2 D_Y^b3 combined
// so that (dual_alpha q^gamma)(e) = alpha! delta_{alpha gamma} on the lattice
struct DualBasis {
  int order = 0;
  std::vector<MultiIndex> alphas;           // graded, alpha[3] == 0
  std::vector<std::array<int, 3>> betas;    // graded
  Eigen::MatrixXcd coeff;                   // row alpha, column beta
  int rank = 0;
};
// the coefficients depend on the lattice truncation, so the basis order is
// explicit; -1 means max(engine order, |alpha|)
const DualBasis& dual_basis(const fourier::Engine& eng, int order);
// matrix of the dual derivative acting on x-frequency twolx (left factor on slots)
Mat dual_deriv_matrix(const fourier::Engine& eng, const MultiIndex& alpha, int twolx,
                      int basis_order = -1);
Symbol x_dual_derivative(const fourier::Engine& eng, const Symbol& a, const MultiIndex& alpha,
                         int basis_order = -1);

// least-squares slope of log max-node operator norm against log spectral weight
double estimate_order(const fourier::Engine& eng, const Symbol& a, int twol_lo = -1, int twol_hi = -1);

}  // namespace hopf::sym
