#pragma once

#include "hopf/symbol.hpp"

namespace hopf::calc {

// Asymptotic expansion: terms[j] has analytic order top_order - j.
struct GradedSymbol {
  double top_order = 0;
  std::vector<sym::Symbol> terms;

  sym::Symbol collapse(const fourier::Engine& eng) const;  // plain sum
};

// composition within the calculus, truncated at |alpha| <= order:
// sum (1/alpha!) (Delta^alpha a) (dual_alpha b), quantizing Op(a) Op(b)
sym::Symbol compose(const fourier::Engine& eng, const sym::Symbol& a, const sym::Symbol& b, int order);

// pointwise inverse of a symbol block-by-block on the x grid; reports the
// worst conditioning through *condition when given. Throws EllipticityError
// naming the frequency and node where inversion degenerates.
sym::Symbol pointwise_inverse(const fourier::Engine& eng, const sym::Symbol& a,
                              double* condition = nullptr);

// left parametrix of a graded symbol: Op(result) Op(a) = I modulo lower order;
// result has n_terms+1 grades, principal order -a.top_order
GradedSymbol parametrix(const fourier::Engine& eng, const GradedSymbol& a, int n_terms);

// order-r stratum of the composition defect: sum_{|alpha|=r} (1/alpha!)
// (Delta^alpha a)(dual_alpha b)
sym::Symbol composition_stratum(const fourier::Engine& eng, const sym::Symbol& a,
                                const sym::Symbol& b, int r);

// inverse within the calculus as a graded expansion (corrections via strata)
GradedSymbol calculus_inverse(const fourier::Engine& eng, const sym::Symbol& a, int n_terms);

// f(z, k) = k-th derivative of f at z
using SpectralFn = std::function<cd(cd, int)>;

// canonical node order + confluent grouping; returns Newton coefficients
// c_k for p(x) = sum_k c_k prod_{i<k} (x - nodes[i]) over the sorted nodes
std::vector<cd> newton_coefficients(const SpectralFn& f, std::vector<cd> nodes,
                                    std::vector<cd>* sorted_nodes = nullptr);
cd divided_difference(const SpectralFn& f, std::vector<cd> nodes);

// spectral functional calculus for invariant symbols with Hermitian blocks
sym::Symbol functional_calculus_spectral(const fourier::Engine& eng, const sym::Symbol& a,
                                         const SpectralFn& f, double herm_tol = 1e-10);
// series route: Newton-form matrix polynomial through each block's eigenvalue
// nodes plus correction strata up to the given order
sym::Symbol functional_calculus_series(const fourier::Engine& eng, const sym::Symbol& a,
                                       const SpectralFn& f, int order);

sym::Symbol heat_symbol(const fourier::Engine& eng, double t);  // exp(-t Laplacian)
fourier::Coeffs heat_evolve(const fourier::Engine& eng, const fourier::Coeffs& u, double t);
sym::Symbol resolvent_symbol(const fourier::Engine& eng, const sym::Symbol& a, cd z);

}  // namespace hopf::calc
