#pragma once

#include <functional>
#include <optional>

#include "hopf/fourier.hpp"

namespace hopf::op {

// A function on the group carried on a fixed sampling grid, in whichever
// representation(s) are currently known. `twol_band` bounds the Peter-Weyl
// content; conversions are computed on demand and cached.
struct GridFunction {
  const fourier::Grid* grid = nullptr;
  int twol_band = 0;

  // set when the function is exactly a matrix-entry t^twol_{ij}; lets
  // transform-side operators return samples without a grid transform
  std::optional<std::array<int, 3>> t_entry;

  static GridFunction from_samples(const fourier::Grid& g, Vec s, int twol_band);
  static GridFunction from_coeffs(const fourier::Grid& g, fourier::Coeffs c);
  // both representations already known (e.g. matrix-entry functions)
  static GridFunction from_both(const fourier::Grid& g, Vec s, fourier::Coeffs c);
  static GridFunction from_t_entry(const fourier::Grid& g, int twol, int i, int j);

  bool has_samples() const { return samples_.has_value(); }
  bool has_coeffs() const { return coeffs_.has_value(); }

  const Vec& samples() const;
  const fourier::Coeffs& coeffs() const;

 private:
  mutable std::optional<Vec> samples_;
  mutable std::optional<fourier::Coeffs> coeffs_;
};

// zero-pad or truncate to a block list of the requested size
fourier::Coeffs padded(const fourier::Coeffs& c, int twol_max);

using OperatorFn = std::function<GridFunction(const GridFunction&)>;

OperatorFn op_identity();
OperatorFn op_scale(cd s);
OperatorFn op_field(const su2::AlgebraElement& a);
OperatorFn op_laplacian();
OperatorFn op_multiply(const fourier::Grid& grid, Vec phi_samples, int phi_band);
OperatorFn op_sum(OperatorFn a, OperatorFn b);
OperatorFn op_scaled(cd s, OperatorFn a);
OperatorFn compose_ops(OperatorFn outer, OperatorFn inner);

}  // namespace hopf::op
