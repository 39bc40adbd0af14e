#include "hopf/operators.hpp"

#include <memory>

namespace hopf::op {

using fourier::Coeffs;
using fourier::Grid;

GridFunction GridFunction::from_samples(const Grid& g, Vec s, int twol_band) {
  if (s.size() != Eigen::Index(g.n_nodes()))
    throw InternalError("grid function: sample count does not match grid");
  GridFunction f;
  f.grid = &g;
  f.twol_band = twol_band;
  f.samples_ = std::move(s);
  return f;
}

GridFunction GridFunction::from_coeffs(const Grid& g, Coeffs c) {
  GridFunction f;
  f.grid = &g;
  f.twol_band = c.twol_max;
  f.coeffs_ = std::move(c);
  return f;
}

GridFunction GridFunction::from_both(const Grid& g, Vec s, Coeffs c) {
  GridFunction f = from_samples(g, std::move(s), c.twol_max);
  f.coeffs_ = std::move(c);
  return f;
}

GridFunction GridFunction::from_t_entry(const Grid& g, int twol, int i, int j) {
  Coeffs c = Coeffs::zero(twol);
  c.blocks[twol](j, i) = 1.0 / double(twol + 1);
  GridFunction f = from_both(g, g.t_samples(twol, i, j), std::move(c));
  f.t_entry = {{twol, i, j}};
  return f;
}

const Vec& GridFunction::samples() const {
  if (!samples_) {
    if (!coeffs_) throw InternalError("grid function holds no representation");
    samples_ = grid->inverse(*coeffs_);
  }
  return *samples_;
}

const Coeffs& GridFunction::coeffs() const {
  if (!coeffs_) {
    if (!samples_) throw InternalError("grid function holds no representation");
    const int out = std::min(twol_band, grid->band);
    if (twol_band > grid->band)
      throw InternalError("grid function band exceeds grid band; transform would alias");
    coeffs_ = grid->forward(*samples_, out);
  }
  return *coeffs_;
}

Coeffs padded(const Coeffs& c, int twol_max) {
  Coeffs out = Coeffs::zero(twol_max);
  for (int twol = 0; twol <= std::min(twol_max, c.twol_max); ++twol) out.blocks[twol] = c.blocks[twol];
  return out;
}

OperatorFn op_identity() {
  return [](const GridFunction& u) { return u; };
}

OperatorFn op_scale(cd s) {
  return [s](const GridFunction& u) {
    if (u.has_samples() && u.has_coeffs())
      return GridFunction::from_both(*u.grid, s * u.samples(), scale(u.coeffs(), s));
    if (u.has_samples()) return GridFunction::from_samples(*u.grid, s * u.samples(), u.twol_band);
    return GridFunction::from_coeffs(*u.grid, scale(u.coeffs(), s));
  };
}

OperatorFn op_field(const su2::AlgebraElement& a) {
  return [a](const GridFunction& u) {
    Coeffs out = field_apply(u.coeffs(), a);
    if (u.t_entry) {
      // D_a t_{ij} = sum_m t_{im} dlambda(a)_{mj}: a short ladder combination
      // of known matrix-entry samples, no transform needed
      const auto [twol, i, j] = *u.t_entry;
      const Mat d = repr::derived_rep(twol, a);
      Vec s = Vec::Zero(u.grid->n_nodes());
      for (int m = std::max(0, j - 1); m <= std::min(twol, j + 1); ++m)
        if (d(m, j) != cd(0, 0)) s += d(m, j) * u.grid->t_samples(twol, i, m);
      return GridFunction::from_both(*u.grid, std::move(s), std::move(out));
    }
    return GridFunction::from_coeffs(*u.grid, std::move(out));
  };
}

OperatorFn op_laplacian() {
  return [](const GridFunction& u) {
    Coeffs out = laplacian_apply(u.coeffs());
    if (u.t_entry && u.has_samples()) {
      // single-frequency input: the Laplacian only scales it
      const Vec s = repr::casimir_eigenvalue((*u.t_entry)[0]) * u.samples();
      return GridFunction::from_both(*u.grid, s, std::move(out));
    }
    return GridFunction::from_coeffs(*u.grid, std::move(out));
  };
}

OperatorFn op_multiply(const Grid& grid, Vec phi_samples, int phi_band) {
  if (phi_samples.size() != Eigen::Index(grid.n_nodes()))
    throw InternalError("multiplier: sample count does not match grid");
  auto phi = std::make_shared<Vec>(std::move(phi_samples));
  return [&grid, phi, phi_band](const GridFunction& u) {
    if (u.grid != &grid) throw InternalError("multiplier grid mismatch");
    const Vec prod = phi->cwiseProduct(u.samples());
    return GridFunction::from_samples(grid, prod, u.twol_band + phi_band);
  };
}

OperatorFn op_sum(OperatorFn a, OperatorFn b) {
  return [a = std::move(a), b = std::move(b)](const GridFunction& u) {
    const GridFunction fa = a(u), fb = b(u);
    const int band = std::max(fa.twol_band, fb.twol_band);
    if (fa.has_samples() && fb.has_samples())
      return GridFunction::from_samples(*fa.grid, fa.samples() + fb.samples(), band);
    if (fa.has_coeffs() && fb.has_coeffs() && fa.coeffs().twol_max == fb.coeffs().twol_max)
      return GridFunction::from_coeffs(*fa.grid, add(fa.coeffs(), fb.coeffs()));
    return GridFunction::from_samples(*fa.grid, fa.samples() + fb.samples(), band);
  };
}

OperatorFn op_scaled(cd s, OperatorFn a) { return compose_ops(op_scale(s), std::move(a)); }

OperatorFn compose_ops(OperatorFn outer, OperatorFn inner) {
  return [outer = std::move(outer), inner = std::move(inner)](const GridFunction& u) {
    return outer(inner(u));
  };
}

}  // namespace hopf::op
