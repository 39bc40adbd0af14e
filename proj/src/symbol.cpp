#include "hopf/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace hopf::sym {

using fourier::Coeffs;
using fourier::Engine;
using fourier::Grid;
using su2::AlgebraElement;
using su2::GroupElement;

int mi_total(const MultiIndex& a) { return a[0] + a[1] + a[2] + a[3]; }

double mi_factorial(const MultiIndex& a) {
  return factorial(a[0]) * factorial(a[1]) * factorial(a[2]) * factorial(a[3]);
}

int n_slots(int twolx_max) {
  const int n = twolx_max + 1;  // sum of squares 1..n
  return n * (n + 1) * (2 * n + 1) / 6;
}

int slot_index(int twolx, int s, int r) {
  return n_slots(twolx - 1) + s * (twolx + 1) + r;
}

SlotId slot_id(int slot) {
  int twolx = 0;
  while (n_slots(twolx) <= slot) ++twolx;
  const int off = slot - n_slots(twolx - 1);
  return {twolx, off / (twolx + 1), off % (twolx + 1)};
}

namespace {

Mat block_at(const Symbol& a, int twol, int slot) {
  const int dim = twol + 1;
  Mat m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = a.xc[twol](slot, i * dim + j);
  return m;
}

void block_to_row(Symbol& a, int twol, int slot, const Mat& m) {
  const int dim = twol + 1;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a.xc[twol](slot, i * dim + j) = m(i, j);
}

double op_norm(const Mat& m) {
  if (m.rows() == 1) return std::abs(m(0, 0));
  return m.jacobiSvd().singularValues()(0);
}

// (twolx+1) t^{twolx}_{rs} sampled on the x grid, one column per slot;
// deterministic per grid band, shared across engines
const Eigen::MatrixXcd& slot_eval_matrix(const Engine& eng) {
  static std::map<int, Eigen::MatrixXcd> cache;
  auto it = cache.find(eng.twolx_grid);
  if (it != cache.end()) return it->second;
  const Grid& X = eng.X;
  Eigen::MatrixXcd T(X.n_nodes(), n_slots(eng.twolx_grid));
  for (int twolx = 0; twolx <= eng.twolx_grid; ++twolx)
    for (int s = 0; s <= twolx; ++s)
      for (int r = 0; r <= twolx; ++r)
        T.col(slot_index(twolx, s, r)) = double(twolx + 1) * X.t_samples(twolx, r, s);
  return cache.emplace(eng.twolx_grid, std::move(T)).first->second;
}

}  // namespace

Symbol Symbol::zero(int twol_max, int twolx_max) {
  if (twol_max < 0 || twolx_max < 0) throw InternalError("symbol: negative band");
  Symbol a;
  a.twol_max = twol_max;
  a.twolx_max = twolx_max;
  a.twol_reliable = twol_max;
  a.xc.resize(twol_max + 1);
  for (int t = 0; t <= twol_max; ++t)
    a.xc[t] = Eigen::MatrixXcd::Zero(n_slots(twolx_max), (t + 1) * (t + 1));
  return a;
}

Symbol sym_add(const Symbol& a, const Symbol& b) {
  Symbol out = Symbol::zero(std::min(a.twol_max, b.twol_max), std::max(a.twolx_max, b.twolx_max));
  out.twol_reliable = std::min(a.twol_reliable, b.twol_reliable);
  out.analytic_order = std::max(a.analytic_order, b.analytic_order);
  for (int t = 0; t <= out.twol_max; ++t) {
    out.xc[t].topRows(a.xc[t].rows()) = a.xc[t];
    out.xc[t].topRows(b.xc[t].rows()) += b.xc[t];
  }
  return out;
}

Symbol sym_scale(const Symbol& a, cd s) {
  Symbol out = a;
  for (auto& m : out.xc) m *= s;
  return out;
}

void block_lmul(Symbol& a, int twol, const Mat& g) {
  for (int slot = 0; slot < a.xc[twol].rows(); ++slot)
    block_to_row(a, twol, slot, g * block_at(a, twol, slot));
}

void block_rmul(Symbol& a, int twol, const Mat& g) {
  for (int slot = 0; slot < a.xc[twol].rows(); ++slot)
    block_to_row(a, twol, slot, block_at(a, twol, slot) * g);
}

Mat evaluate(const Symbol& a, int twol, const GroupElement& x) {
  const int dim = twol + 1;
  Eigen::RowVectorXcd w(n_slots(a.twolx_max));
  for (int twolx = 0; twolx <= a.twolx_max; ++twolx) {
    const Mat lam = repr::irrep_matrix(twolx, x);
    for (int s = 0; s <= twolx; ++s)
      for (int r = 0; r <= twolx; ++r) w(slot_index(twolx, s, r)) = double(twolx + 1) * lam(r, s);
  }
  const Eigen::RowVectorXcd flat = w * a.xc[twol];
  Mat m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = flat(i * dim + j);
  return m;
}

double max_block_norm(const Engine& eng, const Symbol& a, int twol) {
  if (a.invariant()) return op_norm(block_at(a, twol, 0));
  const Eigen::MatrixXcd s = x_samples(eng, a, twol);
  const int dim = twol + 1;
  double best = 0;
  Mat m(dim, dim);
  for (Eigen::Index node = 0; node < s.rows(); ++node) {
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m(i, j) = s(node, i * dim + j);
    best = std::max(best, op_norm(m));
  }
  return best;
}

Symbol invariant_symbol(const Engine& eng, const std::function<Mat(int twol)>& block) {
  Symbol a = Symbol::zero(eng.p.twol_max, 0);
  for (int t = 0; t <= a.twol_max; ++t) {
    const Mat m = block(t);
    if (m.rows() != t + 1 || m.cols() != t + 1) throw InternalError("invariant symbol: bad block shape");
    block_to_row(a, t, 0, m);
  }
  return a;
}

Symbol identity_symbol(const Engine& eng) {
  Symbol a = invariant_symbol(eng, [](int t) { return Mat::Identity(t + 1, t + 1); });
  a.analytic_order = 0;
  return a;
}

Symbol laplacian_symbol(const Engine& eng) {
  Symbol a = invariant_symbol(
      eng, [](int t) { return Mat(repr::casimir_eigenvalue(t) * Mat::Identity(t + 1, t + 1)); });
  a.analytic_order = 2;
  return a;
}

Symbol field_symbol(const Engine& eng, const AlgebraElement& v) {
  Symbol a = invariant_symbol(eng, [&](int t) { return repr::derived_rep(t, v); });
  a.analytic_order = 1;
  return a;
}

Symbol mult_symbol(const Engine& eng, const Coeffs& phi_hat) {
  if (phi_hat.twol_max > eng.twolx_grid)
    throw DomainError("multiplier x-band exceeds the x grid");
  Symbol a = Symbol::zero(eng.p.twol_max, phi_hat.twol_max);
  for (int t = 0; t <= a.twol_max; ++t) {
    const int dim = t + 1;
    for (int twolx = 0; twolx <= phi_hat.twol_max; ++twolx)
      for (int s = 0; s <= twolx; ++s)
        for (int r = 0; r <= twolx; ++r) {
          const cd v = phi_hat.blocks[twolx](s, r);
          if (v == cd(0, 0)) continue;
          const int slot = slot_index(twolx, s, r);
          for (int i = 0; i < dim; ++i) a.xc[t](slot, i * dim + i) = v;
        }
  }
  a.analytic_order = 0;
  return a;
}

Eigen::MatrixXcd x_samples(const Engine& eng, const Symbol& a, int twol) {
  if (a.twolx_max > eng.twolx_grid) throw InternalError("symbol x-band exceeds the x grid");
  const Eigen::MatrixXcd& T = slot_eval_matrix(eng);
  return T.leftCols(n_slots(a.twolx_max)) * a.xc[twol];
}

void set_from_x_samples(const Engine& eng, Symbol& a, int twol,
                        const Eigen::Ref<const Eigen::MatrixXcd>& samples, int twolx_out) {
  if (twolx_out > a.twolx_max) throw InternalError("set_from_x_samples: band exceeds symbol storage");
  const auto cs = eng.X.forward_batch(samples, twolx_out);
  for (int col = 0; col < samples.cols(); ++col)
    for (int twolx = 0; twolx <= twolx_out; ++twolx)
      for (int s = 0; s <= twolx; ++s)
        for (int r = 0; r <= twolx; ++r)
          a.xc[twol](slot_index(twolx, s, r), col) = cs[col].blocks[twolx](s, r);
}

Coeffs op_apply(const Engine& eng, const Symbol& a, const Coeffs& u) {
  const int tm = std::min(a.twol_max, u.twol_max);
  if (a.invariant()) {
    Coeffs out = Coeffs::zero(tm);
    for (int t = 0; t <= tm; ++t) out.blocks[t] = block_at(a, t, 0) * u.blocks[t];
    return out;
  }
  const Grid& Y = eng.Y;
  const int content = tm + a.twolx_max;
  const int out_band = std::min(content, std::min(eng.twol_grid, 2 * eng.twol_grid - content));
  Vec acc = Vec::Zero(Y.n_nodes());
  for (int slot = 0; slot < n_slots(a.twolx_max); ++slot) {
    Coeffs w = Coeffs::zero(tm);
    bool nonzero = false;
    for (int t = 0; t <= tm; ++t) {
      w.blocks[t] = block_at(a, t, slot) * u.blocks[t];
      nonzero = nonzero || w.blocks[t].cwiseAbs().maxCoeff() > 0;
    }
    if (!nonzero) continue;
    const auto id = slot_id(slot);
    acc += double(id.twolx + 1) * Y.t_samples(id.twolx, id.r, id.s).cwiseProduct(Y.inverse(w));
  }
  return Y.forward(acc, out_band);
}

Symbol symbol_of_operator(const Engine& eng, const op::OperatorFn& fn, int twolx_out,
                          double oob_tol) {
  if (twolx_out < 0 || twolx_out > eng.twolx_grid)
    throw DomainError("symbol extraction: x-band out of range");
  const Grid& Y = eng.Y;
  const int tm = eng.p.twol_max;
  const Eigen::Index n = Y.n_nodes();
  Symbol out = Symbol::zero(tm, twolx_out);

  for (int t = 0; t <= tm; ++t) {
    const int dim = t + 1;
    // all matrix-entry samples of this frequency, col k*dim+i = t_{ki}
    Eigen::MatrixXcd ts(n, dim * dim);
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i) ts.col(k * dim + i) = Y.t_samples(t, k, i);

    Eigen::MatrixXcd sig = Eigen::MatrixXcd::Zero(n, dim * dim);
    for (int j = 0; j < dim; ++j) {
      std::vector<Vec> w(dim);
      for (int k = 0; k < dim; ++k) {
        Coeffs c = Coeffs::zero(t);
        c.blocks[t](j, k) = 1.0 / double(dim);
        op::GridFunction in = op::GridFunction::from_both(Y, ts.col(k * dim + j), std::move(c));
        in.t_entry = {{t, k, j}};
        w[k] = fn(in).samples();
      }
      for (int i = 0; i < dim; ++i) {
        Vec col = Vec::Zero(n);
        for (int k = 0; k < dim; ++k) col += ts.col(k * dim + i).conjugate().cwiseProduct(w[k]);
        sig.col(i * dim + j) = col;
      }
    }

    // x-constant blocks need no projection
    Eigen::RowVectorXcd mean(dim * dim);
    double maxdev = 0, scale = 0;
    for (int c = 0; c < dim * dim; ++c) {
      mean(c) = Y.w.cast<cd>().dot(sig.col(c));
      maxdev = std::max(maxdev, (sig.col(c).array() - mean(c)).abs().maxCoeff());
      scale = std::max(scale, std::abs(mean(c)));
    }
    if (maxdev <= 1e-12 * (1.0 + scale)) {
      out.xc[t].row(0) = mean;
      continue;
    }

    const auto cs = Y.forward_batch(sig, twolx_out);
    double worst = 0;
    for (int c = 0; c < dim * dim; ++c) {
      const double total = (Y.w.array() * sig.col(c).array().abs2()).sum();
      const double kept = plancherel_energy(cs[c]);
      if (total > 1e-20) worst = std::max(worst, (total - kept) / total);
    }
    if (worst > oob_tol) {
      std::ostringstream msg;
      msg << "symbol extraction: " << worst * 100 << "% of energy above x-band " << twolx_out
          << " at fiber frequency " << ell_string(t);
      throw PrecisionError(msg.str());
    }
    for (int c = 0; c < dim * dim; ++c)
      for (int twolx = 0; twolx <= twolx_out; ++twolx)
        for (int s = 0; s <= twolx; ++s)
          for (int r = 0; r <= twolx; ++r)
            out.xc[t](slot_index(twolx, s, r), c) = cs[c].blocks[twolx](s, r);
  }
  return out;
}

Symbol x_field(const Engine& eng, const Symbol& a, const AlgebraElement& v) {
  Symbol out = a;
  for (int twolx = 1; twolx <= a.twolx_max; ++twolx) {
    const Mat d = repr::derived_rep(twolx, v);
    for (int t = 0; t <= a.twol_max; ++t) {
      for (int r = 0; r <= twolx; ++r) {
        Eigen::MatrixXcd m(twolx + 1, a.xc[t].cols());
        for (int s = 0; s <= twolx; ++s) m.row(s) = a.xc[t].row(slot_index(twolx, s, r));
        m = d * m;
        for (int s = 0; s <= twolx; ++s) out.xc[t].row(slot_index(twolx, s, r)) = m.row(s);
      }
    }
  }
  // twolx = 0 slots are constants: derivative zero
  for (int t = 0; t <= a.twol_max; ++t) out.xc[t].row(0).setZero();
  return out;
}

Symbol leibniz_field(const Engine& eng, const AlgebraElement& v, const Symbol& a) {
  Symbol out = x_field(eng, a, v);
  for (int t = 0; t <= a.twol_max; ++t) {
    Symbol tmp = a;  // per-frequency left factor dlambda(v)
    block_lmul(tmp, t, repr::derived_rep(t, v));
    out.xc[t] += tmp.xc[t];
  }
  out.analytic_order = a.analytic_order + 1;
  out.twol_reliable = a.twol_reliable;
  return out;
}

Symbol x_product(const Engine& eng, const Symbol& a, const Symbol& b) {
  const int tm = std::min(a.twol_max, b.twol_max);
  Symbol out;
  if (a.invariant() && b.invariant()) {
    out = Symbol::zero(tm, 0);
    for (int t = 0; t <= tm; ++t) block_to_row(out, t, 0, Mat(block_at(a, t, 0) * block_at(b, t, 0)));
  } else if (a.invariant()) {
    out = Symbol::zero(tm, b.twolx_max);
    for (int t = 0; t <= tm; ++t) {
      out.xc[t] = b.xc[t];
      block_lmul(out, t, block_at(a, t, 0));
    }
  } else if (b.invariant()) {
    out = Symbol::zero(tm, a.twolx_max);
    for (int t = 0; t <= tm; ++t) {
      out.xc[t] = a.xc[t];
      block_rmul(out, t, block_at(b, t, 0));
    }
  } else {
    const int twolx_out = std::min(a.twolx_max + b.twolx_max, eng.twolx_grid);
    out = Symbol::zero(tm, twolx_out);
    const Eigen::Index n = eng.X.n_nodes();
    for (int t = 0; t <= tm; ++t) {
      const int dim = t + 1;
      const Eigen::MatrixXcd sa = x_samples(eng, a, t), sb = x_samples(eng, b, t);
      Eigen::MatrixXcd sp(n, dim * dim);
      Mat ma(dim, dim), mb(dim, dim);
      for (Eigen::Index node = 0; node < n; ++node) {
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) {
            ma(i, j) = sa(node, i * dim + j);
            mb(i, j) = sb(node, i * dim + j);
          }
        const Mat mp = ma * mb;
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) sp(node, i * dim + j) = mp(i, j);
      }
      set_from_x_samples(eng, out, t, sp, twolx_out);
    }
  }
  out.twol_reliable = std::min(a.twol_reliable, b.twol_reliable);
  out.analytic_order = a.analytic_order + b.analytic_order;
  return out;
}

Eigen::MatrixXcd kernel_samples(const Engine& eng, const Symbol& a) {
  std::vector<Coeffs> per_slot;
  per_slot.reserve(n_slots(a.twolx_max));
  for (int slot = 0; slot < n_slots(a.twolx_max); ++slot) {
    Coeffs k = Coeffs::zero(a.twol_max);
    for (int t = 0; t <= a.twol_max; ++t) k.blocks[t] = block_at(a, t, slot);
    per_slot.push_back(std::move(k));
  }
  return eng.Y.inverse_batch(per_slot);
}

namespace {

Vec q_power_samples(const Grid& Y, const MultiIndex& alpha) {
  // the difference pairs the kernel k(z) against q^alpha evaluated at the
  // INVERSE node: the composition identity trades the kernel variable y for
  // z = y^{-1} x, so the jet coordinate seen by the kernel is q(z^{-1}).
  // By unitarity q_ij(z^{-1}) = conj(q_ji(z)), hence the index swap below.
  static constexpr int swapped[4] = {0, 2, 1, 3};
  Vec s = Vec::Constant(Y.n_nodes(), cd(1, 0));
  for (int idx = 0; idx < 4; ++idx)
    for (int rep = 0; rep < alpha[idx]; ++rep)
      s = s.cwiseProduct(Y.q[swapped[idx]].conjugate());
  return s;
}

}  // namespace

Symbol diff_from_kernels(const Engine& eng, const Symbol& a,
                         const Eigen::Ref<const Eigen::MatrixXcd>& kernels, const MultiIndex& alpha) {
  const int d = mi_total(alpha);
  Symbol out = Symbol::zero(a.twol_max, a.twolx_max);
  out.twol_reliable = std::min(a.twol_reliable, a.twol_max - d);
  out.analytic_order = a.analytic_order - d;
  const Vec qs = q_power_samples(eng.Y, alpha);
  const Eigen::MatrixXcd prod = (kernels.array().colwise() * qs.array()).matrix();
  const auto cs = eng.Y.forward_batch(prod, a.twol_max);
  for (int slot = 0; slot < n_slots(a.twolx_max); ++slot)
    for (int t = 0; t <= a.twol_max; ++t) block_to_row(out, t, slot, cs[slot].blocks[t]);
  return out;
}

Symbol diff_q(const Engine& eng, const Symbol& a, const MultiIndex& alpha) {
  if (mi_total(alpha) == 0) return a;
  return diff_from_kernels(eng, a, kernel_samples(eng, a), alpha);
}

Symbol diff_abstract(const Engine& eng, const Symbol& a, int qi, int qj) {
  if (qi < 0 || qi > 1 || qj < 0 || qj > 1) throw DomainError("diff_abstract: index out of range");
  const Grid& Y = eng.Y;
  const Eigen::Index n = Y.n_nodes();
  // conj(t^{1/2}_{qi qj}) at the nodes, straight from the group coordinates
  Vec thalf(n);
  for (int p = 0; p < Y.n_xi; ++p)
    for (int q = 0; q < Y.n_xi; ++q)
      for (int r = 0; r < Y.n_eta; ++r) {
        const GroupElement g = Y.node_element(p, q, r);
        const cd v = qi == 0 ? (qj == 0 ? g.alpha : -std::conj(g.beta))
                             : (qj == 0 ? g.beta : std::conj(g.alpha));
        thalf[Y.node_index(p, q, r)] = std::conj(v);
      }

  Symbol out = Symbol::zero(a.twol_max, a.twolx_max);
  out.twol_reliable = std::min(a.twol_reliable, a.twol_max - 1);
  out.analytic_order = a.analytic_order - 1;
  const Eigen::MatrixXcd kernels = kernel_samples(eng, a);
  for (int slot = 0; slot < n_slots(a.twolx_max); ++slot) {
    // weighted pairing against the tensor factor lambda^{1/2} (x) lambda^t:
    // block (qi,qj) of  integral k(y) (tensor)(y)^*  minus the delta part
    const Vec tmp = Y.w.cast<cd>().array() * kernels.col(slot).array() * thalf.array();
    for (int t = 0; t <= a.twol_max; ++t) {
      const int dim = t + 1;
      Mat b(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          b(i, j) = (tmp.array() * Y.t_samples(t, j, i).array().conjugate()).sum();
      if (qi == qj) b -= block_at(a, t, slot);
      block_to_row(out, t, slot, b);
    }
  }
  return out;
}

// ---- dual derivatives ------------------------------------------------

namespace {

// polynomials in the four coordinate entries T00,T01,T10,T11
using Mono = std::array<int, 4>;
using Poly = std::map<Mono, cd>;

Poly p_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      Mono m;
      for (int i = 0; i < 4; ++i) m[i] = ma[i] + mb[i];
      out[m] += ca * cb;
    }
  return out;
}

// derivation with D(T_ab) = sum_k T_ak G(k,b), extended by the product rule
Poly p_derive(const Poly& p, const Mat2& g) {
  Poly out;
  for (const auto& [mono, c] : p)
    for (int idx = 0; idx < 4; ++idx) {
      if (mono[idx] == 0) continue;
      const int a = idx / 2, b = idx % 2;
      for (int k = 0; k < 2; ++k) {
        if (g(k, b) == cd(0, 0)) continue;
        Mono m = mono;
        m[idx] -= 1;
        m[a * 2 + k] += 1;
        out[m] += c * double(mono[idx]) * g(k, b);
      }
    }
  return out;
}

cd p_eval_identity(const Poly& p) {
  cd v = 0;
  for (const auto& [mono, c] : p)
    if (mono[1] == 0 && mono[2] == 0) v += c;  // T00 = T11 = 1, T01 = T10 = 0
  return v;
}

std::vector<std::array<int, 3>> graded_lattice(int order) {
  std::vector<std::array<int, 3>> out;
  for (int total = 0; total <= order; ++total)
    for (int a = total; a >= 0; --a)
      for (int b = total - a; b >= 0; --b) out.push_back({a, b, total - a - b});
  return out;
}

constexpr const char* kDualSchema = "hopf-pdo/dual-deriv/1";

// convention fingerprint so stale caches from older layouts are rejected
std::uint64_t dual_hash(int order) {
  std::string tag = "2pii;H,X,Y ordered;q00,q01,q10;N=" + std::to_string(order);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

DualBasis build_dual_basis(const Engine& eng, int order) {
  namespace fs = std::filesystem;
  const fs::path file = fs::path(eng.cache_dir) / ("dual_deriv_N" + std::to_string(order) + ".json");
  const auto lattice = graded_lattice(order);
  const int n = int(lattice.size());

  DualBasis basis;
  basis.order = order;
  basis.betas = lattice;
  for (const auto& g : lattice) basis.alphas.push_back({g[0], g[1], g[2], 0});

  if (fs::exists(file)) {
    try {
      std::ifstream in(file);
      nlohmann::json j;
      in >> j;
      if (j.at("schema") == kDualSchema && j.at("order") == order &&
          j.at("hash") == dual_hash(order)) {
        const auto& rows = j.at("coeff");
        Eigen::MatrixXcd c(n, n);
        for (int r = 0; r < n; ++r)
          for (int col = 0; col < n; ++col)
            c(r, col) = cd(rows.at(r).at(col).at(0).get<double>(),
                           rows.at(r).at(col).at(1).get<double>());
        basis.coeff = std::move(c);
        basis.rank = j.at("rank").get<int>();
        return basis;
      }
    } catch (const std::exception&) {
      // fall through and rebuild
    }
  }

  // q-coordinate polynomials
  const Poly q00{{{1, 0, 0, 0}, cd(1, 0)}, {{0, 0, 0, 0}, cd(-1, 0)}};
  const Poly q01{{{0, 1, 0, 0}, cd(1, 0)}};
  const Poly q10{{{0, 0, 1, 0}, cd(1, 0)}};

  std::vector<Poly> qpows(n);
  for (int i = 0; i < n; ++i) {
    Poly p{{{0, 0, 0, 0}, cd(1, 0)}};
    for (int rep = 0; rep < lattice[i][0]; ++rep) p = p_mul(p, q00);
    for (int rep = 0; rep < lattice[i][1]; ++rep) p = p_mul(p, q01);
    for (int rep = 0; rep < lattice[i][2]; ++rep) p = p_mul(p, q10);
    qpows[i] = std::move(p);
  }

  const Mat2 gh = 2.0 * PI * IU * AlgebraElement::H().matrix();
  const Mat2 gx = 2.0 * PI * IU * AlgebraElement::X().matrix();
  const Mat2 gy = 2.0 * PI * IU * AlgebraElement::Y().matrix();

  // M(beta, gamma) = (X^beta q^gamma)(e), X^beta = D_H^b1 D_X^b2 D_Y^b3
  Eigen::MatrixXcd m(n, n);
  for (int gi = 0; gi < n; ++gi) {
    // reuse partial derivations per gamma: apply Y then X then H step by step
    for (int bi = 0; bi < n; ++bi) {
      Poly p = qpows[gi];
      for (int rep = 0; rep < lattice[bi][2]; ++rep) p = p_derive(p, gy);
      for (int rep = 0; rep < lattice[bi][1]; ++rep) p = p_derive(p, gx);
      for (int rep = 0; rep < lattice[bi][0]; ++rep) p = p_derive(p, gh);
      m(bi, gi) = p_eval_identity(p);
    }
  }

  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    d(i, i) = factorial(lattice[i][0]) * factorial(lattice[i][1]) * factorial(lattice[i][2]);

  const Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
  basis.rank = int(lu.rank());
  if (basis.rank < n) {
    // locate the lowest degenerate total degree for the report
    int bad = order;
    for (int total = 1; total <= order; ++total) {
      const int upto = int(graded_lattice(total).size());
      if (Eigen::FullPivLU<Eigen::MatrixXcd>(m.topLeftCorner(upto, upto)).rank() < upto) {
        bad = total;
        break;
      }
    }
    throw InternalError("dual derivative system is singular at order " + std::to_string(bad));
  }
  // C M = D  =>  C = D M^{-1}
  basis.coeff = d * lu.inverse();
  const double resid = (basis.coeff * m - d).norm();
  if (resid > 1e-9 * (1.0 + d.norm()))
    throw InternalError("dual derivative solve left a residual of " + std::to_string(resid));

  nlohmann::json j;
  j["schema"] = kDualSchema;
  j["order"] = order;
  j["hash"] = dual_hash(order);
  j["rank"] = basis.rank;
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < n; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int col = 0; col < n; ++col)
      row.push_back({basis.coeff(r, col).real(), basis.coeff(r, col).imag()});
    rows.push_back(std::move(row));
  }
  j["coeff"] = std::move(rows);
  std::error_code ec;
  fs::create_directories(file.parent_path(), ec);
  std::ofstream out(file);
  out << j.dump(1) << "\n";
  return basis;
}

}  // namespace

const DualBasis& dual_basis(const Engine& eng, int order) {
  if (order < 0 || order > 8) throw DomainError("dual basis order out of range");
  static std::map<int, DualBasis> cache;
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  return cache.emplace(order, build_dual_basis(eng, order)).first->second;
}

Mat dual_deriv_matrix(const Engine& eng, const MultiIndex& alpha, int twolx, int basis_order) {
  if (alpha[3] != 0) throw DomainError("dual derivatives live on the (q00,q01,q10) lattice");
  const int order = basis_order < 0 ? std::max(eng.p.order, mi_total(alpha)) : basis_order;
  static std::map<std::array<int, 6>, Mat> cache;
  const std::array<int, 6> key{order, twolx, alpha[0], alpha[1], alpha[2], alpha[3]};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const DualBasis& basis = dual_basis(eng, order);
  int row = -1;
  for (int i = 0; i < int(basis.alphas.size()); ++i)
    if (basis.alphas[i] == alpha) {
      row = i;
      break;
    }
  if (row < 0) throw DomainError("multi-index outside the dual basis order");

  const int dim = twolx + 1;
  const Mat dh = repr::derived_rep(twolx, AlgebraElement::H());
  const Mat dx = repr::derived_rep(twolx, AlgebraElement::X());
  const Mat dy = repr::derived_rep(twolx, AlgebraElement::Y());
  Mat p = Mat::Zero(dim, dim);
  for (int b = 0; b < int(basis.betas.size()); ++b) {
    const cd c = basis.coeff(row, b);
    if (std::abs(c) < 1e-300) continue;
    // the monomial is D_H^b1 D_X^b2 D_Y^b3 with D_Y applied first, and each
    // application left-multiplies the slot stack, so build dh^b1 dx^b2 dy^b3
    Mat term = Mat::Identity(dim, dim);
    for (int rep = 0; rep < basis.betas[b][2]; ++rep) term = dy * term;
    for (int rep = 0; rep < basis.betas[b][1]; ++rep) term = dx * term;
    for (int rep = 0; rep < basis.betas[b][0]; ++rep) term = dh * term;
    p += c * term;
  }
  return cache.emplace(key, std::move(p)).first->second;
}

Symbol x_dual_derivative(const Engine& eng, const Symbol& a, const MultiIndex& alpha,
                         int basis_order) {
  if (mi_total(alpha) == 0) return a;
  Symbol out = a;
  out.analytic_order = a.analytic_order;  // dual derivatives do not raise the order
  for (int twolx = 0; twolx <= a.twolx_max; ++twolx) {
    const Mat p = dual_deriv_matrix(eng, alpha, twolx, basis_order);
    for (int t = 0; t <= a.twol_max; ++t)
      for (int r = 0; r <= twolx; ++r) {
        Eigen::MatrixXcd m(twolx + 1, a.xc[t].cols());
        for (int s = 0; s <= twolx; ++s) m.row(s) = a.xc[t].row(slot_index(twolx, s, r));
        m = p * m;
        for (int s = 0; s <= twolx; ++s) out.xc[t].row(slot_index(twolx, s, r)) = m.row(s);
      }
  }
  return out;
}

double estimate_order(const Engine& eng, const Symbol& a, int twol_lo, int twol_hi) {
  const int hi = twol_hi >= 0 ? twol_hi : std::min(a.twol_max, a.twol_reliable);
  const int lo = twol_lo >= 0 ? twol_lo : std::max(1, hi - 8);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int npts = 0;
  for (int t = lo; t <= hi; ++t) {
    const double norm = max_block_norm(eng, a, t);
    if (norm <= 0) continue;
    const double x = std::log(repr::lambda_weight(t)), y = std::log(norm);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++npts;
  }
  const double det = npts * sxx - sx * sx;
  if (npts < 3 || std::abs(det) < 1e-12)
    return -std::numeric_limits<double>::infinity();
  return (npts * sxy - sx * sy) / det;
}

}  // namespace hopf::sym
