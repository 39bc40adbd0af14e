#include "hopf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "hopf/repr.hpp"

namespace hopf::verify {

using fourier::Coeffs;
using fourier::Engine;
using fourier::Grid;
using sym::MultiIndex;
using sym::Symbol;

namespace {

struct Battery {
  std::vector<CheckResult> results;
  const std::map<std::string, double>* overrides;

  void add(const std::string& name, int criterion, double value, double tol,
           const std::string& detail = "") {
    CheckResult r;
    r.name = name;
    r.criterion = criterion;
    auto it = overrides->find(name);
    r.tol = it != overrides->end() ? it->second : tol;
    r.value = value;
    r.pass = std::isfinite(value) && value <= r.tol;
    r.detail = detail;
    results.push_back(std::move(r));
  }
};

double rel_l2(const Coeffs& got, const Coeffs& want, double scale) {
  return fourier::l2_norm(fourier::add(got, fourier::scale(want, cd(-1, 0)))) / scale;
}

// max over trusted frequencies of ||a(l,.) - b(l,.)|| / (1 + ||b(l,.)||)
double sym_rel_defect(const Engine& eng, const Symbol& a, const Symbol& b, int up_to) {
  const Symbol d = sym::sym_add(a, sym::sym_scale(b, cd(-1, 0)));
  double worst = 0;
  for (int t = 0; t <= std::min(up_to, d.twol_max); ++t)
    worst = std::max(worst,
                     sym::max_block_norm(eng, d, t) / (1.0 + sym::max_block_norm(eng, b, t)));
  return worst;
}

// ---------------------------------------------------------------- criterion 1

void check_schur(Battery& bt, const fourier::EngineParams& base) {
  {
    const Grid g(su2::build_quadrature(8));
    struct Entry {
      int t, i, j;
    };
    std::vector<Entry> entries;
    for (int t = 0; t <= 4; ++t)
      for (int i = 0; i <= t; ++i)
        for (int j = 0; j <= t; ++j) entries.push_back({t, i, j});
    const int n = int(entries.size());
    Eigen::MatrixXcd T(g.n_nodes(), n);
    for (int k = 0; k < n; ++k) T.col(k) = g.t_samples(entries[k].t, entries[k].i, entries[k].j);
    const Eigen::MatrixXcd gram =
        T.adjoint() * g.w.cast<cd>().asDiagonal() * T;
    double worst = 0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const bool same = entries[a].t == entries[b].t && entries[a].i == entries[b].i &&
                          entries[a].j == entries[b].j;
        const cd want = same ? cd(1.0 / (entries[a].t + 1), 0) : cd(0, 0);
        worst = std::max(worst, std::abs(gram(a, b) - want));
      }
    bt.add("schur-orthogonality-full", 1, worst, 1e-11, "all entry pairs through frequency 2");
  }
  {
    const Grid g(su2::build_quadrature(20));
    RandomStream rng(seed_for(base.seed, "schur-sampled"));
    auto rand_entry = [&](int& t, int& i, int& j) {
      t = int(rng.uniform01() * 11);  // 0..10
      if (t > 10) t = 10;
      i = std::min(t, int(rng.uniform01() * (t + 1)));
      j = std::min(t, int(rng.uniform01() * (t + 1)));
    };
    double worst = 0;
    const int n_pairs = 900;
    for (int k = 0; k < n_pairs; ++k) {
      int t1, i1, j1, t2, i2, j2;
      rand_entry(t1, i1, j1);
      if (k % 3 == 0) {  // exercise the diagonal often
        t2 = t1, i2 = i1, j2 = j1;
      } else {
        rand_entry(t2, i2, j2);
      }
      const Vec f1 = g.t_samples(t1, i1, j1), f2 = g.t_samples(t2, i2, j2);
      const cd got = (f1.array() * f2.array().conjugate() * g.w.array().cast<cd>()).sum();
      const bool same = t1 == t2 && i1 == i2 && j1 == j2;
      const cd want = same ? cd(1.0 / (t1 + 1), 0) : cd(0, 0);
      worst = std::max(worst, std::abs(got - want));
    }
    bt.add("schur-orthogonality-sampled", 1, worst, 1e-11,
           "900 deterministic entry pairs through frequency 10");
  }
}

// ---------------------------------------------------------------- criterion 2

void check_fourier(Battery& bt, const Engine& eng, const fourier::EngineParams& base) {
  RandomStream rng(seed_for(base.seed, "fourier"));
  const Coeffs c = fourier::random_bandlimited(10, rng);
  const Vec s = eng.Y.inverse(op::padded(c, eng.Y.band));
  const Coeffs back = eng.Y.forward(s, 10);
  double worst = 0;
  for (int t = 0; t <= 10; ++t)
    worst = std::max(worst, (back.blocks[t] - c.blocks[t]).cwiseAbs().maxCoeff());
  bt.add("fourier-roundtrip", 2, worst, 1e-10);

  const double direct = (s.array().abs2() * eng.Y.w.array()).sum();
  const double plan = fourier::plancherel_energy(c);
  bt.add("fourier-plancherel", 2, std::abs(direct - plan) / plan, 1e-9);
}

// ---------------------------------------------------------------- criterion 3

void check_casimir(Battery& bt) {
  const auto basis = repr::casimir_basis();
  double scal = 0, ratio = 0;
  for (int t = 0; t <= 8; ++t) {
    Mat m = Mat::Zero(t + 1, t + 1);
    for (const auto& e : basis) {
      const Mat d = repr::derived_rep(t, e);
      m -= d * d;
    }
    const double c = t == 0 ? 0.0 : m(0, 0).real();
    const Mat defect = m - c * Mat::Identity(t + 1, t + 1);
    scal = std::max(scal, defect.cwiseAbs().maxCoeff() / (1.0 + std::abs(c)));
    if (t >= 1) {
      const double expected = double(t) * (t + 2) / 3.0;
      const double got = repr::casimir_eigenvalue(t) / repr::casimir_eigenvalue(1);
      ratio = std::max(ratio, std::abs(got - expected) / expected);
    }
  }
  bt.add("casimir-scalarity", 3, scal, 1e-10, "direct assembly through frequency 8");
  bt.add("casimir-ratio-law", 3, ratio, 1e-9);
}

// ---------------------------------------------------------------- criterion 4

void check_sections(Battery& bt, const fourier::EngineParams& base) {
  double worst = 0;
  for (int n = -3; n <= 3; ++n) {
    RandomStream rng(seed_for(base.seed, "section-" + std::to_string(n)));
    const auto sec = fourier::random_section(n, 8, rng);
    const Coeffs hu = fourier::field_apply(sec.coeffs, su2::AlgebraElement::H());
    const Coeffs want = fourier::scale(sec.coeffs, cd(0, -2 * PI * n));
    worst = std::max(worst, rel_l2(hu, want, fourier::l2_norm(sec.coeffs)));
  }
  bt.add("section-vertical-derivative", 4, worst, 1e-8, "bundles -3..3");
}

// ---------------------------------------------------------------- criterion 5

struct NamedOp {
  std::string name;
  op::OperatorFn fn;
  int twolx;
};

void check_quantization(Battery& bt, const Engine& eng, const Coeffs& phi_hat,
                        const Vec& phi_samples, const fourier::EngineParams& base) {
  RandomStream rng(seed_for(base.seed, "quantization"));
  const int ub = eng.p.twol_max - eng.p.twolx_max;  // keep products alias-free
  const Coeffs u = fourier::random_bandlimited(ub, rng);
  const double unorm = fourier::l2_norm(u);
  const op::GridFunction gu = op::GridFunction::from_coeffs(eng.Y, op::padded(u, ub));

  const auto X = su2::AlgebraElement::X();
  std::vector<NamedOp> ops;
  ops.push_back({"identity", op::op_identity(), 0});
  ops.push_back({"field-H", op::op_field(su2::AlgebraElement::H()), 0});
  ops.push_back({"field-X", op::op_field(X), 0});
  ops.push_back({"field-Y", op::op_field(su2::AlgebraElement::Y()), 0});
  ops.push_back({"laplacian", op::op_laplacian(), 0});
  ops.push_back({"multiplier", op::op_multiply(eng.Y, phi_samples, eng.p.twolx_max),
                 eng.p.twolx_max});
  ops.push_back({"field-after-multiplier",
                 op::compose_ops(op::op_field(X),
                                 op::op_multiply(eng.Y, phi_samples, eng.p.twolx_max)),
                 eng.p.twolx_max});
  ops.push_back({"multiplier-after-laplacian",
                 op::compose_ops(op::op_multiply(eng.Y, phi_samples, eng.p.twolx_max),
                                 op::op_laplacian()),
                 eng.p.twolx_max});

  for (const auto& nop : ops) {
    const Symbol sig = sym::symbol_of_operator(eng, nop.fn, nop.twolx);
    const Coeffs got = sym::op_apply(eng, sig, u);
    op::GridFunction direct = nop.fn(gu);
    const Coeffs want = direct.coeffs();
    // compare on the band both representations hold exactly
    const int bmax = std::min(got.twol_max, want.twol_max);
    Coeffs gt = Coeffs::zero(bmax), wt = Coeffs::zero(bmax);
    for (int t = 0; t <= bmax; ++t) {
      gt.blocks[t] = got.blocks[t];
      wt.blocks[t] = want.blocks[t];
    }
    bt.add("quantize-" + nop.name, 5, rel_l2(gt, wt, unorm), 1e-9);
  }
}

// ---------------------------------------------------------------- criterion 6

void check_compose_first_order(Battery& bt, const Engine& eng, const Coeffs& phi_hat) {
  const auto X = su2::AlgebraElement::X();
  const Symbol sx = sym::field_symbol(eng, X);
  const Symbol sb = sym::mult_symbol(eng, phi_hat);
  const Symbol exact = sym::leibniz_field(eng, X, sb);
  const Symbol approx = calc::compose(eng, sx, sb, 1);
  const int up_to = std::min(approx.twol_reliable, exact.twol_max);
  bt.add("compose-field-multiplier", 6, sym_rel_defect(eng, approx, exact, up_to), 1e-7,
         "first-order composition against the exact Leibniz symbol");
}

// ---------------------------------------------------------------- criterion 7

void check_compose_invariant(Battery& bt, const Engine& eng) {
  const Symbol one = sym::identity_symbol(eng);
  const Symbol a = sym::sym_add(one, sym::laplacian_symbol(eng));
  const Symbol b = calc::heat_symbol(eng, 5e-4);
  const Symbol prod = sym::x_product(eng, a, b);
  double worst = 0;
  for (int order = 0; order <= 3; ++order) {
    const Symbol direct = calc::compose(eng, a, b, order);
    worst = std::max(worst, sym_rel_defect(eng, direct, prod, a.twol_max));
    // the same sum assembled stratum by stratum, exercising the dual machinery
    Symbol strata = calc::composition_stratum(eng, a, b, 0);
    for (int r = 1; r <= order; ++r)
      strata = sym::sym_add(strata, calc::composition_stratum(eng, a, b, r));
    worst = std::max(worst, sym_rel_defect(eng, strata, prod, a.twol_max - order));
  }
  bt.add("compose-invariant-exact", 7, worst, 1e-8, "orders 0..3, direct and stratum routes");
}

// ---------------------------------------------------------------- criterion 8

void check_parametrix_invariant(Battery& bt, const Engine& eng) {
  calc::GradedSymbol a;
  a.top_order = 2;
  a.terms.push_back(sym::sym_add(sym::identity_symbol(eng), sym::laplacian_symbol(eng)));
  a.terms[0].analytic_order = 2;
  const calc::GradedSymbol b = calc::parametrix(eng, a, 3);

  const Symbol prod = sym::x_product(eng, b.terms[0], a.terms[0]);
  bt.add("parametrix-invariant-inverse", 8,
         sym_rel_defect(eng, prod, sym::identity_symbol(eng), eng.p.twol_max), 1e-8);
  double tail = 0;
  for (size_t k = 1; k < b.terms.size(); ++k)
    for (const auto& m : b.terms[k].xc)
      if (m.size() > 0) tail = std::max(tail, m.cwiseAbs().maxCoeff());
  bt.add("parametrix-invariant-tail", 8, tail, 1e-8,
         "higher corrections vanish for an invariant operator");
}

// ---------------------------------------------------------------- criterion 9

void check_parametrix_orders(Battery& bt, const Engine& eng, const Coeffs& phi_hat) {
  const Symbol one = sym::identity_symbol(eng);
  calc::GradedSymbol a;
  a.top_order = 2;
  Symbol a0 = sym::sym_add(one, sym::laplacian_symbol(eng));
  a0.analytic_order = 2;
  Symbol a1 = sym::x_product(eng, sym::mult_symbol(eng, phi_hat),
                             sym::field_symbol(eng, su2::AlgebraElement::X()));
  a1.analytic_order = 1;
  a.terms = {a0, a1};
  const Symbol a_total = sym::sym_add(a0, a1);

  // The expansion is asymptotic: residual blocks obey the power law only once
  // the spectral weight clears the x-derivative scale (~2 pi L_x / 2 per
  // order), i.e. for frequencies above twolx_max; below that the series terms
  // grow and the blocks carry O(1) pre-asymptotic junk by design. Fit the
  // slope over the trusted asymptotic window only.
  const int fit_lo = eng.p.twolx_max + 1;
  std::vector<double> slopes;
  for (int n = 0; n <= 2; ++n) {
    const calc::GradedSymbol b = calc::parametrix(eng, a, n);
    const Symbol r =
        sym::sym_add(calc::compose(eng, b.collapse(eng), a_total, 3), sym::sym_scale(one, cd(-1, 0)));
    slopes.push_back(sym::estimate_order(eng, r, fit_lo, r.twol_reliable));
  }
  std::ostringstream detail;
  detail << "residual orders " << slopes[0] << ", " << slopes[1] << ", " << slopes[2];
  double worst = 0;
  for (int n = 0; n + 1 < int(slopes.size()); ++n)
    worst = std::max(worst, std::abs((slopes[n] - slopes[n + 1]) - 1.0));
  bt.add("parametrix-residual-order-drop", 9, worst, 0.5, detail.str());
}

// --------------------------------------------------------------- criterion 10

void check_diff_orders(Battery& bt, const Engine& eng) {
  const Symbol a = sym::laplacian_symbol(eng);
  double scale = 0;
  for (int t = 0; t <= a.twol_reliable; ++t)
    scale = std::max(scale, sym::max_block_norm(eng, a, t));
  double worst1 = 0, worst2 = 0;
  const std::vector<MultiIndex> first = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}};
  for (const auto& al : first) {
    const double s = sym::estimate_order(eng, sym::diff_q(eng, a, al));
    worst1 = std::max(worst1, std::abs(s - 1.0));
  }
  const std::vector<MultiIndex> second = {{2, 0, 0, 0}, {1, 1, 0, 0}, {0, 1, 1, 0}};
  for (const auto& al : second) {
    const Symbol d = sym::diff_q(eng, a, al);
    // some mixed differences annihilate the quadratic symbol outright; an
    // identically-vanishing difference has lowered the order as far as it can
    // go, and fitting a slope to roundoff noise would be meaningless
    double dn = 0;
    for (int t = 0; t <= d.twol_reliable; ++t)
      dn = std::max(dn, sym::max_block_norm(eng, d, t));
    if (dn <= 1e-9 * scale) continue;
    const double s = sym::estimate_order(eng, d);
    worst2 = std::max(worst2, std::abs(s - 0.0));
  }
  bt.add("difference-order-first", 10, worst1, 0.3,
         "first differences of the order-2 symbol have order 1");
  bt.add("difference-order-second", 10, worst2, 0.3,
         "second differences of the order-2 symbol have order 0");
}

// --------------------------------------------------------------- criterion 11

void check_diff_abstract(Battery& bt, const Engine& eng, const Coeffs& phi_hat) {
  const Symbol inv = sym::laplacian_symbol(eng);
  const Symbol xdep = sym::x_product(eng, sym::mult_symbol(eng, phi_hat),
                                     sym::field_symbol(eng, su2::AlgebraElement::X()));
  // pairing route (qi,qj) against the coordinate route, with the sign/index map
  struct Map {
    int qi, qj;
    MultiIndex alpha;
    double sign;
  };
  const std::vector<Map> table = {{0, 0, {1, 0, 0, 0}, 1.0},
                                  {0, 1, {0, 0, 1, 0}, 1.0},
                                  {1, 0, {0, 1, 0, 0}, 1.0},
                                  {1, 1, {0, 0, 0, 1}, 1.0}};
  double worst = 0;
  for (const Symbol* s : {&inv, &xdep}) {
    for (const auto& m : table) {
      const Symbol got = sym::diff_abstract(eng, *s, m.qi, m.qj);
      const Symbol want = sym::sym_scale(sym::diff_q(eng, *s, m.alpha), cd(m.sign, 0));
      const int up_to = std::min(got.twol_max - 1, want.twol_reliable);
      worst = std::max(worst, sym_rel_defect(eng, got, want, up_to));
    }
  }
  bt.add("difference-pairing-route", 11, worst, 1e-8,
         "tensor-pairing differences match the coordinate route");
}

// --------------------------------------------------------------- criterion 12

void check_heat_symbols(Battery& bt, const Engine& eng) {
  const double t = 0.01;
  const Symbol hs = calc::heat_symbol(eng, t);
  double worst = 0;
  for (int tw = 0; tw <= hs.twol_max; ++tw) {
    const double want = std::exp(-t * repr::casimir_eigenvalue(tw));
    const Mat got = sym::evaluate(hs, tw, su2::GroupElement::identity());
    const Mat defect = got - want * Mat::Identity(tw + 1, tw + 1);
    worst = std::max(worst, defect.cwiseAbs().maxCoeff() / want);
  }
  bt.add("heat-spectral", 12, worst, 1e-10);

  const auto f = [t](cd z, int k) { return std::pow(cd(-t, 0), k) * std::exp(-t * z); };
  const Symbol series = calc::functional_calculus_series(eng, sym::laplacian_symbol(eng), f, 3);
  bt.add("heat-series", 12, sym_rel_defect(eng, series, hs, hs.twol_max), 1e-7,
         "Newton-series route against the spectral route");

  const Symbol a = sym::sym_add(sym::identity_symbol(eng), sym::laplacian_symbol(eng));
  const Symbol res = calc::resolvent_symbol(eng, a, cd(-1, 0));
  double rworst = 0;
  for (int tw = 0; tw <= res.twol_max; ++tw) {
    const double want = 1.0 / (2.0 + repr::casimir_eigenvalue(tw));
    const Mat got = sym::evaluate(res, tw, su2::GroupElement::identity());
    rworst = std::max(rworst,
                      (got - want * Mat::Identity(tw + 1, tw + 1)).cwiseAbs().maxCoeff() / want);
  }
  bt.add("resolvent-spectral", 12, rworst, 1e-8);
}

// --------------------------------------------------------------- criterion 13

void check_heat_evolution(Battery& bt, const Engine& eng, const fourier::EngineParams& base) {
  RandomStream rng(seed_for(base.seed, "heat-evolution"));
  const auto sec = fourier::random_section(2, 10, rng);
  const double s = 0.003, t = 0.007;
  const Coeffs two_step = calc::heat_evolve(eng, calc::heat_evolve(eng, sec.coeffs, s), t);
  const Coeffs one_step = calc::heat_evolve(eng, sec.coeffs, s + t);
  bt.add("heat-semigroup", 13, rel_l2(two_step, one_step, fourier::l2_norm(sec.coeffs)), 1e-9,
         "exp(-tL) exp(-sL) = exp(-(s+t)L) on a bundle-2 section");

  Coeffs projected = one_step;
  fourier::project_section(projected, 2);
  bt.add("heat-sector-preserved", 13,
         rel_l2(one_step, projected, fourier::l2_norm(one_step)), 1e-10,
         "evolution stays in the bundle sector");
}

// --------------------------------------------------------------- criterion 14

Vec q_power_on_grid(const Grid& g, const MultiIndex& al) {
  Vec out = Vec::Ones(g.n_nodes());
  for (int k = 0; k < 4; ++k)
    for (int rep = 0; rep < al[k]; ++rep) out = out.array() * g.q[k].array();
  return out;
}

cd q_power_at(const su2::GroupElement& x, const MultiIndex& al) {
  const Mat2 m = x.matrix();
  cd v = 1;
  for (int rep = 0; rep < al[0]; ++rep) v *= m(0, 0) - 1.0;
  for (int rep = 0; rep < al[1]; ++rep) v *= m(0, 1);
  for (int rep = 0; rep < al[2]; ++rep) v *= m(1, 0);
  for (int rep = 0; rep < al[3]; ++rep) v *= m(1, 1) - 1.0;
  return v;
}

std::vector<MultiIndex> lattice_upto(int order) {
  std::vector<MultiIndex> out;
  for (int total = 0; total <= order; ++total)
    for (int a = total; a >= 0; --a)
      for (int b = total - a; b >= 0; --b) out.push_back({a, b, total - a - b, 0});
  return out;
}

// the dual checks only evaluate at the trivial frequency, so drop the rest
Symbol first_block_only(const Symbol& s) {
  Symbol out = s;
  out.twol_max = 0;
  out.twol_reliable = 0;
  out.xc.resize(1);
  return out;
}

void check_duals(Battery& bt, const Engine& eng, const fourier::EngineParams& base) {
  const int order = 3;
  const auto lat = lattice_upto(order);
  double worst = 0;
  for (const auto& gamma : lat) {
    const Coeffs qc = eng.X.forward(q_power_on_grid(eng.X, gamma), sym::mi_total(gamma));
    const Symbol qs = first_block_only(sym::mult_symbol(eng, qc));
    for (const auto& alpha : lat) {
      if (sym::mi_total(alpha) == 0) continue;
      const Symbol ds = sym::x_dual_derivative(eng, qs, alpha, order);
      const cd got = sym::evaluate(ds, 0, su2::GroupElement::identity())(0, 0);
      const cd want = alpha == gamma ? cd(sym::mi_factorial(alpha), 0) : cd(0, 0);
      worst = std::max(worst, std::abs(got - want));
    }
    // the zeroth dual is evaluation at the identity
    const cd at_e = sym::evaluate(qs, 0, su2::GroupElement::identity())(0, 0);
    const cd want0 = sym::mi_total(gamma) == 0 ? cd(1, 0) : cd(0, 0);
    worst = std::max(worst, std::abs(at_e - want0));
  }
  bt.add("dual-biorthogonality", 14, worst, 1e-9,
         "(dual_alpha q^gamma)(e) = alpha! delta through order 3");

  // Taylor remainder of a smooth x-function against the order-2 dual jets
  RandomStream rng(seed_for(base.seed, "dual-taylor"));
  const Coeffs fc = fourier::random_bandlimited(4, rng);
  const Symbol fs = first_block_only(sym::mult_symbol(eng, fc));
  const auto jets = lattice_upto(2);
  std::vector<cd> coeff(jets.size());
  for (size_t k = 0; k < jets.size(); ++k) {
    const Symbol d = sym::mi_total(jets[k]) == 0
                         ? fs
                         : sym::x_dual_derivative(eng, fs, jets[k], 2);
    coeff[k] = sym::evaluate(d, 0, su2::GroupElement::identity())(0, 0) /
               sym::mi_factorial(jets[k]);
  }
  std::vector<su2::AlgebraElement> dirs;
  for (int d = 0; d < 8; ++d) {
    const double h = rng.normal();
    const cd xv = rng.cnormal();
    dirs.push_back(su2::AlgebraElement{cd(h, 0), xv, std::conj(xv)});
  }
  // exp_group carries a 2 pi factor, so r = 0.1 is already a rotation by more
  // than half a radian; the remainder follows its power law only once the
  // displacement is genuinely small. Start the radius ladder at ~0.056 (the
  // smallest radius still leaves the remainder eight decades above roundoff).
  std::vector<double> logr, logm;
  for (int k = 0; k < 6; ++k) {
    const double r = std::pow(10.0, -1.25 - 0.25 * k);
    double m = 0;
    for (const auto& v : dirs) {
      const su2::GroupElement x = su2::exp_group(v, r);
      cd rem = fourier::inverse_at(fc, x);
      for (size_t kk = 0; kk < jets.size(); ++kk) rem -= coeff[kk] * q_power_at(x, jets[kk]);
      m = std::max(m, std::abs(rem));
    }
    logr.push_back(std::log(r));
    logm.push_back(std::log(std::max(m, 1e-300)));
  }
  const int n = int(logr.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < n; ++k) {
    sx += logr[k];
    sy += logm[k];
    sxx += logr[k] * logr[k];
    sxy += logr[k] * logm[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  std::ostringstream detail;
  detail << "remainder slope " << slope;
  bt.add("dual-taylor-remainder", 14, std::abs(slope - 3.0), 0.3, detail.str());
}

}  // namespace

std::vector<CheckResult> run_all(const fourier::EngineParams& base,
                                 const std::map<std::string, double>& tol_overrides) {
  Battery bt;
  bt.overrides = &tol_overrides;
  const Engine eng(base);

  // shared band-limited multiplier, deterministic in the base seed
  RandomStream phi_rng(seed_for(base.seed, "multiplier"));
  const Coeffs phi_hat = fourier::random_bandlimited(base.twolx_max, phi_rng);
  const Vec phi_samples = eng.Y.inverse(op::padded(phi_hat, eng.Y.band));

  check_schur(bt, base);
  check_fourier(bt, eng, base);
  check_casimir(bt);
  check_sections(bt, base);
  check_quantization(bt, eng, phi_hat, phi_samples, base);
  check_compose_first_order(bt, eng, phi_hat);
  check_compose_invariant(bt, eng);
  check_parametrix_invariant(bt, eng);
  check_parametrix_orders(bt, eng, phi_hat);
  check_diff_orders(bt, eng);
  check_diff_abstract(bt, eng, phi_hat);
  check_heat_symbols(bt, eng);
  check_heat_evolution(bt, eng, base);
  check_duals(bt, eng, base);
  return bt.results;
}

std::string report_json(const std::vector<CheckResult>& results) {
  nlohmann::json checks = nlohmann::json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    checks.push_back({{"name", r.name},
                      {"criterion", r.criterion},
                      {"pass", r.pass},
                      {"value", r.value},
                      {"tol", r.tol},
                      {"detail", r.detail}});
  }
  return nlohmann::json{{"schema", "hopf-pdo/verify/1"},
                        {"all_pass", all},
                        {"checks", std::move(checks)}}
      .dump(2);
}

}  // namespace hopf::verify
