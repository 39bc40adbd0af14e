#include "hopf/su2.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace hopf::su2 {

GroupElement::GroupElement(cd a, cd b) {
  const double n2 = std::norm(a) + std::norm(b);
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw DomainError("GroupElement: (alpha,beta) not normalizable");
  const double s = 1.0 / std::sqrt(n2);
  alpha = a * s;
  beta = b * s;
}

GroupElement GroupElement::inverse() const {
  GroupElement g;
  g.alpha = std::conj(alpha);
  g.beta = -beta;
  return g;
}

double GroupElement::unitarity_defect() const {
  const Mat2 m = matrix();
  return (m * m.adjoint() - Mat2::Identity()).norm();
}

GroupElement from_angles(double xi1, double xi2, double eta) {
  if (!(xi1 >= 0.0 && xi1 < 1.0) || !(xi2 >= 0.0 && xi2 < 1.0))
    throw DomainError("from_angles: xi out of [0,1)");
  if (!(eta >= 0.0 && eta <= PI / 2 + 1e-12)) throw DomainError("from_angles: eta out of [0,pi/2]");
  const cd e1 = std::polar(1.0, 2.0 * PI * xi1);
  const cd e2 = std::polar(1.0, 2.0 * PI * xi2);
  GroupElement g;
  g.alpha = e1 * std::sin(eta);
  g.beta = e2 * std::cos(eta);
  return g;
}

GroupElement multiply(const GroupElement& g, const GroupElement& h) {
  GroupElement r;
  r.alpha = g.alpha * h.alpha - std::conj(g.beta) * h.beta;
  r.beta = g.beta * h.alpha + std::conj(g.alpha) * h.beta;
  return r;
}

GroupElement inverse(const GroupElement& g) { return g.inverse(); }

double dist_to_identity(const GroupElement& g) { return (g.matrix() - Mat2::Identity()).norm(); }

AlgebraElement commutator(const AlgebraElement& a, const AlgebraElement& b) {
  const Mat2 c = a.matrix() * b.matrix() - b.matrix() * a.matrix();
  // c is traceless with c = [[h, x],[y, -h]]
  return AlgebraElement(c(0, 0), c(0, 1), c(1, 0));
}

Mat2 exp2_traceless(const Mat2& m) {
  if (std::abs(m(0, 0) + m(1, 1)) > 1e-12 * (1.0 + m.norm()))
    throw InternalError("exp2_traceless: matrix not traceless");
  // exp(M) = cosh(d) I + sinh(d)/d M with d^2 = -det M (Cayley-Hamilton).
  const cd d2 = -(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
  const cd d = std::sqrt(d2);
  cd ch, shc;
  if (std::abs(d) < 1e-4) {
    ch = 1.0 + d2 / 2.0 + d2 * d2 / 24.0 + d2 * d2 * d2 / 720.0;
    shc = 1.0 + d2 / 6.0 + d2 * d2 / 120.0 + d2 * d2 * d2 / 5040.0;
  } else {
    ch = std::cosh(d);
    shc = std::sinh(d) / d;
  }
  return ch * Mat2::Identity() + shc * m;
}

Mat2 exp_matrix(const AlgebraElement& a, double t) {
  const Mat2 m = (2.0 * PI * IU * t) * a.matrix();
  return exp2_traceless(m);
}

GroupElement exp_group(const AlgebraElement& a, double t) {
  const Mat2 e = exp_matrix(a, t);
  // SU(2) shape: [[a, -conj(b)], [b, conj(a)]], unitary, det 1.
  const double defect = (e * e.adjoint() - Mat2::Identity()).norm() +
                        std::abs(e(1, 1) - std::conj(e(0, 0))) + std::abs(e(0, 1) + std::conj(e(1, 0)));
  if (defect > 1e-9) {
    throw DomainError("exp_group: result not in SU(2), defect=" + std::to_string(defect) +
                      ", matrix=[[" + std::to_string(e(0, 0).real()) + "+" + std::to_string(e(0, 0).imag()) +
                      "i, ...]]");
  }
  GroupElement g;
  g.alpha = e(0, 0);
  g.beta = e(1, 0);
  return g;
}

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw DomainError("gauss_legendre_01: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n over [-1,1], standard cos initial guess.
    double x = std::cos(PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double pm = 1.0, pc = x;
      for (int k = 2; k <= n; ++k) {
        const double pn = ((2.0 * k - 1.0) * x * pc - (k - 1.0) * pm) / k;
        pm = pc;
        pc = pn;
      }
      pp = n * (x * pc - pm) / (x * x - 1.0);
      const double dx = pc / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * pp * pp);  // [0,1] weights: half the [-1,1] ones
  }
  // sort ascending for a deterministic layout
  for (size_t i = 0; i + 1 < nodes.size(); ++i)
    for (size_t j = i + 1; j < nodes.size(); ++j)
      if (nodes[j] < nodes[i]) {
        std::swap(nodes[i], nodes[j]);
        std::swap(weights[i], weights[j]);
      }
}

Eigen::VectorXd QuadratureRule::node_weights() const {
  Eigen::VectorXd w(n_nodes());
  const double wxi = 1.0 / (double(n_xi) * n_xi);
  for (int p = 0; p < n_xi; ++p)
    for (int q = 0; q < n_xi; ++q)
      for (int r = 0; r < n_eta; ++r) w[node_index(p, q, r)] = wxi * w_eta[r];
  return w;
}

QuadratureRule build_quadrature(int band) {
  if (band < 0) throw DomainError("build_quadrature: band must be >= 0");
  QuadratureRule q;
  q.band = band;
  q.n_xi = 2 * band + 1;
  q.n_eta = band + 1;
  q.xi.resize(q.n_xi);
  for (int p = 0; p < q.n_xi; ++p) q.xi[p] = double(p) / q.n_xi;
  std::vector<double> s, w;
  gauss_legendre_01(q.n_eta, s, w);
  q.eta.resize(q.n_eta);
  q.w_eta.resize(q.n_eta);
  double tot = 0.0;
  for (int r = 0; r < q.n_eta; ++r) tot += w[r];
  for (int r = 0; r < q.n_eta; ++r) {
    q.eta[r] = std::asin(std::sqrt(s[r]));
    q.w_eta[r] = w[r] / tot;
  }
  return q;
}

std::string resolve_cache_dir(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("HOPF_PDO_CACHE"); env && *env) return env;
  return "cache";
}

QuadratureRule load_or_build_quadrature(int band, const std::string& cache_dir) {
  namespace fs = std::filesystem;
  const std::string dir = resolve_cache_dir(cache_dir);
  const fs::path file = fs::path(dir) / ("quadrature_L" + std::to_string(band) + ".json");

  if (fs::exists(file)) {
    try {
      std::ifstream in(file);
      nlohmann::json j;
      in >> j;
      if (j.at("schema") == "hopf-pdo/quadrature/1" && j.at("band_twol") == band) {
        QuadratureRule q;
        q.band = band;
        q.n_xi = 2 * band + 1;
        q.n_eta = band + 1;
        q.xi = j.at("xi").get<std::vector<double>>();
        q.eta = j.at("eta").get<std::vector<double>>();
        q.w_eta = j.at("w_eta").get<std::vector<double>>();
        if (int(q.xi.size()) == q.n_xi && int(q.eta.size()) == q.n_eta &&
            int(q.w_eta.size()) == q.n_eta)
          return q;
      }
    } catch (...) {
      // fall through and rebuild
    }
  }

  QuadratureRule q = build_quadrature(band);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!ec) {
    nlohmann::json j;
    j["schema"] = "hopf-pdo/quadrature/1";
    j["band_twol"] = band;
    j["xi"] = q.xi;
    j["eta"] = q.eta;
    j["w_eta"] = q.w_eta;
    std::ofstream out(file);
    out << j.dump(1) << "\n";
  }
  return q;
}

}  // namespace hopf::su2
