#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hopf/repr.hpp"
#include "hopf/su2.hpp"

namespace hopf::fourier {

// Peter-Weyl coefficients: blocks[twol] is (twol+1)x(twol+1), present for all
// twol = 0..twol_max (zero blocks stored for uniformity).
struct Coeffs {
  int twol_max = -1;
  std::vector<Mat> blocks;

  static Coeffs zero(int twol_max);
  bool compatible(const Coeffs& o) const { return twol_max == o.twol_max; }
};

Coeffs add(const Coeffs& a, const Coeffs& b);
Coeffs scale(const Coeffs& a, cd s);

// Sampling grid + separated evaluation of the transform. The transform sums
// the exact tensor-product quadrature; the torus phases are factored through
// small DFT-matrix products per eta slice (t^l_{ij} = e^{2pi i(u xi1 + v xi2)} d^l_{ij}(eta)
// with integer u = twol-i-j, v = i-j), which reorganizes the same sums.
struct Grid {
  su2::QuadratureRule rule;
  int band;  // twol units
  int n_xi, n_eta;
  Eigen::VectorXd w;  // per-node weights in node_index order, sum 1

  // d[twol][r]: real Sym^twol matrix of [[sin,-cos],[cos,sin]](eta_r)
  std::vector<std::vector<Eigen::MatrixXd>> d;

  // centered DFT: dftc(u+band, p) = exp(-2 pi i u p / n_xi), u in [-band, band]
  Mat dftc;
  Mat idftc;  // idftc(p, u+band) = exp(+2 pi i u p / n_xi)

  // samples of q_{ij} = t^{1/2}_{ij} - delta_{ij}, index i*2+j
  std::array<Vec, 4> q;

  explicit Grid(su2::QuadratureRule r);

  std::size_t n_nodes() const { return rule.n_nodes(); }
  std::size_t node_index(int p, int q_, int r) const { return rule.node_index(p, q_, r); }
  su2::GroupElement node_element(int p, int q_, int r) const { return rule.node_element(p, q_, r); }

  Vec t_samples(int twol, int i, int j) const;

  cd integrate(const Eigen::Ref<const Vec>& f) const;

  Coeffs forward(const Eigen::Ref<const Vec>& samples, int out_twol) const;
  Vec inverse(const Coeffs& c) const;

  // column-wise batches
  std::vector<Coeffs> forward_batch(const Eigen::Ref<const Eigen::MatrixXcd>& samples,
                                    int out_twol) const;
  Eigen::MatrixXcd inverse_batch(const std::vector<Coeffs>& cs) const;
};

// Peter-Weyl series at an arbitrary group element (truncated at c.twol_max).
cd inverse_at(const Coeffs& c, const su2::GroupElement& g);

double plancherel_energy(const Coeffs& c);                 // sum (2l+1)||block||_HS^2
double sobolev_norm(const Coeffs& c, double s);            // (sum (2l+1)(1+c_l)^s ||.||^2)^(1/2)
double l2_norm(const Coeffs& c);

// Left-invariant field action on the transform side: blocks -> derived_rep * blocks.
Coeffs field_apply(const Coeffs& c, const su2::AlgebraElement& a);
Coeffs laplacian_apply(const Coeffs& c);

// O(n) sector projection: zero every row whose weight m_k != -n.
void project_section(Coeffs& c, int n);

struct SectionModel {
  int n = 0;
  Coeffs coeffs;
};

Coeffs random_bandlimited(int twol_max, RandomStream& rng, double decay_s = 1.0);
SectionModel random_section(int n, int twol_max, RandomStream& rng, double decay_s = 1.0);

// JSON schema "hopf-pdo/fourier/1": twol-keyed blocks of [re,im] pairs.
std::string coeffs_to_json(const Coeffs& c);
Coeffs coeffs_from_json(const std::string& text);

// CSV schema: header "xi1,xi2,eta,re,im", one row per grid node (any order on
// ingest; emission uses node order).
std::string samples_to_csv(const Grid& g, const Eigen::Ref<const Vec>& samples);
Vec samples_from_csv(const Grid& g, const std::string& text);

struct EngineParams {
  int twol_max = 12;   // 2L
  int twolx_max = 4;   // 2L_x
  int bundle = 0;      // n
  int order = 3;       // N
  std::uint64_t seed = 42;
  std::string cache_dir;  // empty -> HOPF_PDO_CACHE or "cache"
};

// Shared context: the function grid Y (band twol_max + max(twolx_max,4), where
// every integrand the artifact meets is integrated exactly) and the smaller
// grid X for the x-side of symbols (band = the symbol x-band cap).
struct Engine {
  EngineParams p;
  std::string cache_dir;
  int twol_grid;
  int twolx_grid;
  Grid Y;
  Grid X;

  explicit Engine(const EngineParams& params);
};

}  // namespace hopf::fourier
