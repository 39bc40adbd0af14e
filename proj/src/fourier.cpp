#include "hopf/fourier.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

namespace hopf::fourier {

Coeffs Coeffs::zero(int twol_max) {
  Coeffs c;
  c.twol_max = twol_max;
  c.blocks.resize(twol_max + 1);
  for (int twol = 0; twol <= twol_max; ++twol) c.blocks[twol] = Mat::Zero(twol + 1, twol + 1);
  return c;
}

Coeffs add(const Coeffs& a, const Coeffs& b) {
  const int bmax = std::max(a.twol_max, b.twol_max);
  Coeffs r = Coeffs::zero(bmax);
  for (int twol = 0; twol <= bmax; ++twol) {
    if (twol <= a.twol_max) r.blocks[twol] += a.blocks[twol];
    if (twol <= b.twol_max) r.blocks[twol] += b.blocks[twol];
  }
  return r;
}

Coeffs scale(const Coeffs& a, cd s) {
  Coeffs r = a;
  for (auto& blk : r.blocks) blk *= s;
  return r;
}

Grid::Grid(su2::QuadratureRule r) : rule(std::move(r)) {
  band = rule.band;
  n_xi = rule.n_xi;
  n_eta = rule.n_eta;
  w = rule.node_weights();

  d.resize(band + 1);
  for (int twol = 0; twol <= band; ++twol) {
    d[twol].resize(n_eta);
    for (int rr = 0; rr < n_eta; ++rr) {
      Mat2 g0;
      const double sn = std::sin(rule.eta[rr]), cs = std::cos(rule.eta[rr]);
      g0 << sn, -cs, cs, sn;
      d[twol][rr] = repr::sym_power(g0, twol).real();
    }
  }

  dftc = Mat(n_xi, n_xi);
  idftc = Mat(n_xi, n_xi);
  for (int u = -band; u <= band; ++u)
    for (int p = 0; p < n_xi; ++p) {
      const cd ph = std::polar(1.0, -2.0 * PI * double(u) * double(p) / n_xi);
      dftc(u + band, p) = ph;
      idftc(p, u + band) = std::conj(ph);
    }

  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Vec qs = t_samples(1, i, j);
      if (i == j) qs.array() -= 1.0;
      q[i * 2 + j] = std::move(qs);
    }
}

Vec Grid::t_samples(int twol, int i, int j) const {
  if (twol > band) throw DomainError("t_samples: spin above grid band");
  const int u = twol - i - j, v = i - j;
  Vec out(n_nodes());
  for (int p = 0; p < n_xi; ++p) {
    const cd phu = idftc(p, u + band);
    for (int qq = 0; qq < n_xi; ++qq) {
      const cd ph = phu * idftc(qq, v + band);
      for (int rr = 0; rr < n_eta; ++rr) out[node_index(p, qq, rr)] = ph * d[twol][rr](i, j);
    }
  }
  return out;
}

cd Grid::integrate(const Eigen::Ref<const Vec>& f) const {
  return (w.cast<cd>().array() * f.array()).sum();
}

Coeffs Grid::forward(const Eigen::Ref<const Vec>& samples, int out_twol) const {
  if (samples.size() != Eigen::Index(n_nodes())) throw DomainError("forward: sample size mismatch");
  const int out = std::min(out_twol, band);
  const int nf = 2 * out + 1;
  const auto du = dftc.middleRows(band - out, nf);

  // per-slice phase sums F_r(u,v) = sum_{p,q} f(p,q,r) e^{-2 pi i (u p + v q)/n}
  std::vector<Mat> F(n_eta);
  Mat slice(n_xi, n_xi);
  for (int rr = 0; rr < n_eta; ++rr) {
    for (int p = 0; p < n_xi; ++p)
      for (int qq = 0; qq < n_xi; ++qq) slice(p, qq) = samples[node_index(p, qq, rr)];
    F[rr] = du * slice * du.transpose();
  }

  Coeffs c = Coeffs::zero(out);
  const double wn = 1.0 / (double(n_xi) * n_xi);
  for (int twol = 0; twol <= out; ++twol) {
    Mat& blk = c.blocks[twol];
    for (int i = 0; i <= twol; ++i)
      for (int j = 0; j <= twol; ++j) {
        const int u = twol - i - j, v = j - i;  // phases of conj(t_{ji})
        cd s = 0.0;
        for (int rr = 0; rr < n_eta; ++rr)
          s += rule.w_eta[rr] * d[twol][rr](j, i) * F[rr](u + out, v + out);
        blk(i, j) = s * wn;
      }
  }
  return c;
}

Vec Grid::inverse(const Coeffs& c) const {
  const int cb = std::min(c.twol_max, band);
  const int nf = 2 * cb + 1;

  std::vector<Mat> S(n_eta, Mat::Zero(nf, nf));
  for (int rr = 0; rr < n_eta; ++rr) {
    Mat& s = S[rr];
    for (int twol = 0; twol <= cb; ++twol) {
      const Mat& blk = c.blocks[twol];
      if (blk.size() == 0) continue;
      const Eigen::MatrixXd& dm = d[twol][rr];
      const double dimw = twol + 1.0;
      for (int i = 0; i <= twol; ++i)
        for (int j = 0; j <= twol; ++j) {
          const int u = twol - i - j, v = i - j;  // phases of t_{ij}
          s(u + cb, v + cb) += dimw * dm(i, j) * blk(j, i);
        }
    }
  }

  const auto iu = idftc.middleCols(band - cb, nf);
  Vec out(n_nodes());
  for (int rr = 0; rr < n_eta; ++rr) {
    const Mat slice = iu * S[rr] * iu.transpose();
    for (int p = 0; p < n_xi; ++p)
      for (int qq = 0; qq < n_xi; ++qq) out[node_index(p, qq, rr)] = slice(p, qq);
  }
  return out;
}

std::vector<Coeffs> Grid::forward_batch(const Eigen::Ref<const Eigen::MatrixXcd>& samples,
                                        int out_twol) const {
  std::vector<Coeffs> cs;
  cs.reserve(samples.cols());
  for (Eigen::Index b = 0; b < samples.cols(); ++b) cs.push_back(forward(samples.col(b), out_twol));
  return cs;
}

Eigen::MatrixXcd Grid::inverse_batch(const std::vector<Coeffs>& cs) const {
  Eigen::MatrixXcd out(n_nodes(), cs.size());
  for (std::size_t b = 0; b < cs.size(); ++b) out.col(b) = inverse(cs[b]);
  return out;
}

cd inverse_at(const Coeffs& c, const su2::GroupElement& g) {
  cd s = 0.0;
  for (int twol = 0; twol <= c.twol_max; ++twol) {
    const Mat& blk = c.blocks[twol];
    if (blk.size() == 0 || blk.norm() == 0.0) continue;
    const Mat rep = repr::irrep_matrix(twol, g);
    s += double(twol + 1) * (rep * blk).trace();
  }
  return s;
}

double plancherel_energy(const Coeffs& c) {
  double e = 0.0;
  for (int twol = 0; twol <= c.twol_max; ++twol)
    if (c.blocks[twol].size()) e += double(twol + 1) * c.blocks[twol].squaredNorm();
  return e;
}

double l2_norm(const Coeffs& c) { return std::sqrt(plancherel_energy(c)); }

double sobolev_norm(const Coeffs& c, double s) {
  double e = 0.0;
  for (int twol = 0; twol <= c.twol_max; ++twol)
    if (c.blocks[twol].size())
      e += double(twol + 1) * std::pow(1.0 + repr::casimir_eigenvalue(twol), s) *
           c.blocks[twol].squaredNorm();
  return std::sqrt(e);
}

Coeffs field_apply(const Coeffs& c, const su2::AlgebraElement& a) {
  Coeffs r = c;
  for (int twol = 0; twol <= c.twol_max; ++twol)
    if (r.blocks[twol].size()) r.blocks[twol] = repr::derived_rep(twol, a) * r.blocks[twol];
  return r;
}

Coeffs laplacian_apply(const Coeffs& c) {
  Coeffs r = c;
  for (int twol = 0; twol <= c.twol_max; ++twol)
    if (r.blocks[twol].size()) r.blocks[twol] *= repr::casimir_eigenvalue(twol);
  return r;
}

void project_section(Coeffs& c, int n) {
  for (int twol = 0; twol <= c.twol_max; ++twol) {
    Mat& blk = c.blocks[twol];
    if (!blk.size()) continue;
    // keep only the row with weight m_k = -n, i.e. k = (twol + n)/2
    if ((twol + n) % 2 != 0 || twol < std::abs(n)) {
      blk.setZero();
      continue;
    }
    const int keep = (twol + n) / 2;
    for (int k = 0; k <= twol; ++k)
      if (k != keep) blk.row(k).setZero();
  }
}

Coeffs random_bandlimited(int twol_max, RandomStream& rng, double decay_s) {
  Coeffs c = Coeffs::zero(twol_max);
  for (int twol = 0; twol <= twol_max; ++twol) {
    const double sc = std::pow(1.0 + repr::casimir_eigenvalue(twol), -decay_s);
    for (int i = 0; i <= twol; ++i)
      for (int j = 0; j <= twol; ++j) c.blocks[twol](i, j) = sc * rng.cnormal();
  }
  return c;
}

SectionModel random_section(int n, int twol_max, RandomStream& rng, double decay_s) {
  SectionModel u;
  u.n = n;
  u.coeffs = Coeffs::zero(twol_max);
  for (int twol = 0; twol <= twol_max; ++twol) {
    if ((twol + n) % 2 != 0 || twol < std::abs(n)) continue;
    const int k = (twol + n) / 2;
    const double sc = std::pow(1.0 + repr::casimir_eigenvalue(twol), -decay_s);
    for (int j = 0; j <= twol; ++j) u.coeffs.blocks[twol](k, j) = sc * rng.cnormal();
  }
  return u;
}

std::string coeffs_to_json(const Coeffs& c) {
  nlohmann::json j;
  j["schema"] = "hopf-pdo/fourier/1";
  j["twol_max"] = c.twol_max;
  nlohmann::json blocks = nlohmann::json::object();
  for (int twol = 0; twol <= c.twol_max; ++twol) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i <= twol; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int jj = 0; jj <= twol; ++jj) {
        const cd z = c.blocks[twol].size() ? c.blocks[twol](i, jj) : cd(0, 0);
        row.push_back({z.real(), z.imag()});
      }
      rows.push_back(row);
    }
    blocks[std::to_string(twol)] = rows;
  }
  j["blocks"] = blocks;
  return j.dump(1);
}

Coeffs coeffs_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("coeffs_from_json: ") + e.what());
  }
  if (j.value("schema", "") != "hopf-pdo/fourier/1")
    throw ParseError("coeffs_from_json: unknown schema");
  Coeffs c = Coeffs::zero(j.at("twol_max").get<int>());
  for (auto& [key, rows] : j.at("blocks").items()) {
    const int twol = std::stoi(key);
    if (twol < 0 || twol > c.twol_max) throw ParseError("coeffs_from_json: block key out of range");
    if (int(rows.size()) != twol + 1) throw ParseError("coeffs_from_json: bad block shape");
    for (int i = 0; i <= twol; ++i)
      for (int jj = 0; jj <= twol; ++jj)
        c.blocks[twol](i, jj) = cd(rows[i][jj][0].get<double>(), rows[i][jj][1].get<double>());
  }
  return c;
}

std::string samples_to_csv(const Grid& g, const Eigen::Ref<const Vec>& samples) {
  std::ostringstream os;
  os.precision(17);
  os << "xi1,xi2,eta,re,im\n";
  for (int p = 0; p < g.n_xi; ++p)
    for (int qq = 0; qq < g.n_xi; ++qq)
      for (int rr = 0; rr < g.n_eta; ++rr) {
        const cd z = samples[g.node_index(p, qq, rr)];
        os << g.rule.xi[p] << "," << g.rule.xi[qq] << "," << g.rule.eta[rr] << "," << z.real()
           << "," << z.imag() << "\n";
      }
  return os.str();
}

Vec samples_from_csv(const Grid& g, const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw ParseError("samples_from_csv: empty input");
  // normalize header
  std::string hdr;
  for (char ch : line)
    if (!std::isspace(static_cast<unsigned char>(ch))) hdr += std::tolower(ch);
  if (hdr != "xi1,xi2,eta,re,im") throw ParseError("samples_from_csv: expected header xi1,xi2,eta,re,im");

  Vec out = Vec::Zero(g.n_nodes());
  std::vector<char> seen(g.n_nodes(), 0);
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    double vals[5];
    std::size_t pos = 0;
    for (int f = 0; f < 5; ++f) {
      const std::size_t nxt = (f < 4) ? line.find(',', pos) : line.size();
      if (f < 4 && nxt == std::string::npos)
        throw ParseError("samples_from_csv: row " + std::to_string(row) + ": expected 5 fields");
      try {
        vals[f] = std::stod(line.substr(pos, nxt - pos));
      } catch (...) {
        throw ParseError("samples_from_csv: row " + std::to_string(row) + ": bad number");
      }
      pos = nxt + 1;
    }
    const int p = int(std::lround(vals[0] * g.n_xi)) % g.n_xi;
    const int qq = int(std::lround(vals[1] * g.n_xi)) % g.n_xi;
    int rr = 0;
    double best = 1e300;
    for (int r2 = 0; r2 < g.n_eta; ++r2) {
      const double dd = std::abs(g.rule.eta[r2] - vals[2]);
      if (dd < best) {
        best = dd;
        rr = r2;
      }
    }
    if (p < 0 || qq < 0 || std::abs(g.rule.xi[p] - vals[0]) > 1e-6 ||
        std::abs(g.rule.xi[qq] - vals[1]) > 1e-6 || best > 1e-6)
      throw ParseError("samples_from_csv: row " + std::to_string(row) +
                       ": angles do not match a grid node (band mismatch?)");
    const std::size_t idx = g.node_index(p, qq, rr);
    if (seen[idx]) throw ParseError("samples_from_csv: duplicate node at row " + std::to_string(row));
    seen[idx] = 1;
    out[idx] = cd(vals[3], vals[4]);
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw ParseError("samples_from_csv: grid not fully covered (missing nodes)");
  return out;
}

Engine::Engine(const EngineParams& params)
    : p(params),
      cache_dir(su2::resolve_cache_dir(params.cache_dir)),
      twol_grid(params.twol_max + std::max(params.twolx_max, 4)),
      twolx_grid(std::max(2 * params.twolx_max, 4)),
      Y(su2::load_or_build_quadrature(params.twol_max + std::max(params.twolx_max, 4), cache_dir)),
      X(su2::load_or_build_quadrature(std::max(2 * params.twolx_max, 4), cache_dir)) {
  if (p.twol_max < 0 || p.twolx_max < 0) throw DomainError("Engine: negative band");
  if (p.twol_max < std::abs(p.bundle))
    throw DomainError("Engine: band must satisfy 2L >= |n| (got 2L=" + std::to_string(p.twol_max) +
                      ", n=" + std::to_string(p.bundle) + ")");
  if (p.order < 0 || p.order > 4) throw DomainError("Engine: truncation order must be in [0,4]");
}

}  // namespace hopf::fourier
