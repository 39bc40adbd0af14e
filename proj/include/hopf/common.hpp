#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace hopf {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2cd;

inline constexpr double PI = 3.14159265358979323846264338327950288;
inline constexpr cd IU{0.0, 1.0};  // imaginary unit

// Error taxonomy; exit_code is what the CLI process returns for this class.
struct Error : std::runtime_error {
  int exit_code;
  Error(int code, const std::string& msg) : std::runtime_error(msg), exit_code(code) {}
};
struct ParseError : Error {
  explicit ParseError(const std::string& m) : Error(2, m) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error(3, m) {}
};
struct PrecisionError : Error {
  explicit PrecisionError(const std::string& m) : Error(4, m) {}
};
struct EllipticityError : Error {
  explicit EllipticityError(const std::string& m) : Error(5, m) {}
};
struct InternalError : Error {
  explicit InternalError(const std::string& m) : Error(10, m) {}
};

// Deterministic random stream. Box-Muller is hand-rolled because the stdlib's
// normal_distribution is implementation-defined and reports must be
// bit-reproducible across toolchains for a fixed seed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {  // in [0,1), 53-bit resolution
    return static_cast<double>(eng_() >> 11) * (1.0 / 9007199254740992.0);
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  cd cnormal() {
    const double re = normal();
    const double im = normal();
    return cd(re, im);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Sub-stream seed derivation so different purposes decorrelate under one user seed.
inline std::uint64_t seed_for(std::uint64_t base, const std::string& tag) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return base ^ h;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double c = 1.0;
  for (int i = 0; i < k; ++i) c = c * double(n - i) / double(i + 1);
  return c;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Spins are carried as integers twol = 2*ell throughout.
inline int spin_dim(int twol) { return twol + 1; }

// Pretty "ell" for reports: "3/2" style avoided; decimal keeps CSV simple.
inline std::string ell_string(int twol) {
  if (twol % 2 == 0) return std::to_string(twol / 2);
  return std::to_string(twol / 2) + (twol >= 0 ? ".5" : ".5");
}

}  // namespace hopf
