#pragma once

#include <doctest.h>

#include "hopf/fourier.hpp"
#include "hopf/repr.hpp"
#include "hopf/su2.hpp"

namespace th {

using namespace hopf;

inline su2::GroupElement random_group(RandomStream& rng) {
  return su2::from_angles(rng.uniform01(), rng.uniform01(), std::asin(std::sqrt(rng.uniform01())));
}

// Hermitian algebra element (h real, y = conj(x)) so exp_group stays in SU(2).
inline su2::AlgebraElement random_hermitian(RandomStream& rng) {
  const double h = rng.normal();
  const cd x = 0.5 * rng.cnormal();
  return su2::AlgebraElement(h, x, std::conj(x));
}

inline su2::AlgebraElement random_algebra(RandomStream& rng) {
  return su2::AlgebraElement(0.5 * rng.cnormal(), 0.5 * rng.cnormal(), 0.5 * rng.cnormal());
}

// literal power series oracle for e^{2 pi i t A}
inline Mat2 exp_series(const su2::AlgebraElement& a, double t, int terms = 40) {
  const Mat2 m = (2.0 * PI * IU * t) * a.matrix();
  Mat2 acc = Mat2::Identity(), term = Mat2::Identity();
  for (int k = 1; k <= terms; ++k) {
    term = (term * m) / double(k);
    acc += term;
  }
  return acc;
}

}  // namespace th
