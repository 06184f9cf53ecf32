#pragma once

// Dense two-qubit POVM oracle for one photon pair: state vector in the
// {HH, HV, VH, VV} basis, rank-one projectors built as outer products,
// misalignment as a noisy POVM and loss as an extra POVM element.

#include <array>
#include <cmath>
#include <numbers>

namespace oracle {

using Mat2 = std::array<std::array<double, 2>, 2>;
using Mat4 = std::array<std::array<double, 4>, 4>;

inline Mat2 basis_projector(double deg, int outcome) {
  const double t = deg * std::numbers::pi / 180.0;
  const double v0 = outcome == 0 ? std::cos(t) : -std::sin(t);
  const double v1 = outcome == 0 ? std::sin(t) : std::cos(t);
  return {{{v0 * v0, v0 * v1}, {v1 * v0, v1 * v1}}};
}

inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
  return out;
}

// POVM element for outcome 0, 1 or 2 (lost) of one party.
inline Mat2 povm(double deg, double eta, double mis, int outcome) {
  if (outcome == 2) return {{{1.0 - eta, 0.0}, {0.0, 1.0 - eta}}};
  const Mat2 keep = basis_projector(deg, outcome);
  const Mat2 swap = basis_projector(deg, 1 - outcome);
  Mat2 e{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) e[i][j] = eta * ((1.0 - mis) * keep[i][j] + mis * swap[i][j]);
  return e;
}

// probs[3*a + b] over {0, 1, lost}^2 for the state (|HV> + r|VH>)/sqrt(1+r^2).
inline std::array<double, 9> single_pair(double r, double deg_a, double deg_b, double eta_a, double eta_b,
                                         double mis) {
  const double norm = std::sqrt(1.0 + r * r);
  const std::array<double, 4> psi{0.0, 1.0 / norm, r / norm, 0.0};
  std::array<double, 9> out{};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const Mat4 e = kron(povm(deg_a, eta_a, mis, a), povm(deg_b, eta_b, mis, b));
      double v = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) v += psi[i] * e[i][j] * psi[j];
      out[3 * a + b] = v;
    }
  }
  return out;
}

}  // namespace oracle
