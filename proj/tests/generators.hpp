#pragma once

// Seeded random inputs for property tests.

#include <cmath>
#include <cstdint>
#include <random>

#include "qmeas/matrixcore.hpp"
#include "qmeas/states.hpp"

namespace gen {

class Source {
 public:
  explicit Source(std::uint64_t seed) : engine_(seed) {}

  double real(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>()(engine_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

  qmeas::ComplexMatrix matrix(std::size_t rows, std::size_t cols) {
    qmeas::ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = {normal(), normal()};
    return m;
  }

  qmeas::ComplexMatrix hermitian(std::size_t d) {
    const auto m = matrix(d, d);
    return (m + m.adjoint()) / 2.0;
  }

  qmeas::ComplexMatrix unitary(std::size_t d) {
    return matrix(d, d).householderQr().householderQ();
  }

  qmeas::ComplexVector unit_vector(std::size_t d) {
    qmeas::ComplexVector v = matrix(d, 1).col(0);
    return v / v.norm();
  }

  // Random full-rank density matrix (Ginibre ensemble).
  qmeas::ComplexMatrix density(std::size_t d) {
    const auto g = matrix(d, d);
    qmeas::ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace();
    return (rho + rho.adjoint()) / 2.0;
  }

  // Two real amplitudes a1, a2 > 0 with a1^2 + a2^2 = 1 and a random relative phase.
  std::pair<qmeas::Complex, qmeas::Complex> amplitude_pair() {
    const double theta = real(0.05, 1.52);
    const double phase = real(0.0, 2.0 * std::acos(-1.0));
    return {std::cos(theta), std::polar(std::sin(theta), phase)};
  }

 private:
  std::mt19937_64 engine_;
};

inline qmeas::StateVector system_state(qmeas::Complex a1, qmeas::Complex a2) {
  qmeas::ComplexVector v(2);
  v << a1, a2;
  return qmeas::StateVector(qmeas::SpaceLayout({{"S", 2}}), v);
}

}  // namespace gen
