#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "qmeas/algebra.hpp"
#include "qmeas/errors.hpp"
#include "qmeas/measurement.hpp"

using namespace qmeas;

namespace {

const SpaceLayout kO({{"O", 3}});
const SpaceLayout kMS({{"S", 2}, {"O", 3}});
const SpaceLayout kQubit({{"H", 2}});

ComplexMatrix q_o() { return diagonal({0.0, 1.0, -1.0}); }

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix pauli_z() { return diagonal({1.0, -1.0}); }

std::vector<double> sorted_first_values(const SpectralResolution& r) {
  std::vector<double> v;
  for (const auto& row : r.values) v.push_back(row.front());
  std::sort(v.begin(), v.end());
  return v;
}

void check_closure_invariants(const OperatorAlgebra& alg) {
  const std::size_t d = alg.space_dim();
  CHECK(alg.membership_residual(identity(d)) <= 1e-9);
  for (std::size_t i = 0; i < alg.dimension(); ++i) {
    const auto& m = alg.basis()[i];
    CHECK(alg.membership_residual(m.adjoint()) <= 1e-9);
    for (std::size_t j = 0; j < alg.dimension(); ++j) {
      CHECK(alg.membership_residual(m * alg.basis()[j]) <= 1e-9);
      const Complex ip = hs_inner(m, alg.basis()[j]);
      CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-10);
    }
  }
  CHECK(alg.dimension() >= 1);
  CHECK(alg.dimension() <= d * d);
}

}  // namespace

TEST_CASE("generate_algebra examples agree with the brute-force closure oracle") {
  const auto unit = generate_algebra({identity(3)}, kO);
  CHECK(unit.dimension() == 1);
  CHECK(unit.commutative());

  const auto u_o = generate_algebra({q_o()}, kO);
  CHECK(u_o.dimension() == 3);
  CHECK(oracle::closure_dimension({q_o()}) == 3);
  CHECK(u_o.commutative());

  const auto full = generate_algebra({pauli_x(), pauli_z()}, kQubit);
  CHECK(full.dimension() == 4);
  CHECK(oracle::closure_dimension({pauli_x(), pauli_z()}) == 4);
  CHECK_FALSE(full.commutative());
  CHECK_FALSE(oracle::closure_commutative({pauli_x(), pauli_z()}));
}

TEST_CASE("closure dimension matches the oracle on random generator sets") {
  gen::Source src(41);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t d = 2 + src.index(3);
    const SpaceLayout layout({{"H", d}});
    std::vector<ComplexMatrix> gens;
    const int kind = trial % 5;
    if (kind == 0) {
      // Commuting family: functions of one Hermitian matrix with a repeated eigenvalue.
      const auto u = src.unitary(d);
      RealVector ev(d);
      for (std::size_t k = 0; k < d; ++k) ev(k) = static_cast<double>(k / 2);
      gens.push_back(u * ev.cast<Complex>().asDiagonal() * u.adjoint());
    } else if (kind == 1) {
      gens.push_back(src.hermitian(d));
    } else if (kind == 2) {
      gens.push_back(src.matrix(d, d));  // non-Hermitian generator; adjoint must be adjoined
    } else if (kind == 3) {
      // Block-diagonal pair: generates a proper non-commutative subalgebra.
      ComplexMatrix a = ComplexMatrix::Zero(d, d), b = ComplexMatrix::Zero(d, d);
      a.topLeftCorner(2, 2) = pauli_x();
      b.topLeftCorner(2, 2) = pauli_z();
      gens = {a, b};
    } else {
      gens = {src.hermitian(d), src.hermitian(d)};
    }
    const auto alg = generate_algebra(gens, layout);
    CHECK(alg.dimension() == oracle::closure_dimension(gens));
    CHECK(alg.commutative() == oracle::closure_commutative(gens));
    check_closure_invariants(alg);
  }
}

TEST_CASE("closure is idempotent") {
  gen::Source src(43);
  for (int trial = 0; trial < 10; ++trial) {
    const auto gens = std::vector<ComplexMatrix>{src.hermitian(3), diagonal({1.0, 1.0, 0.0})};
    const auto alg = generate_algebra(gens, SpaceLayout({{"H", 3}}));
    const auto again = generate_algebra(alg.basis(), alg.layout());
    CHECK(again.dimension() == alg.dimension());
    for (const auto& m : alg.basis()) CHECK(again.membership_residual(m) <= 1e-9);
    for (const auto& m : again.basis()) CHECK(alg.membership_residual(m) <= 1e-9);
  }
}

TEST_CASE("is_commutative examples") {
  CHECK(is_commutative(generate_algebra({q_o()}, kO)));
  CHECK_FALSE(is_commutative(generate_algebra({pauli_x(), pauli_z()}, kQubit)));
  const MeasurementModel model;
  const auto q_ext = embed(pointer_observable(model), kMS, "O");
  const auto with_b = generate_algebra({q_ext, interference_observable(model)}, kMS);
  CHECK_FALSE(with_b.commutative());
  CHECK(max_commutator(with_b) > 0.1);
}

TEST_CASE("contains examples") {
  const auto u_o = generate_algebra({q_o()}, kO);
  CHECK(contains(u_o, q_o() * q_o()));
  CHECK(contains(u_o, ComplexMatrix::Zero(3, 3)));
  CHECK_FALSE(contains(u_o, pauli_x().replicate(2, 2).topLeftCorner(3, 3)));

  const MeasurementModel model;
  const auto u_o_ms = generate_algebra({embed(pointer_observable(model), kMS, "O")}, kMS);
  CHECK_FALSE(contains(u_o_ms, interference_observable(model)));
  CHECK_THROWS_AS(contains(u_o_ms, identity(3)), ValidationError);
}

TEST_CASE("joint spectral resolution examples") {
  const auto r = joint_spectral_resolution(generate_algebra({q_o()}, kO));
  REQUIRE(r.projectors.size() == 3);
  CHECK(sorted_first_values(r) == std::vector<double>{-1.0, 0.0, 1.0});
  for (const auto& p : r.projectors) CHECK(std::abs(p.trace() - 1.0) <= 1e-12);

  const auto unit = joint_spectral_resolution(generate_algebra({identity(2)}, kQubit));
  REQUIRE(unit.projectors.size() == 1);
  CHECK(max_abs_diff(unit.projectors[0], identity(2)) <= 1e-12);
  CHECK(unit.values[0][0] == doctest::Approx(1.0));

  const MeasurementModel model;
  const auto ext = joint_spectral_resolution(generate_algebra({embed(q_o(), kMS, "O")}, kMS));
  REQUIRE(ext.projectors.size() == 3);
  for (const auto& p : ext.projectors) CHECK(std::abs(p.trace() - 2.0) <= 1e-12);
  CHECK(sorted_first_values(ext) == std::vector<double>{-1.0, 0.0, 1.0});

  CHECK_THROWS_AS(joint_spectral_resolution(generate_algebra({pauli_x(), pauli_z()}, kQubit)), ValidationError);
}

TEST_CASE("spectral projectors form a resolution of the identity and reconstruct generators") {
  gen::Source src(47);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t d = 3 + src.index(4);
    const auto u = src.unitary(d);
    RealVector ev1(d), ev2(d);
    for (std::size_t k = 0; k < d; ++k) {
      ev1(k) = static_cast<double>(k % 3);
      ev2(k) = static_cast<double>(k % 2) * 2.5;
    }
    const ComplexMatrix g1 = u * ev1.cast<Complex>().asDiagonal() * u.adjoint();
    const ComplexMatrix g2 = u * ev2.cast<Complex>().asDiagonal() * u.adjoint();
    const auto alg = generate_algebra({g1, g2}, SpaceLayout({{"H", d}}));
    REQUIRE(alg.commutative());
    const auto r = joint_spectral_resolution(alg);
    CHECK(r.projectors.size() == alg.dimension());

    ComplexMatrix sum = ComplexMatrix::Zero(d, d), rebuilt1 = sum, rebuilt2 = sum;
    for (std::size_t k = 0; k < r.projectors.size(); ++k) {
      const auto& p = r.projectors[k];
      CHECK(max_abs_diff(p, p.adjoint()) <= 1e-12);
      CHECK(max_abs_diff(p * p, p) <= 1e-9);
      for (std::size_t j = 0; j < k; ++j) CHECK((r.projectors[j] * p).cwiseAbs().maxCoeff() <= 1e-9);
      for (const auto& a : alg.basis()) {
        CHECK(max_abs_diff(p * a * p, value_on_projector(p, a) * p) <= 1e-8);
      }
      sum += p;
      rebuilt1 += r.values[k][0] * p;
      rebuilt2 += r.values[k][1] * p;
    }
    CHECK(max_abs_diff(sum, identity(d)) <= 1e-9);
    CHECK(max_abs_diff(rebuilt1, g1) <= 1e-8);
    CHECK(max_abs_diff(rebuilt2, g2) <= 1e-8);
  }
}

TEST_CASE("spectral resolution does not depend on the random combination") {
  const MeasurementModel model;
  const auto alg = generate_algebra({embed(q_o(), kMS, "O"), embed(diagonal({1.0, -1.0}), kMS, "S")}, kMS);
  const auto reference = joint_spectral_resolution(alg, 1);
  for (std::uint64_t seed = 2; seed <= 11; ++seed) {
    const auto r = joint_spectral_resolution(alg, seed);
    REQUIRE(r.projectors.size() == reference.projectors.size());
    for (std::size_t k = 0; k < r.projectors.size(); ++k) {
      double best = 1e9;
      for (const auto& p : reference.projectors) best = std::min(best, max_abs_diff(p, r.projectors[k]));
      CHECK(best <= 1e-7);
      CHECK(r.values[k] == reference.values[k]);
    }
  }
}

TEST_CASE("value map over projectors is an algebra isomorphism") {
  gen::Source src(53);
  const auto alg = generate_algebra({embed(q_o(), kMS, "O")}, kMS);
  const auto r = joint_spectral_resolution(alg);
  for (int trial = 0; trial < 20; ++trial) {
    ComplexMatrix a = ComplexMatrix::Zero(6, 6), b = a;
    for (const auto& m : alg.basis()) {
      a += Complex(src.normal(), src.normal()) * m;
      b += Complex(src.normal(), src.normal()) * m;
    }
    for (const auto& p : r.projectors) {
      CHECK(std::abs(value_on_projector(p, a * b) - value_on_projector(p, a) * value_on_projector(p, b)) <= 1e-8);
      CHECK(std::abs(value_on_projector(p, a + b) - value_on_projector(p, a) - value_on_projector(p, b)) <= 1e-8);
    }
  }
}

TEST_CASE("generate_algebra input validation") {
  CHECK_THROWS_AS(generate_algebra({identity(2)}, kO), ValidationError);
  CHECK_THROWS_AS(generate_algebra({q_o()}, kO, 0.0), ValidationError);
  CHECK_THROWS_AS(generate_algebra({ComplexMatrix::Zero(3, 2)}, kO), ValidationError);
  CHECK(generate_algebra({}, kO).dimension() == 1);
}
