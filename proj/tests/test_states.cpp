#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "qmeas/errors.hpp"
#include "qmeas/measurement.hpp"

using namespace qmeas;

namespace {

const SpaceLayout kS({{"S", 2}});
const SpaceLayout kO({{"O", 3}});
const SpaceLayout kMS({{"S", 2}, {"O", 3}});

StateVector ms_branch(std::size_t s) { return StateVector::basis(kMS, s * 3 + s + 1); }

Gemenge mixed_ms(double p1) { return Gemenge({{ms_branch(0), p1}, {ms_branch(1), 1.0 - p1}}); }

StateVector pure_ms(Complex a1, Complex a2) {
  ComplexVector v = ComplexVector::Zero(6);
  v(1) = a1;
  v(5) = a2;
  return StateVector(kMS, v);
}

}  // namespace

TEST_CASE("state vectors validate normalization") {
  ComplexVector v(2);
  v << 0.6, 0.8;
  CHECK_NOTHROW(StateVector(kS, v));
  v << 0.6, 0.7;
  CHECK_THROWS_AS(StateVector(kS, v), ValidationError);
  CHECK_THROWS_AS(StateVector(kO, ComplexVector::Ones(2) / std::sqrt(2.0)), ValidationError);
  CHECK_THROWS_AS(StateVector::basis(kS, 2), ValidationError);
}

TEST_CASE("density matrices validate Hermiticity, trace and positivity") {
  CHECK_NOTHROW(DensityMatrix(kS, identity(2) / 2.0));
  CHECK_THROWS_AS(DensityMatrix(kS, identity(2)), ValidationError);
  CHECK_THROWS_AS(DensityMatrix(kS, diagonal({1.5, -0.5})), ValidationError);
  ComplexMatrix m = identity(2) / 2.0;
  m(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix(kS, m), ValidationError);
  CHECK_THROWS_AS(DensityMatrix(kO, identity(2) / 2.0), ValidationError);
}

TEST_CASE("density_from_vector examples") {
  CHECK(max_abs_diff(density_from_vector(StateVector::basis(kO, 0)).matrix(), diagonal({1.0, 0.0, 0.0})) == 0.0);

  const StateVector plus(kS, ComplexVector::Ones(2) / std::numbers::sqrt2);
  CHECK(max_abs_diff(density_from_vector(plus).matrix(), ComplexMatrix::Constant(2, 2, 0.5)) <= 1e-15);

  const double h = 1.0 / std::numbers::sqrt2;
  const auto rho = density_from_vector(pure_ms(h, h)).matrix();
  for (Eigen::Index i = 0; i < 6; ++i) {
    for (Eigen::Index j = 0; j < 6; ++j) {
      const bool hot = (i == 1 || i == 5) && (j == 1 || j == 5);
      CHECK(std::abs(rho(i, j) - (hot ? 0.5 : 0.0)) <= 1e-15);
    }
  }
}

TEST_CASE("gemenge_mix examples") {
  CHECK(max_abs_diff(gemenge_mix(Gemenge({{StateVector::basis(kS, 0), 1.0}})).matrix(),
                     diagonal({1.0, 0.0})) == 0.0);
  const auto m = gemenge_mix(mixed_ms(0.3)).matrix();
  ComplexMatrix expected = ComplexMatrix::Zero(6, 6);
  expected(1, 1) = 0.3;
  expected(5, 5) = 0.7;
  CHECK(max_abs_diff(m, expected) <= 1e-15);
  CHECK(max_abs_diff(
            gemenge_mix(Gemenge({{StateVector::basis(kS, 0), 0.5}, {StateVector::basis(kS, 1), 0.5}})).matrix(),
            identity(2) / 2.0) <= 1e-15);
}

TEST_CASE("gemenge validation") {
  CHECK_THROWS_AS(Gemenge({}), ValidationError);
  CHECK_THROWS_AS(Gemenge({{StateVector::basis(kS, 0), 0.5}}), ValidationError);
  CHECK_THROWS_AS(Gemenge({{StateVector::basis(kS, 0), 1.2}, {StateVector::basis(kS, 1), -0.2}}), ValidationError);
  CHECK_THROWS_AS(Gemenge({{StateVector::basis(kS, 0), 0.5}, {StateVector::basis(kO, 1), 0.5}}), ValidationError);
}

TEST_CASE("sample_gemenge frequencies and determinism") {
  RandomStream single(1);
  const Gemenge one({{StateVector::basis(kS, 1), 1.0}});
  for (int i = 0; i < 100; ++i) CHECK(sample_gemenge(one, single).first == 0);

  const Gemenge w({{StateVector::basis(kS, 0), 0.3}, {StateVector::basis(kS, 1), 0.7}});
  const int n = 100000;
  RandomStream a(99), b(99);
  int zeros = 0;
  bool identical = true;
  for (int i = 0; i < n; ++i) {
    const auto ra = sample_gemenge(w, a).first;
    identical = identical && ra == sample_gemenge(w, b).first;
    zeros += ra == 0;
  }
  CHECK(identical);
  CHECK(std::abs(zeros / double(n) - 0.3) <= 3.0 * std::sqrt(0.3 * 0.7 / n));
}

TEST_CASE("sampled gemenge states average to the mixture") {
  gen::Source src(4);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<GemengeRow> rows;
    std::vector<double> weights{src.real(0.1, 1.0), src.real(0.1, 1.0), src.real(0.1, 1.0)};
    const double total = weights[0] + weights[1] + weights[2];
    for (double wgt : weights) rows.push_back({StateVector(kO, src.unit_vector(3)), wgt / total});
    const Gemenge w(rows);
    RandomStream rng(trial);
    ComplexMatrix avg = ComplexMatrix::Zero(3, 3);
    const int n = 100000;
    for (int i = 0; i < n; ++i) avg += density_from_vector(sample_gemenge(w, rng).second).matrix();
    avg /= double(n);
    CHECK(max_abs_diff(avg, gemenge_mix(w).matrix()) <= 5e-3);
  }
}

TEST_CASE("expectation examples") {
  const MeasurementModel model;
  const auto b = interference_observable(model);
  const double h = 1.0 / std::numbers::sqrt2;
  CHECK(std::abs(expectation(density_from_vector(pure_ms(h, h)), b) - 1.0) <= 1e-12);
  CHECK(std::abs(expectation(gemenge_mix(mixed_ms(0.3)), b)) <= 1e-15);

  const auto q_o = embed(pointer_observable(model), kMS, "O");
  const auto psi = pure_ms(std::sqrt(0.3), std::sqrt(0.7));
  CHECK(std::abs(expectation(density_from_vector(psi), q_o) + 0.4) <= 1e-12);
  CHECK(std::abs(expectation(gen::system_state(std::sqrt(0.3), std::sqrt(0.7)), system_observable(model)) + 0.4) <=
        1e-12);
}

TEST_CASE("expectation rejects non-Hermitian observables") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  CHECK_THROWS_AS(expectation(DensityMatrix(kS, identity(2) / 2.0), a), ValidationError);
  CHECK_THROWS_AS(expectation(StateVector::basis(kS, 0), a), ValidationError);
  CHECK_THROWS_AS(expectation(StateVector::basis(kS, 0), identity(3)), ValidationError);
}

TEST_CASE("expectation is linear in the observable") {
  gen::Source src(17);
  for (int trial = 0; trial < 50; ++trial) {
    const DensityMatrix rho(kMS, src.density(6));
    const auto a = src.hermitian(6), b = src.hermitian(6);
    const double alpha = src.real(-2, 2), beta = src.real(-2, 2);
    CHECK(std::abs(expectation(rho, alpha * a + beta * b) -
                   (alpha * expectation(rho, a) + beta * expectation(rho, b))) <= 1e-10);
  }
}

TEST_CASE("purity is one exactly for pure states") {
  gen::Source src(23);
  for (int trial = 0; trial < 30; ++trial) {
    const StateVector v(kMS, src.unit_vector(6));
    CHECK(std::abs(density_from_vector(v).purity() - 1.0) <= 1e-9);
    const DensityMatrix mixed(kMS, src.density(6));
    CHECK(mixed.purity() < 1.0 - 1e-9);
  }
}

TEST_CASE("measurement is unbiased: <Q> on S equals <Q_O> after premeasurement") {
  gen::Source src(31);
  const MeasurementModel model;
  const auto q_o = embed(pointer_observable(model), kMS, "O");
  const auto u = premeasurement_unitary(model);
  for (int trial = 0; trial < 50; ++trial) {
    const auto [a1, a2] = src.amplitude_pair();
    const auto psi_s = gen::system_state(a1, a2);
    const StateVector after(kMS, u * initial_state(model, psi_s).amplitudes());
    CHECK(std::abs(expectation(psi_s, system_observable(model)) - expectation(after, q_o)) <= 1e-10);
  }
}

TEST_CASE("reduced states and conjugation") {
  gen::Source src(2);
  const DensityMatrix rho(kMS, src.density(6));
  CHECK(std::abs(rho.reduced({"O"}).trace() - 1.0) <= 1e-12);
  const auto u = src.unitary(6);
  const auto conj = rho.conjugated(u);
  CHECK(std::abs(conj.purity() - rho.purity()) <= 1e-12);
  CHECK_THROWS_AS(rho.conjugated(src.matrix(6, 6)), ValidationError);
}

TEST_CASE("random streams are reproducible and derived streams differ") {
  RandomStream a(5), b(5);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  CHECK(derive_seed(5, 0) != derive_seed(5, 1));
  CHECK(derive_seed(5, 0) != derive_seed(6, 0));
  RandomStream u(0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK((x >= 0.0 && x < 1.0));
  }
  const double weights[] = {0.0, 1.0, 0.0};
  for (int i = 0; i < 100; ++i) CHECK(sample_index(weights, u) == 1);
  const double bad[] = {-0.1, 1.1};
  CHECK_THROWS_AS(sample_index(bad, u), ValidationError);
  const double zero[] = {0.0, 0.0};
  CHECK_THROWS_AS(sample_index(zero, u), ValidationError);
}
