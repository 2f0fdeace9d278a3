#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "oracles.hpp"
#include "qmeas/errors.hpp"
#include "qmeas/measurement.hpp"

using namespace qmeas;

namespace {

ComplexMatrix pure_ms(double a1, double a2) {
  const MeasurementModel model;
  ComplexVector psi = ComplexVector::Zero(6);
  psi(1) = a1;
  psi(5) = a2;
  return psi * psi.adjoint();
}

}  // namespace

TEST_CASE("tensor products follow first-factor-slowest ordering") {
  CHECK(max_abs_diff(tensor(identity(2), identity(3)), identity(6)) == 0.0);
  CHECK(max_abs_diff(tensor(diagonal({1.0, -1.0}), identity(2)), diagonal({1.0, 1.0, -1.0, -1.0})) == 0.0);

  const ComplexMatrix p = tensor(outer(basis_vector(2, 0), basis_vector(2, 0)),
                                 outer(basis_vector(3, 1), basis_vector(3, 1)));
  ComplexMatrix expected = ComplexMatrix::Zero(6, 6);
  expected(1, 1) = 1.0;
  CHECK(max_abs_diff(p, expected) == 0.0);

  const SpaceLayout layout({{"S", 2}, {"O", 3}});
  const std::size_t digits[] = {1, 2};
  CHECK(layout.index(digits) == 5);
}

TEST_CASE("tensor is associative") {
  gen::Source src(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = src.matrix(2, 2), b = src.matrix(3, 3), c = src.matrix(2, 2);
    CHECK(max_abs_diff(tensor(tensor(a, b), c), tensor(a, tensor(b, c))) <= 1e-12);
  }
}

TEST_CASE("partial trace examples") {
  const SpaceLayout ms({{"S", 2}, {"O", 3}});
  const double h = 1.0 / std::numbers::sqrt2;
  CHECK(max_abs_diff(partial_trace(pure_ms(h, h), ms, {"O"}), diagonal({0.0, 0.5, 0.5})) <= 1e-12);

  ComplexMatrix mixed = ComplexMatrix::Zero(6, 6);
  mixed(1, 1) = 0.3;
  mixed(5, 5) = 0.7;
  CHECK(max_abs_diff(partial_trace(mixed, ms, {"O"}), diagonal({0.0, 0.3, 0.7})) <= 1e-12);

  gen::Source src(5);
  const SpaceLayout ab({{"A", 3}, {"B", 2}});
  const auto ra = src.density(3), rb = src.density(2);
  CHECK(max_abs_diff(partial_trace(tensor(ra, rb), ab, {"A"}), ra) <= 1e-12);
}

TEST_CASE("partial trace matches index-loop oracle, preserves trace, and composes") {
  gen::Source src(21);
  const SpaceLayout layout({{"S", 2}, {"O", 3}, {"E", 2}});
  const std::vector<std::size_t> dims{2, 3, 2};
  for (int trial = 0; trial < 25; ++trial) {
    const auto m = src.matrix(12, 12);
    const auto keep_o = partial_trace(m, layout, {"O"});
    CHECK(max_abs_diff(keep_o, oracle::partial_trace(m, dims, {false, true, false})) <= 1e-12);
    CHECK(max_abs_diff(partial_trace(m, layout, {"S", "E"}),
                       oracle::partial_trace(m, dims, {true, false, true})) <= 1e-12);
    CHECK(std::abs(keep_o.trace() - m.trace()) <= 1e-12 * (1.0 + std::abs(m.trace())));

    const auto so = partial_trace(m, layout, {"S", "O"});
    const auto two_step = partial_trace(so, layout.restricted_to(std::vector<std::string>{"S", "O"}), {"O"});
    CHECK(max_abs_diff(two_step, keep_o) <= 1e-12);
  }
}

TEST_CASE("partial trace keeps factors in layout order regardless of request order") {
  gen::Source src(3);
  const SpaceLayout layout({{"S", 2}, {"O", 3}, {"E", 2}});
  const auto m = src.matrix(12, 12);
  CHECK(max_abs_diff(partial_trace(m, layout, {"E", "S"}), partial_trace(m, layout, {"S", "E"})) == 0.0);
}

TEST_CASE("hermitian_eig examples") {
  auto e = hermitian_eig(diagonal({0.0, 1.0, -1.0}));
  CHECK(e.values(0) == doctest::Approx(-1.0));
  CHECK(e.values(1) == doctest::Approx(0.0));
  CHECK(e.values(2) == doctest::Approx(1.0));

  ComplexMatrix x(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  e = hermitian_eig(x);
  CHECK(e.values(0) == doctest::Approx(-1.0));
  CHECK(e.values(1) == doctest::Approx(1.0));

  const ComplexMatrix b = interference_observable(MeasurementModel{});
  e = hermitian_eig(b);
  REQUIRE(e.clusters.size() == 3);
  CHECK(e.clusters[0].value == doctest::Approx(-1.0));
  CHECK(e.clusters[0].size == 1);
  CHECK(e.clusters[1].value == doctest::Approx(0.0));
  CHECK(e.clusters[1].size == 4);
  CHECK(e.clusters[2].value == doctest::Approx(1.0));
  CHECK(e.clusters[2].size == 1);
  CHECK(max_abs_diff(b * b * b * b, b * b) <= 1e-12);
}

TEST_CASE("hermitian_eig reconstructs, sums to the trace, and is orthonormal") {
  gen::Source src(8);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 2 + src.index(7);
    const auto h = src.hermitian(d);
    const auto e = hermitian_eig(h);
    CHECK(std::abs(e.values.sum() - h.trace().real()) <= 1e-10);
    const ComplexMatrix rebuilt = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    CHECK(max_abs_diff(rebuilt, h) <= 1e-9);
    CHECK(max_abs_diff(e.vectors.adjoint() * e.vectors, identity(d)) <= 1e-10);
    for (Eigen::Index i = 1; i < e.values.size(); ++i) CHECK(e.values(i - 1) <= e.values(i));
  }
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(hermitian_eig(m), ValidationError);
  CHECK_THROWS_AS(hermitian_eig(ComplexMatrix::Zero(2, 3)), ValidationError);
}

TEST_CASE("cluster_spectrum groups near-equal eigenvalues") {
  RealVector v(5);
  v << -1.0, 0.0, 1e-10, 2e-10, 1.0;
  const auto c = cluster_spectrum(v, 1e-8);
  REQUIRE(c.size() == 3);
  CHECK(c[1].begin == 1);
  CHECK(c[1].size == 3);
}

TEST_CASE("unitary_from_hamiltonian examples") {
  CHECK(max_abs_diff(unitary_from_hamiltonian(ComplexMatrix::Zero(3, 3), 2.7), identity(3)) <= 1e-15);
  CHECK(max_abs_diff(unitary_from_hamiltonian(diagonal({1.0, -1.0}), std::numbers::pi), -identity(2)) <= 1e-12);

  const MeasurementModel model;
  const ComplexMatrix u = unitary_from_hamiltonian(interaction_hamiltonian(model), model.interaction_duration);
  const ComplexMatrix premeasure = premeasurement_unitary(model);
  for (std::size_t s = 0; s < 2; ++s) {
    const std::size_t in = s * 3;
    const std::size_t out = s * 3 + s + 1;
    CHECK(std::abs(u(out, in) - Complex(0.0, -1.0)) <= 1e-12);
    CHECK(std::abs(premeasure(out, in)) == doctest::Approx(1.0));
    CHECK(u.col(in).cwiseAbs().sum() == doctest::Approx(1.0));
  }
}

TEST_CASE("unitary_from_hamiltonian agrees with a Taylor oracle and inverts under t -> -t") {
  gen::Source src(13);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + src.index(6);
    const auto h = src.hermitian(d);
    const double t = src.real(-3.0, 3.0);
    const auto u = unitary_from_hamiltonian(h, t);
    CHECK(max_abs_diff(u, oracle::expm_taylor(h, t)) <= 1e-9);
    CHECK(max_abs_diff(u * unitary_from_hamiltonian(h, -t), identity(d)) <= 1e-9);
    CHECK(max_abs_diff(u.adjoint() * u, identity(d)) <= 1e-9);
  }
}

TEST_CASE("Hilbert-Schmidt inner product examples") {
  CHECK(hs_inner(identity(2), identity(2)) == Complex(2.0, 0.0));
  CHECK(std::abs(hs_inner(diagonal({1.0, -1.0}), identity(2))) == 0.0);
  const auto b = interference_observable(MeasurementModel{});
  CHECK(std::abs(hs_inner(b, b) - 2.0) <= 1e-12);
  CHECK(hs_norm(b) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("layout validation") {
  CHECK_THROWS_AS(SpaceLayout({{"S", 2}, {"S", 3}}), ValidationError);
  CHECK_THROWS_AS(SpaceLayout({{"S", 0}}), ValidationError);
  const SpaceLayout layout({{"S", 2}, {"O", 3}});
  CHECK_THROWS_AS(layout.position("E"), ValidationError);
  CHECK_THROWS_AS(partial_trace(identity(5), layout, {"S"}), ValidationError);
  CHECK_THROWS_AS(partial_trace(identity(6), layout, {"X"}), ValidationError);
  CHECK_THROWS_AS(embed(identity(2), layout, "O"), ValidationError);
  CHECK(layout.concat(SpaceLayout({{"E", 4}})).total_dim() == 24);
  CHECK_THROWS_AS(layout.concat(SpaceLayout({{"O", 4}})), ValidationError);
}

TEST_CASE("embed places the operator on its factor") {
  const SpaceLayout layout({{"S", 2}, {"O", 3}});
  const auto q_o = diagonal({0.0, 1.0, -1.0});
  CHECK(max_abs_diff(embed(q_o, layout, "O"), tensor(identity(2), q_o)) == 0.0);
  CHECK(max_abs_diff(embed(diagonal({1.0, -1.0}), layout, "S"), tensor(diagonal({1.0, -1.0}), identity(3))) == 0.0);
}

TEST_CASE("hermiticity is judged relative to operator size") {
  ComplexMatrix m = diagonal({1e6, -1e6});
  m(0, 1) = 1e-8;
  CHECK(is_hermitian(m));
  ComplexMatrix small = ComplexMatrix::Zero(2, 2);
  small(0, 1) = 1e-6;
  CHECK_FALSE(is_hermitian(small));
}
