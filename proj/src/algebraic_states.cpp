#include "qmeas/algebraic_states.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmeas/errors.hpp"

namespace qmeas {

AlgebraicState::AlgebraicState(AlgebraRef algebra, ComplexVector values)
    : algebra_(std::move(algebra)), values_(std::move(values)) {
  if (!algebra_) throw ValidationError("AlgebraicState: null algebra");
  if (static_cast<std::size_t>(values_.size()) != algebra_->dimension()) {
    throw ValidationError("AlgebraicState: value count does not match algebra dimension");
  }
  const Complex norm = evaluate(identity(algebra_->space_dim()));
  if (std::abs(norm - 1.0) > tolerance::kNormalization) {
    std::ostringstream msg;
    msg << "AlgebraicState: <phi; I> = " << norm.real() << " is not 1";
    throw ValidationError(msg.str());
  }
  // phi(a) = tr(rho_phi a) with rho_phi = sum_k phi(M_k) M_k inside the algebra, so
  // phi is positive on the algebra exactly when rho_phi is positive semidefinite.
  if (values_.imag().cwiseAbs().maxCoeff() > tolerance::kFunctionalPositivity) {
    throw ValidationError("AlgebraicState: functional is not Hermitian (complex value on a Hermitian element)");
  }
  ComplexMatrix rho = ComplexMatrix::Zero(algebra_->space_dim(), algebra_->space_dim());
  for (std::size_t k = 0; k < algebra_->dimension(); ++k) rho += values_(k).real() * algebra_->basis()[k];
  const double lowest = hermitian_eig(0.5 * (rho + rho.adjoint())).values(0);
  if (lowest < -tolerance::kFunctionalPositivity) {
    std::ostringstream msg;
    msg << "AlgebraicState: positivity violated (density representative has eigenvalue " << lowest << ")";
    throw ValidationError(msg.str());
  }
}

Complex AlgebraicState::evaluate(const ComplexMatrix& a) const {
  const ComplexVector c = algebra_->coordinates(a);
  return (c.array() * values_.array()).sum();
}

AlgebraicState Character::as_state() const {
  ComplexVector v(algebra->dimension());
  for (std::size_t k = 0; k < algebra->dimension(); ++k) v(k) = evaluate(algebra->basis()[k]);
  return AlgebraicState(algebra, std::move(v));
}

EnsembleOverCharacters::EnsembleOverCharacters(std::vector<CharacterWeight> rows)
    : rows_(std::move(rows)) {
  double total = 0.0;
  for (const auto& r : rows_) {
    if (!(r.probability >= 0.0 && r.probability <= 1.0)) {
      throw ValidationError("EnsembleOverCharacters: probability outside [0,1]");
    }
    total += r.probability;
  }
  if (std::abs(total - 1.0) > tolerance::kNormalization) {
    throw ValidationError("EnsembleOverCharacters: probabilities do not sum to 1");
  }
}

std::vector<double> EnsembleOverCharacters::probabilities() const {
  std::vector<double> p;
  for (const auto& r : rows_) p.push_back(r.probability);
  return p;
}

AlgebraicState restrict_state(const DensityMatrix& rho, const AlgebraRef& alg) {
  if (rho.dim() != alg->space_dim()) {
    throw ValidationError("restrict_state: state dimension " + std::to_string(rho.dim()) +
                          " does not match algebra dimension " +
                          std::to_string(alg->space_dim()));
  }
  ComplexVector v(alg->dimension());
  for (std::size_t k = 0; k < alg->dimension(); ++k) {
    v(k) = (rho.matrix() * alg->basis()[k]).trace();
  }
  return AlgebraicState(alg, std::move(v));
}

std::vector<Character> extremal_states(const AlgebraRef& alg) {
  if (!alg->commutative()) {
    throw ValidationError(
        "extremal_states: algebra is not commutative; extremal enumeration is not supported");
  }
  const auto res = joint_spectral_resolution(*alg);
  std::vector<Character> out;
  for (std::size_t k = 0; k < res.projectors.size(); ++k) {
    out.push_back(Character{alg, k, res.values[k], res.projectors[k]});
  }
  return out;
}

EnsembleOverCharacters decompose_restricted(const AlgebraicState& phi,
                                            const std::vector<Character>& characters) {
  const auto& alg = phi.algebra();
  if (!alg->commutative()) {
    throw ValidationError("decompose_restricted: algebra is not commutative");
  }
  const std::size_t dim = alg->dimension();
  const std::size_t n = characters.size();
  ComplexMatrix x(dim, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (characters[k].algebra->dimension() != dim ||
        characters[k].algebra->space_dim() != alg->space_dim()) {
      throw ValidationError("decompose_restricted: character belongs to a different algebra");
    }
    for (std::size_t j = 0; j < dim; ++j) x(j, k) = characters[k].evaluate(alg->basis()[j]);
  }
  const ComplexVector p = x.colPivHouseholderQr().solve(phi.values());
  if ((x * p - phi.values()).cwiseAbs().maxCoeff() > tolerance::kFunctionalPositivity) {
    throw NumericalError("decompose_restricted: state is not in the span of the characters");
  }

  std::vector<CharacterWeight> rows;
  for (std::size_t k = 0; k < n; ++k) {
    const double pk = p(k).real();
    if (pk < -tolerance::kFunctionalPositivity || std::abs(p(k).imag()) > tolerance::kFunctionalPositivity) {
      std::ostringstream msg;
      msg << "decompose_restricted: positivity violated (P_" << k << " = " << p(k) << ")";
      throw NumericalError(msg.str());
    }
    rows.push_back({characters[k], std::clamp(pk, 0.0, 1.0)});
  }
  return EnsembleOverCharacters(std::move(rows));
}

EnsembleOverCharacters decompose_restricted(const AlgebraicState& phi, const AlgebraRef& alg) {
  if (alg->dimension() != phi.algebra()->dimension() ||
      alg->space_dim() != phi.algebra()->space_dim()) {
    throw ValidationError("decompose_restricted: state is defined on a different algebra");
  }
  return decompose_restricted(phi, extremal_states(alg));
}

BreuerReport breuer_indistinguishable(const DensityMatrix& rho1, const DensityMatrix& rho2,
                                      const AlgebraRef& alg, double tol) {
  if (!(rho1.layout() == rho2.layout())) {
    throw ValidationError("breuer_indistinguishable: states live on different layouts");
  }
  const auto phi1 = restrict_state(rho1, alg);
  const auto phi2 = restrict_state(rho2, alg);

  BreuerReport report;
  for (std::size_t g = 0; g < alg->generators().size(); ++g) {
    const auto& a = alg->generators()[g];
    const double dev = std::abs(phi1.evaluate(a) - phi2.evaluate(a));
    if (g == 0 || dev > report.max_deviation) {
      report.max_deviation = dev;
      report.worst_element = a;
      report.worst_is_generator = true;
      report.worst_index = g;
    }
  }
  for (std::size_t k = 0; k < alg->dimension(); ++k) {
    const double dev = std::abs(phi1.values()(k) - phi2.values()(k));
    report.max_basis_deviation = std::max(report.max_basis_deviation, dev);
    if (report.worst_element.size() == 0 || dev > report.max_deviation * (1.0 + 1e-12) + 1e-15) {
      report.max_deviation = dev;
      report.worst_element = alg->basis()[k];
      report.worst_is_generator = false;
      report.worst_index = k;
    }
  }
  report.indistinguishable = report.max_basis_deviation <= tol;
  return report;
}

std::vector<double> restriction_distribution(const StateVector& xi,
                                             const std::vector<Character>& characters) {
  std::vector<double> p;
  p.reserve(characters.size());
  for (const auto& c : characters) {
    if (static_cast<std::size_t>(c.projector.rows()) != xi.dim()) {
      throw ValidationError("restriction_distribution: layout mismatch");
    }
    const Complex v = xi.amplitudes().dot(c.projector * xi.amplitudes());
    p.push_back(std::max(0.0, v.real()));
  }
  return p;
}

std::vector<double> restriction_distribution(const DensityMatrix& rho,
                                             const std::vector<Character>& characters) {
  std::vector<double> p;
  p.reserve(characters.size());
  for (const auto& c : characters) {
    require_same_shape(rho.matrix(), c.projector, "restriction_distribution");
    p.push_back(std::max(0.0, (rho.matrix() * c.projector).trace().real()));
  }
  return p;
}

SampledCharacter sample_individual_restriction(const StateVector& xi,
                                               const std::vector<Character>& characters,
                                               RandomStream& rng) {
  if (characters.empty()) throw ValidationError("sample_individual_restriction: no characters");
  const auto p = restriction_distribution(xi, characters);
  if (*std::max_element(p.begin(), p.end()) < tolerance::kOutcomeFloor) {
    throw ValidationError(
        "sample_individual_restriction: every outcome has vanishing probability "
        "(state and algebra are inconsistent)");
  }
  const std::size_t k = sample_index(p, rng);
  return {k, p[k]};
}

std::pair<Character, double> sample_individual_restriction(const StateVector& xi,
                                                           const AlgebraRef& alg,
                                                           RandomStream& rng) {
  if (xi.dim() != alg->space_dim()) {
    throw ValidationError("sample_individual_restriction: layout mismatch");
  }
  const auto characters = extremal_states(alg);
  const auto s = sample_individual_restriction(xi, characters, rng);
  return {characters[s.index], s.probability};
}

}  // namespace qmeas
