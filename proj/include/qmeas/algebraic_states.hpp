#pragma once

// States as functionals on an operator algebra.
//
// A global density matrix restricted to an algebra is known only through its
// expectations on that algebra; anything orthogonal to the span evaluates to
// zero. On a commutative algebra the extreme points of the restricted state
// set are the characters: one per minimal projector, assigning each element
// its sharp eigenvalue on that projector.

#include <cstdint>
#include <memory>
#include <vector>

#include "qmeas/algebra.hpp"
#include "qmeas/random.hpp"
#include "qmeas/states.hpp"

namespace qmeas {

namespace tolerance {
inline constexpr double kStateEquality = 1e-8;   // default Breuer yardstick
inline constexpr double kFunctionalPositivity = 1e-9;
inline constexpr double kOutcomeFloor = 1e-12;   // below this every outcome is "impossible"
}  // namespace tolerance

using AlgebraRef = std::shared_ptr<const OperatorAlgebra>;

inline AlgebraRef share(OperatorAlgebra alg) {
  return std::make_shared<const OperatorAlgebra>(std::move(alg));
}

/// Normalized positive linear functional, stored as its values on the
/// algebra's orthonormal basis.
class AlgebraicState {
 public:
  /// Validates normalization and positivity on the whole algebra.
  AlgebraicState(AlgebraRef algebra, ComplexVector values);

  const AlgebraRef& algebra() const { return algebra_; }
  const ComplexVector& values() const { return values_; }

  /// <phi; a> = sum_k <M_k, a>_HS phi(M_k). Components outside the span contribute nothing.
  Complex evaluate(const ComplexMatrix& a) const;

 private:
  AlgebraRef algebra_;
  ComplexVector values_;
};

/// Extreme restricted state of a commutative algebra: the point state on one
/// minimal projector.
struct Character {
  AlgebraRef algebra;
  std::size_t projector_index;
  std::vector<double> values;  // one per generator
  ComplexMatrix projector;

  /// Sharp value of an algebra element: tr(P a) / tr(P).
  Complex evaluate(const ComplexMatrix& a) const { return value_on_projector(projector, a); }
  AlgebraicState as_state() const;
};

struct CharacterWeight {
  Character character;
  double probability;
};

/// Ensemble of characters; probabilities sum to 1.
class EnsembleOverCharacters {
 public:
  explicit EnsembleOverCharacters(std::vector<CharacterWeight> rows);
  const std::vector<CharacterWeight>& rows() const { return rows_; }
  std::vector<double> probabilities() const;

 private:
  std::vector<CharacterWeight> rows_;
};

AlgebraicState restrict_state(const DensityMatrix& rho, const AlgebraRef& alg);

/// One character per minimal projector, in joint_spectral_resolution order.
/// Refuses non-commutative algebras.
std::vector<Character> extremal_states(const AlgebraRef& alg);

/// Unique convex weights with phi = sum_k P_k xi_k, obtained by solving the
/// linear system over the algebra basis. Throws NumericalError when a weight
/// is below -kFunctionalPositivity.
EnsembleOverCharacters decompose_restricted(const AlgebraicState& phi,
                                            const std::vector<Character>& characters);
EnsembleOverCharacters decompose_restricted(const AlgebraicState& phi, const AlgebraRef& alg);

struct BreuerReport {
  bool indistinguishable = true;
  /// Largest entrywise deviation over the orthonormal basis (the verdict criterion).
  double max_basis_deviation = 0.0;
  /// Largest |phi1(A) - phi2(A)| over generators and basis elements.
  double max_deviation = 0.0;
  /// Element attaining max_deviation; generators win ties.
  ComplexMatrix worst_element;
  bool worst_is_generator = false;
  std::size_t worst_index = 0;
};

BreuerReport breuer_indistinguishable(const DensityMatrix& rho1, const DensityMatrix& rho2,
                                      const AlgebraRef& alg,
                                      double tol = tolerance::kStateEquality);

/// p_k = <xi|P_k|xi> over the given characters.
std::vector<double> restriction_distribution(const StateVector& xi,
                                             const std::vector<Character>& characters);
/// p_k = tr(rho P_k)
std::vector<double> restriction_distribution(const DensityMatrix& rho,
                                             const std::vector<Character>& characters);

struct SampledCharacter {
  std::size_t index;  // position in the character list
  double probability;
};

/// Draw the character induced by an individual state in one event.
SampledCharacter sample_individual_restriction(const StateVector& xi,
                                               const std::vector<Character>& characters,
                                               RandomStream& rng);

std::pair<Character, double> sample_individual_restriction(const StateVector& xi,
                                                           const AlgebraRef& alg,
                                                           RandomStream& rng);

}  // namespace qmeas
