#pragma once

// Finite-dimensional *-algebras of operators on a SpaceLayout.
//
// An OperatorAlgebra stores a Hilbert-Schmidt orthonormal basis of the
// smallest unital, adjoint-closed, product-closed linear span that contains
// its generators. A commutative algebra of this kind is isomorphic to the
// algebra of functions on a finite set; joint_spectral_resolution recovers
// that set as the family of minimal projectors.

#include <cstdint>
#include <vector>

#include "qmeas/matrixcore.hpp"

namespace qmeas {

namespace tolerance {
inline constexpr double kAlgebraRank = 1e-9;        // relative Gram-Schmidt / membership cutoff
inline constexpr double kValueMerge = 1e-7;         // joint eigenvalue vectors closer than this merge
inline constexpr double kSpectralConsistency = 1e-8;
}  // namespace tolerance

class OperatorAlgebra {
 public:
  const SpaceLayout& layout() const { return layout_; }
  const std::vector<ComplexMatrix>& generators() const { return generators_; }
  const std::vector<ComplexMatrix>& basis() const { return basis_; }
  std::size_t dimension() const { return basis_.size(); }
  std::size_t space_dim() const { return layout_.total_dim(); }
  bool commutative() const { return commutative_; }
  double tol() const { return tol_; }

  /// HS coefficients of `a` on the orthonormal basis.
  ComplexVector coordinates(const ComplexMatrix& a) const;
  /// Orthogonal projection of `a` onto the algebra span.
  ComplexMatrix project(const ComplexMatrix& a) const;
  /// ||a - proj(a)||_HS
  double membership_residual(const ComplexMatrix& a) const;

 private:
  friend OperatorAlgebra generate_algebra(const std::vector<ComplexMatrix>&, const SpaceLayout&,
                                          double);
  OperatorAlgebra() = default;

  SpaceLayout layout_;
  std::vector<ComplexMatrix> generators_;
  std::vector<ComplexMatrix> basis_;
  bool commutative_ = false;
  double tol_ = tolerance::kAlgebraRank;
};

/// Unital *-closure of the generators. Repeats {adjoin pairwise products,
/// orthonormalize} until the dimension stops growing.
OperatorAlgebra generate_algebra(const std::vector<ComplexMatrix>& generators,
                                 const SpaceLayout& layout,
                                 double tol = tolerance::kAlgebraRank);

/// max over basis pairs of ||[M,N]||_HS / (||M|| ||N||) <= tol.
bool is_commutative(const OperatorAlgebra& alg);
double max_commutator(const OperatorAlgebra& alg);

/// ||a - proj(a)||_HS <= tol * ||a||_HS.
bool contains(const OperatorAlgebra& alg, const ComplexMatrix& a);

struct SpectralResolution {
  std::vector<ComplexMatrix> projectors;
  /// values[k][g]: eigenvalue of generator g on projectors[k].
  std::vector<std::vector<double>> values;
};

/// Minimal projectors of a commutative algebra, sorted lexicographically by
/// their generator value vectors. Diagonalizes a random real combination of
/// the Hermitian parts of the basis; the result does not depend on the draw.
SpectralResolution joint_spectral_resolution(const OperatorAlgebra& alg,
                                             std::uint64_t seed = 0x5EEDC0FFEEULL);

/// Value of an arbitrary algebra element on projector k: tr(P_k a) / tr(P_k).
Complex value_on_projector(const ComplexMatrix& projector, const ComplexMatrix& a);

}  // namespace qmeas
