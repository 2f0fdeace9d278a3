#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qmeas/matrixcore.hpp"
#include "qmeas/random.hpp"

namespace qmeas {

/// Normalized pure state on a labeled composite space.
class StateVector {
 public:
  /// Throws ValidationError unless sum |amplitude|^2 = 1 within kNormalization.
  StateVector(SpaceLayout layout, ComplexVector amplitudes);

  /// Computational basis state |index>.
  static StateVector basis(SpaceLayout layout, std::size_t index);

  const SpaceLayout& layout() const { return layout_; }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }

  /// Product state this ⊗ other on the concatenated layout.
  StateVector tensor(const StateVector& other) const;

  /// |<this|other>|^2
  double fidelity(const StateVector& other) const;

 private:
  SpaceLayout layout_;
  ComplexVector amplitudes_;
};

/// Statistical state: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  /// Validates all three invariants; throws ValidationError on violation.
  DensityMatrix(SpaceLayout layout, ComplexMatrix matrix);

  const SpaceLayout& layout() const { return layout_; }
  const ComplexMatrix& matrix() const { return matrix_; }
  std::size_t dim() const { return layout_.total_dim(); }

  double purity() const;
  Complex trace() const { return matrix_.trace(); }

  /// Reduced state on the kept factors.
  DensityMatrix reduced(std::span<const std::string> keep) const;
  DensityMatrix reduced(std::initializer_list<std::string> keep) const;

  /// U rho U^dagger; U must be unitary on this layout.
  DensityMatrix conjugated(const ComplexMatrix& unitary) const;

 private:
  struct Trusted {};
  DensityMatrix(SpaceLayout layout, ComplexMatrix matrix, Trusted);

  friend DensityMatrix density_from_vector(const StateVector& v);

  SpaceLayout layout_;
  ComplexMatrix matrix_;
};

struct GemengeRow {
  StateVector state;
  double probability;
};

/// Ensemble table {state_l; P_l}. Finer than the density matrix it mixes to.
class Gemenge {
 public:
  /// Non-empty; probabilities in [0,1] summing to 1; one shared layout.
  explicit Gemenge(std::vector<GemengeRow> rows);

  const std::vector<GemengeRow>& rows() const { return rows_; }
  const SpaceLayout& layout() const { return rows_.front().state.layout(); }
  std::size_t size() const { return rows_.size(); }
  std::vector<double> probabilities() const;

 private:
  std::vector<GemengeRow> rows_;
};

/// |v><v|
DensityMatrix density_from_vector(const StateVector& v);

/// sum_l P_l |psi_l><psi_l|
DensityMatrix gemenge_mix(const Gemenge& w);

/// Draw one row of the table with probability P_l (inverse CDF).
std::pair<std::size_t, StateVector> sample_gemenge(const Gemenge& w, RandomStream& rng);

/// trace(rho a) for Hermitian a. Rejects non-Hermitian observables and
/// results whose imaginary part exceeds kNormalization.
double expectation(const DensityMatrix& rho, const ComplexMatrix& a);
double expectation(const StateVector& psi, const ComplexMatrix& a);

}  // namespace qmeas
