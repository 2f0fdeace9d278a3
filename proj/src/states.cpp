#include "qmeas/states.hpp"

#include <cmath>
#include <sstream>

#include "qmeas/errors.hpp"

namespace qmeas {

StateVector::StateVector(SpaceLayout layout, ComplexVector amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != layout_.total_dim()) {
    throw ValidationError("StateVector: amplitude count " + std::to_string(amplitudes_.size()) +
                          " does not match layout dimension " +
                          std::to_string(layout_.total_dim()));
  }
  const double norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > tolerance::kNormalization) {
    std::ostringstream msg;
    msg << "StateVector: normalization violated (sum |a|^2 = " << norm2 << ")";
    throw ValidationError(msg.str());
  }
}

StateVector StateVector::basis(SpaceLayout layout, std::size_t index) {
  const std::size_t dim = layout.total_dim();
  return StateVector(std::move(layout), basis_vector(dim, index));
}

StateVector StateVector::tensor(const StateVector& other) const {
  return StateVector(layout_.concat(other.layout_), qmeas::tensor(amplitudes_, other.amplitudes_));
}

double StateVector::fidelity(const StateVector& other) const {
  if (!(layout_ == other.layout_)) throw ValidationError("fidelity: layout mismatch");
  return std::norm(amplitudes_.dot(other.amplitudes_));
}

DensityMatrix::DensityMatrix(SpaceLayout layout, ComplexMatrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  require_square(matrix_, "DensityMatrix");
  if (static_cast<std::size_t>(matrix_.rows()) != layout_.total_dim()) {
    throw ValidationError("DensityMatrix: matrix dimension does not match layout");
  }
  if (!is_hermitian(matrix_)) {
    throw ValidationError("DensityMatrix: matrix is not Hermitian");
  }
  const Complex tr = matrix_.trace();
  if (std::abs(tr - 1.0) > tolerance::kNormalization) {
    std::ostringstream msg;
    msg << "DensityMatrix: trace " << tr.real() << " is not 1";
    throw ValidationError(msg.str());
  }
  const auto eig = hermitian_eig(matrix_);
  if (eig.values(0) < -tolerance::kPositivity) {
    std::ostringstream msg;
    msg << "DensityMatrix: negative eigenvalue " << eig.values(0);
    throw ValidationError(msg.str());
  }
}

DensityMatrix::DensityMatrix(SpaceLayout layout, ComplexMatrix matrix, Trusted)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {}

double DensityMatrix::purity() const { return (matrix_ * matrix_).trace().real(); }

DensityMatrix DensityMatrix::reduced(std::span<const std::string> keep) const {
  return DensityMatrix(layout_.restricted_to(keep), partial_trace(matrix_, layout_, keep));
}

DensityMatrix DensityMatrix::reduced(std::initializer_list<std::string> keep) const {
  std::vector<std::string> labels(keep);
  return reduced(std::span<const std::string>(labels));
}

DensityMatrix DensityMatrix::conjugated(const ComplexMatrix& unitary) const {
  require_same_shape(matrix_, unitary, "DensityMatrix::conjugated");
  if (max_abs_diff(unitary.adjoint() * unitary, identity(dim())) > tolerance::kReconstruction) {
    throw ValidationError("DensityMatrix::conjugated: operator is not unitary");
  }
  ComplexMatrix evolved = unitary * matrix_ * unitary.adjoint();
  evolved = 0.5 * (evolved + evolved.adjoint()).eval();
  return DensityMatrix(layout_, std::move(evolved));
}

Gemenge::Gemenge(std::vector<GemengeRow> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw ValidationError("Gemenge: table is empty");
  double total = 0.0;
  for (const auto& row : rows_) {
    if (!(row.probability >= 0.0 && row.probability <= 1.0)) {
      throw ValidationError("Gemenge: probability outside [0,1]");
    }
    if (!(row.state.layout() == rows_.front().state.layout())) {
      throw ValidationError("Gemenge: rows do not share one layout");
    }
    total += row.probability;
  }
  if (std::abs(total - 1.0) > tolerance::kNormalization) {
    std::ostringstream msg;
    msg << "Gemenge: probabilities sum to " << total << ", not 1";
    throw ValidationError(msg.str());
  }
}

std::vector<double> Gemenge::probabilities() const {
  std::vector<double> p;
  p.reserve(rows_.size());
  for (const auto& row : rows_) p.push_back(row.probability);
  return p;
}

DensityMatrix density_from_vector(const StateVector& v) {
  // A rank-one projector of a normalized vector satisfies every invariant by construction.
  return DensityMatrix(v.layout(), outer(v.amplitudes(), v.amplitudes()), DensityMatrix::Trusted{});
}

DensityMatrix gemenge_mix(const Gemenge& w) {
  const std::size_t dim = w.layout().total_dim();
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (const auto& row : w.rows()) {
    m += row.probability * outer(row.state.amplitudes(), row.state.amplitudes());
  }
  return DensityMatrix(w.layout(), std::move(m));
}

std::pair<std::size_t, StateVector> sample_gemenge(const Gemenge& w, RandomStream& rng) {
  const auto p = w.probabilities();
  const std::size_t row = sample_index(p, rng);
  return {row, w.rows()[row].state};
}

double expectation(const DensityMatrix& rho, const ComplexMatrix& a) {
  require_same_shape(rho.matrix(), a, "expectation");
  if (!is_hermitian(a)) throw ValidationError("expectation: observable is not Hermitian");
  const Complex value = (rho.matrix() * a).trace();
  if (std::abs(value.imag()) > tolerance::kNormalization) {
    throw NumericalError("expectation: imaginary part exceeds tolerance");
  }
  return value.real();
}

double expectation(const StateVector& psi, const ComplexMatrix& a) {
  if (static_cast<std::size_t>(a.rows()) != psi.dim() || a.rows() != a.cols()) {
    throw ValidationError("expectation: dimension mismatch");
  }
  if (!is_hermitian(a)) throw ValidationError("expectation: observable is not Hermitian");
  const Complex value = psi.amplitudes().dot(a * psi.amplitudes());
  if (std::abs(value.imag()) > tolerance::kNormalization) {
    throw NumericalError("expectation: imaginary part exceeds tolerance");
  }
  return value.real();
}

}  // namespace qmeas
