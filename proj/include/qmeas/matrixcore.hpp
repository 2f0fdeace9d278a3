#pragma once

// Dense complex linear algebra shared by every other part of the library.
// Matrices are Eigen dense types; composite spaces are described by a
// SpaceLayout whose factor order fixes the basis ordering
// (composite index = sum of factor index times stride, first factor slowest).

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qmeas {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Global numerical tolerances. None of these come from the physics; they are
/// fixed so that every check in the library uses the same yardstick.
namespace tolerance {
inline constexpr double kHermitian = 1e-12;       // max |M - M^dagger| entrywise
inline constexpr double kReconstruction = 1e-9;   // eigen / exponential round trips
inline constexpr double kDegeneracyGap = 1e-8;    // eigenvalues closer than this are one cluster
inline constexpr double kNormalization = 1e-10;   // state norms, traces, probability sums
inline constexpr double kPositivity = 1e-10;      // smallest admissible density eigenvalue
}  // namespace tolerance

struct SpaceFactor {
  std::string label;
  std::size_t dim;
};

/// Ordered tensor factorization of a finite-dimensional Hilbert space.
class SpaceLayout {
 public:
  SpaceLayout() = default;
  explicit SpaceLayout(std::vector<SpaceFactor> factors);

  const std::vector<SpaceFactor>& factors() const { return factors_; }
  std::size_t total_dim() const { return total_dim_; }
  std::size_t factor_count() const { return factors_.size(); }

  /// Position of a factor; throws ValidationError for unknown labels.
  std::size_t position(const std::string& label) const;
  bool has(const std::string& label) const;
  std::size_t dim(const std::string& label) const { return factors_[position(label)].dim; }

  /// Stride of factor `pos` in the composite index.
  std::size_t stride(std::size_t pos) const { return strides_[pos]; }

  /// Composite index from per-factor indices (layout order).
  std::size_t index(std::span<const std::size_t> digits) const;

  /// Layout of the concatenation this ⊗ other; labels must stay unique.
  SpaceLayout concat(const SpaceLayout& other) const;

  /// The sub-layout made of the kept labels, in layout order.
  SpaceLayout restricted_to(std::span<const std::string> keep) const;

  bool operator==(const SpaceLayout& other) const;

 private:
  std::vector<SpaceFactor> factors_;
  std::vector<std::size_t> strides_;
  std::size_t total_dim_ = 1;
};

/// Kronecker product; the first argument is the slow index.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector tensor(const ComplexVector& a, const ComplexVector& b);

/// Reduced operator on the kept factors (layout order), all other factors traced out.
ComplexMatrix partial_trace(const ComplexMatrix& m, const SpaceLayout& layout,
                            std::span<const std::string> keep);
ComplexMatrix partial_trace(const ComplexMatrix& m, const SpaceLayout& layout,
                            std::initializer_list<std::string> keep);

/// Embed an operator acting on one factor into the full layout (identity elsewhere).
ComplexMatrix embed(const ComplexMatrix& op, const SpaceLayout& layout, const std::string& label);

ComplexMatrix identity(std::size_t dim);
ComplexMatrix diagonal(std::span<const double> values);
ComplexMatrix diagonal(std::initializer_list<double> values);
ComplexVector basis_vector(std::size_t dim, std::size_t index);
/// |ket><bra|
ComplexMatrix outer(const ComplexVector& ket, const ComplexVector& bra);

/// max |m - m^dagger|, scaled so that large generators are judged relative to their size.
double hermiticity_defect(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = tolerance::kHermitian);

/// Group of (numerically) equal eigenvalues: [begin, begin + size) in ascending order.
struct EigenCluster {
  std::size_t begin;
  std::size_t size;
  double value;  // mean of the clustered eigenvalues
};

struct HermitianEigen {
  RealVector values;         // ascending
  ComplexMatrix vectors;     // orthonormal columns
  std::vector<EigenCluster> clusters;
};

/// Eigendecomposition of a Hermitian matrix. Eigenvalues closer than `gap`
/// to their neighbour are grouped into one cluster.
HermitianEigen hermitian_eig(const ComplexMatrix& m, double gap = tolerance::kDegeneracyGap);

/// Cluster an ascending spectrum; consecutive values within `gap` are merged.
std::vector<EigenCluster> cluster_spectrum(const RealVector& ascending, double gap);

/// exp(-i h t) for Hermitian h.
ComplexMatrix unitary_from_hamiltonian(const ComplexMatrix& h, double t);

/// Hilbert-Schmidt inner product trace(a^dagger b).
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);
double hs_norm(const ComplexMatrix& a);

/// max |a_ij - b_ij|
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

void require_square(const ComplexMatrix& m, const char* what);
void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what);

}  // namespace qmeas
