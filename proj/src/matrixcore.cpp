#include "qmeas/matrixcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "qmeas/errors.hpp"

namespace qmeas {

SpaceLayout::SpaceLayout(std::vector<SpaceFactor> factors) : factors_(std::move(factors)) {
  std::set<std::string> seen;
  for (const auto& f : factors_) {
    if (f.dim == 0) {
      throw ValidationError("layout factor '" + f.label + "' has dimension 0");
    }
    if (!seen.insert(f.label).second) {
      throw ValidationError("duplicate layout factor label '" + f.label + "'");
    }
  }
  strides_.assign(factors_.size(), 1);
  total_dim_ = 1;
  for (std::size_t k = factors_.size(); k-- > 0;) {
    strides_[k] = total_dim_;
    total_dim_ *= factors_[k].dim;
  }
}

std::size_t SpaceLayout::position(const std::string& label) const {
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    if (factors_[k].label == label) return k;
  }
  throw ValidationError("unknown layout factor '" + label + "'");
}

bool SpaceLayout::has(const std::string& label) const {
  return std::any_of(factors_.begin(), factors_.end(),
                     [&](const SpaceFactor& f) { return f.label == label; });
}

std::size_t SpaceLayout::index(std::span<const std::size_t> digits) const {
  if (digits.size() != factors_.size()) {
    throw ValidationError("index digit count does not match layout");
  }
  std::size_t idx = 0;
  for (std::size_t k = 0; k < digits.size(); ++k) {
    if (digits[k] >= factors_[k].dim) throw ValidationError("index digit out of range");
    idx += digits[k] * strides_[k];
  }
  return idx;
}

SpaceLayout SpaceLayout::concat(const SpaceLayout& other) const {
  auto all = factors_;
  all.insert(all.end(), other.factors_.begin(), other.factors_.end());
  return SpaceLayout(std::move(all));
}

SpaceLayout SpaceLayout::restricted_to(std::span<const std::string> keep) const {
  std::vector<SpaceFactor> kept;
  for (const auto& f : factors_) {
    if (std::find(keep.begin(), keep.end(), f.label) != keep.end()) kept.push_back(f);
  }
  return SpaceLayout(std::move(kept));
}

bool SpaceLayout::operator==(const SpaceLayout& other) const {
  if (factors_.size() != other.factors_.size()) return false;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    if (factors_[k].label != other.factors_[k].label || factors_[k].dim != other.factors_[k].dim) {
      return false;
    }
  }
  return true;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const SpaceLayout& layout,
                            std::span<const std::string> keep) {
  require_square(m, "partial_trace");
  if (static_cast<std::size_t>(m.rows()) != layout.total_dim()) {
    throw ValidationError("partial_trace: matrix dimension " + std::to_string(m.rows()) +
                          " does not match layout dimension " +
                          std::to_string(layout.total_dim()));
  }
  if (keep.empty()) throw ValidationError("partial_trace: keep set is empty");

  std::vector<bool> kept(layout.factor_count(), false);
  for (const auto& label : keep) kept[layout.position(label)] = true;

  const SpaceLayout reduced = layout.restricted_to(keep);
  const std::size_t total = layout.total_dim();

  // Split every composite index into (kept index, traced index).
  std::vector<std::size_t> kept_idx(total), traced_idx(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i, k_acc = 0, t_acc = 0, k_stride = 1, t_stride = 1;
    for (std::size_t f = layout.factor_count(); f-- > 0;) {
      const std::size_t d = layout.factors()[f].dim;
      const std::size_t digit = rem % d;
      rem /= d;
      if (kept[f]) {
        k_acc += digit * k_stride;
        k_stride *= d;
      } else {
        t_acc += digit * t_stride;
        t_stride *= d;
      }
    }
    kept_idx[i] = k_acc;
    traced_idx[i] = t_acc;
  }

  ComplexMatrix out = ComplexMatrix::Zero(reduced.total_dim(), reduced.total_dim());
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t j = 0; j < total; ++j) {
      if (traced_idx[i] == traced_idx[j]) out(kept_idx[i], kept_idx[j]) += m(i, j);
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const SpaceLayout& layout,
                            std::initializer_list<std::string> keep) {
  std::vector<std::string> labels(keep);
  return partial_trace(m, layout, std::span<const std::string>(labels));
}

ComplexMatrix embed(const ComplexMatrix& op, const SpaceLayout& layout, const std::string& label) {
  const std::size_t pos = layout.position(label);
  require_square(op, "embed");
  if (static_cast<std::size_t>(op.rows()) != layout.factors()[pos].dim) {
    throw ValidationError("embed: operator dimension does not match factor '" + label + "'");
  }
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t f = 0; f < layout.factor_count(); ++f) {
    out = tensor(out, f == pos ? op : identity(layout.factors()[f].dim));
  }
  return out;
}

ComplexMatrix identity(std::size_t dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix diagonal(std::span<const double> values) {
  ComplexMatrix out = ComplexMatrix::Zero(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out(i, i) = values[i];
  return out;
}

ComplexMatrix diagonal(std::initializer_list<double> values) {
  return diagonal(std::span<const double>(values.begin(), values.size()));
}

ComplexVector basis_vector(std::size_t dim, std::size_t index) {
  if (index >= dim) throw ValidationError("basis_vector: index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return v;
}

ComplexMatrix outer(const ComplexVector& ket, const ComplexVector& bra) {
  return ket * bra.adjoint();
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

bool is_hermitian(const ComplexMatrix& m, double tol) { return hermiticity_defect(m) <= tol; }

std::vector<EigenCluster> cluster_spectrum(const RealVector& ascending, double gap) {
  std::vector<EigenCluster> clusters;
  const auto n = static_cast<std::size_t>(ascending.size());
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i == n || ascending(i) - ascending(i - 1) > gap) {
      const double mean = ascending.segment(begin, i - begin).mean();
      clusters.push_back({begin, i - begin, mean});
      begin = i;
    }
  }
  return clusters;
}

HermitianEigen hermitian_eig(const ComplexMatrix& m, double gap) {
  require_square(m, "hermitian_eig");
  if (!is_hermitian(m)) {
    std::ostringstream msg;
    msg << "hermitian_eig: matrix is not Hermitian (defect " << hermiticity_defect(m) << ")";
    throw ValidationError(msg.str());
  }
  // Symmetrize so that the solver sees an exactly Hermitian input.
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("hermitian_eig: eigensolver did not converge");
  }
  HermitianEigen out{solver.eigenvalues(), solver.eigenvectors(), {}};
  out.clusters = cluster_spectrum(out.values, gap);
  return out;
}

ComplexMatrix unitary_from_hamiltonian(const ComplexMatrix& h, double t) {
  const auto eig = hermitian_eig(h);
  ComplexVector phases(eig.values.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::exp(Complex(0.0, -eig.values(k) * t));
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "hs_inner");
  return (a.conjugate().cwiseProduct(b)).sum();
}

double hs_norm(const ComplexMatrix& a) { return a.norm(); }

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw ValidationError(std::string(what) + ": matrix is not square");
  }
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError(std::string(what) + ": dimension mismatch (" +
                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                          std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
  }
}

}  // namespace qmeas
