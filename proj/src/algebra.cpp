#include "qmeas/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qmeas/errors.hpp"
#include "qmeas/random.hpp"

namespace qmeas {

namespace {

// Gram-Schmidt step with one re-orthogonalization pass. Basis elements are
// Hermitian, so HS coefficients of a Hermitian candidate are real and the
// residual stays Hermitian.
bool adjoin_hermitian(std::vector<ComplexMatrix>& basis, const ComplexMatrix& candidate,
                      double scale, double tol) {
  if (scale == 0.0 || candidate.norm() <= tol * scale) return false;
  ComplexMatrix r = candidate;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) r -= hs_inner(b, r).real() * b;
  }
  const double nr = r.norm();
  if (nr <= tol * scale) return false;
  r /= nr;
  basis.push_back(0.5 * (r + r.adjoint()));
  return true;
}

// Adds the Hermitian and anti-Hermitian parts of c; together they span {c, c^dagger}.
// Both rank cutoffs are relative to |c|, so rounding noise in a nearly Hermitian
// product is not mistaken for a new direction.
bool adjoin(std::vector<ComplexMatrix>& basis, const ComplexMatrix& c, double tol) {
  const double scale = c.norm();
  const ComplexMatrix re = 0.5 * (c + c.adjoint());
  const ComplexMatrix im = Complex(0.0, -0.5) * (c - c.adjoint());
  const bool a = adjoin_hermitian(basis, re, scale, tol);
  const bool b = adjoin_hermitian(basis, im, scale, tol);
  return a || b;
}

}  // namespace

ComplexVector OperatorAlgebra::coordinates(const ComplexMatrix& a) const {
  require_same_shape(a, basis_.front(), "OperatorAlgebra::coordinates");
  ComplexVector c(basis_.size());
  for (std::size_t k = 0; k < basis_.size(); ++k) c(k) = hs_inner(basis_[k], a);
  return c;
}

ComplexMatrix OperatorAlgebra::project(const ComplexMatrix& a) const {
  const ComplexVector c = coordinates(a);
  ComplexMatrix p = ComplexMatrix::Zero(a.rows(), a.cols());
  for (std::size_t k = 0; k < basis_.size(); ++k) p += c(k) * basis_[k];
  return p;
}

double OperatorAlgebra::membership_residual(const ComplexMatrix& a) const {
  return (a - project(a)).norm();
}

OperatorAlgebra generate_algebra(const std::vector<ComplexMatrix>& generators,
                                 const SpaceLayout& layout, double tol) {
  if (!(tol > 0.0)) throw ValidationError("generate_algebra: tolerance must be positive");
  const std::size_t dim = layout.total_dim();
  for (const auto& g : generators) {
    if (static_cast<std::size_t>(g.rows()) != dim || static_cast<std::size_t>(g.cols()) != dim) {
      throw ValidationError("generate_algebra: generator dimension " + std::to_string(g.rows()) +
                            "x" + std::to_string(g.cols()) + " does not match layout dimension " +
                            std::to_string(dim));
    }
  }

  const std::size_t max_dim = dim * dim;
  std::vector<ComplexMatrix> basis;
  adjoin(basis, identity(dim), tol);
  for (const auto& g : generators) adjoin(basis, g, tol);

  // Elements [0, closed) have had all their mutual products adjoined.
  std::size_t closed = 0;
  while (closed < basis.size()) {
    const std::size_t n = basis.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i < closed && j < closed) continue;
        adjoin(basis, basis[i] * basis[j], tol);
        if (basis.size() > max_dim) {
          throw NumericalError("generate_algebra: closure exceeded the dim^2 bound (" +
                               std::to_string(max_dim) + "); numerical breakdown");
        }
      }
    }
    closed = n;
  }

  OperatorAlgebra alg;
  alg.layout_ = layout;
  alg.generators_ = generators;
  alg.basis_ = std::move(basis);
  alg.tol_ = tol;
  alg.commutative_ = max_commutator(alg) <= tol;
  return alg;
}

double max_commutator(const OperatorAlgebra& alg) {
  double worst = 0.0;
  const auto& b = alg.basis();
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      const double scale = b[i].norm() * b[j].norm();
      worst = std::max(worst, (b[i] * b[j] - b[j] * b[i]).norm() / scale);
    }
  }
  return worst;
}

bool is_commutative(const OperatorAlgebra& alg) { return max_commutator(alg) <= alg.tol(); }

bool contains(const OperatorAlgebra& alg, const ComplexMatrix& a) {
  if (static_cast<std::size_t>(a.rows()) != alg.space_dim() ||
      static_cast<std::size_t>(a.cols()) != alg.space_dim()) {
    throw ValidationError("contains: dimension mismatch");
  }
  return alg.membership_residual(a) <= alg.tol() * a.norm();
}

Complex value_on_projector(const ComplexMatrix& projector, const ComplexMatrix& a) {
  return (projector * a).trace() / projector.trace();
}

namespace {

std::vector<Complex> basis_values(const OperatorAlgebra& alg, const ComplexMatrix& projector) {
  std::vector<Complex> v;
  v.reserve(alg.dimension());
  for (const auto& m : alg.basis()) v.push_back(value_on_projector(projector, m));
  return v;
}

bool values_agree(const std::vector<Complex>& a, const std::vector<Complex>& b, double tol) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k] - b[k]) > tol) return false;
  }
  return true;
}

}  // namespace

SpectralResolution joint_spectral_resolution(const OperatorAlgebra& alg, std::uint64_t seed) {
  if (!alg.commutative()) {
    throw ValidationError("joint_spectral_resolution: algebra is not commutative");
  }
  const std::size_t dim = alg.space_dim();
  RandomStream rng(seed);
  constexpr int kMaxAttempts = 16;

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    for (const auto& m : alg.basis()) h += rng.uniform(-1.0, 1.0) * m;
    const auto eig = hermitian_eig(h);

    std::vector<ComplexMatrix> projectors;
    std::vector<std::vector<Complex>> signatures;
    for (const auto& cluster : eig.clusters) {
      const auto block = eig.vectors.middleCols(cluster.begin, cluster.size);
      ComplexMatrix p = block * block.adjoint();
      auto sig = basis_values(alg, p);
      auto same = std::find_if(signatures.begin(), signatures.end(), [&](const auto& s) {
        return values_agree(s, sig, tolerance::kValueMerge);
      });
      if (same != signatures.end()) {
        const auto k = static_cast<std::size_t>(same - signatures.begin());
        projectors[k] += p;
        signatures[k] = basis_values(alg, projectors[k]);
      } else {
        projectors.push_back(std::move(p));
        signatures.push_back(std::move(sig));
      }
    }
    // Two joint sectors sharing one eigenvalue of h collapse into a single
    // cluster; the count then falls short of the algebra dimension.
    if (projectors.size() != alg.dimension()) continue;

    bool consistent = true;
    for (const auto& p : projectors) {
      const Complex rank = p.trace();
      for (const auto& m : alg.basis()) {
        const Complex lambda = (p * m).trace() / rank;
        if ((p * m * p - lambda * p).cwiseAbs().maxCoeff() > tolerance::kSpectralConsistency) {
          consistent = false;
        }
      }
    }
    if (!consistent) continue;

    SpectralResolution res;
    const std::size_t n = projectors.size();
    std::vector<std::vector<double>> gen_values(n);
    for (std::size_t k = 0; k < n; ++k) {
      for (const auto& g : alg.generators()) {
        gen_values[k].push_back(value_on_projector(projectors[k], g).real());
      }
    }
    // Canonical order: generator values first, then basis values, so the
    // outcome does not depend on the random draw.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto less_with_tol = [](double a, double b) { return a < b - tolerance::kValueMerge; };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      for (std::size_t g = 0; g < gen_values[a].size(); ++g) {
        if (less_with_tol(gen_values[a][g], gen_values[b][g])) return true;
        if (less_with_tol(gen_values[b][g], gen_values[a][g])) return false;
      }
      for (std::size_t m = 0; m < signatures[a].size(); ++m) {
        if (less_with_tol(signatures[a][m].real(), signatures[b][m].real())) return true;
        if (less_with_tol(signatures[b][m].real(), signatures[a][m].real())) return false;
      }
      return false;
    });
    for (std::size_t k : order) {
      ComplexMatrix p = 0.5 * (projectors[k] + projectors[k].adjoint());
      res.projectors.push_back(std::move(p));
      res.values.push_back(gen_values[k]);
    }
    return res;
  }
  std::ostringstream msg;
  msg << "joint_spectral_resolution: no consistent projector family after " << kMaxAttempts
      << " attempts";
  throw NumericalError(msg.str());
}

}  // namespace qmeas
