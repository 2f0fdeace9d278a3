#include "qmeas/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "qmeas/errors.hpp"

namespace qmeas {

namespace {

constexpr double kPointerMatch = 1e-7;

ComplexMatrix projector_onto(std::size_t dim, std::size_t index) {
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  p(index, index) = 1.0;
  return p;
}

ComplexMatrix swap_pair(std::size_t dim, std::size_t a, std::size_t b) {
  ComplexMatrix m = identity(dim);
  m(a, a) = 0.0;
  m(b, b) = 0.0;
  m(a, b) = 1.0;
  m(b, a) = 1.0;
  return m;
}

void require_environment(const MeasurementModel& model, const char* what) {
  if (!model.environment) {
    throw ValidationError(std::string(what) + ": model has no environment configured");
  }
}

}  // namespace

void MeasurementModel::validate() const {
  if (s_dim < 1) throw ValidationError("model: s_dim must be at least 1");
  if (o_dim < s_dim + 1) {
    throw ValidationError("model: o_dim " + std::to_string(o_dim) +
                          " leaves no room for a ready state plus one pointer per S state (need " +
                          std::to_string(s_dim + 1) + ")");
  }
  if (q_values.size() != s_dim) throw ValidationError("model: q_values must have s_dim entries");
  if (qo_values.size() != o_dim) throw ValidationError("model: qo_values must have o_dim entries");
  for (std::size_t i = 0; i < o_dim; ++i) {
    for (std::size_t j = i + 1; j < o_dim; ++j) {
      if (std::abs(qo_values[i] - qo_values[j]) <= kPointerMatch) {
        throw ValidationError("model: qo_values must be pairwise distinct (pointer readability)");
      }
    }
  }
  for (std::size_t i = 1; i <= s_dim; ++i) {
    if (qo_values[i] != q_values[i - 1]) {
      throw ValidationError("model: qo_values[" + std::to_string(i) + "] must equal q_values[" +
                            std::to_string(i - 1) + "] (unbiased readout)");
    }
  }
  if (!(interaction_duration > 0.0) || !std::isfinite(interaction_duration)) {
    throw ValidationError("model: interaction_duration must be positive");
  }
  if (environment) {
    if (environment->e_dim < 2) throw ValidationError("model: e_dim must be at least 2");
    if (!(environment->e_overlap >= 0.0 && environment->e_overlap <= 1.0)) {
      throw ValidationError("model: e_overlap must lie in [0, 1]");
    }
    if (!std::isfinite(environment->coupling_strength)) {
      throw ValidationError("model: coupling_strength must be finite");
    }
  }
}

SpaceLayout MeasurementModel::system_layout() const {
  return SpaceLayout({{kSystemLabel, s_dim}});
}

SpaceLayout MeasurementModel::pointer_layout() const {
  return SpaceLayout({{kObserverLabel, o_dim}});
}

SpaceLayout MeasurementModel::ms_layout() const {
  return SpaceLayout({{kSystemLabel, s_dim}, {kObserverLabel, o_dim}});
}

SpaceLayout MeasurementModel::mse_layout() const {
  require_environment(*this, "mse_layout");
  return SpaceLayout(
      {{kSystemLabel, s_dim}, {kObserverLabel, o_dim}, {kEnvironmentLabel, environment->e_dim}});
}

SpaceLayout MeasurementModel::full_layout() const {
  return environment ? mse_layout() : ms_layout();
}

ComplexMatrix system_observable(const MeasurementModel& model) {
  return diagonal(std::span<const double>(model.q_values));
}

ComplexMatrix pointer_observable(const MeasurementModel& model) {
  return diagonal(std::span<const double>(model.qo_values));
}

StateVector initial_state(const MeasurementModel& model, const StateVector& psi_s) {
  if (!(psi_s.layout() == model.system_layout())) {
    throw ValidationError("initial_state: input must live on the S layout");
  }
  return psi_s.tensor(StateVector::basis(model.pointer_layout(), 0));
}

ComplexMatrix premeasurement_unitary(const MeasurementModel& model) {
  model.validate();
  ComplexMatrix u = ComplexMatrix::Zero(model.s_dim * model.o_dim, model.s_dim * model.o_dim);
  for (std::size_t k = 0; k < model.s_dim; ++k) {
    u += tensor(projector_onto(model.s_dim, k), swap_pair(model.o_dim, 0, k + 1));
  }
  return u;
}

ComplexMatrix interaction_hamiltonian(const MeasurementModel& model) {
  model.validate();
  const double rate = std::numbers::pi / (2.0 * model.interaction_duration);
  ComplexMatrix h = ComplexMatrix::Zero(model.s_dim * model.o_dim, model.s_dim * model.o_dim);
  for (std::size_t k = 0; k < model.s_dim; ++k) {
    ComplexMatrix flip = ComplexMatrix::Zero(model.o_dim, model.o_dim);
    flip(k + 1, 0) = 1.0;
    flip(0, k + 1) = 1.0;
    h += tensor(projector_onto(model.s_dim, k), flip);
  }
  return rate * h;
}

ComplexMatrix interference_observable(const MeasurementModel& model) {
  model.validate();
  if (model.s_dim != 2) {
    throw ValidationError("interference_observable: defined for the two-branch model only (s_dim = 2)");
  }
  const ComplexMatrix o12 = outer(basis_vector(model.o_dim, 1), basis_vector(model.o_dim, 2));
  const ComplexMatrix s12 = outer(basis_vector(2, 0), basis_vector(2, 1));
  const ComplexMatrix half = tensor(s12, o12);
  return half + half.adjoint();
}

Gemenge branch_gemenge(const MeasurementModel& model, const StateVector& psi_s) {
  model.validate();
  if (!(psi_s.layout() == model.system_layout())) {
    throw ValidationError("branch_gemenge: input must live on the S layout");
  }
  std::vector<GemengeRow> rows;
  for (std::size_t k = 0; k < model.s_dim; ++k) {
    const auto s = StateVector::basis(model.system_layout(), k);
    const auto o = StateVector::basis(model.pointer_layout(), k + 1);
    rows.push_back({s.tensor(o), std::norm(psi_s.amplitudes()(k))});
  }
  return Gemenge(std::move(rows));
}

std::vector<ComplexMatrix> ObserverAlgebra::projectors() const {
  std::vector<ComplexMatrix> out;
  for (const auto& c : pointers) out.push_back(c.projector);
  return out;
}

ObserverAlgebra observer_algebra(const MeasurementModel& model, const SpaceLayout& layout) {
  model.validate();
  const ComplexMatrix qo = embed(pointer_observable(model), layout, kObserverLabel);
  ObserverAlgebra obs;
  obs.algebra = share(generate_algebra({qo}, layout));
  auto characters = extremal_states(obs.algebra);
  if (characters.size() != model.o_dim) {
    throw NumericalError("observer_algebra: expected one character per pointer state");
  }
  obs.pointers.resize(model.o_dim, characters.front());
  std::vector<bool> taken(model.o_dim, false);
  for (auto& c : characters) {
    std::size_t match = model.o_dim;
    for (std::size_t i = 0; i < model.o_dim; ++i) {
      if (!taken[i] && std::abs(c.values[0] - model.qo_values[i]) <= kPointerMatch) match = i;
    }
    if (match == model.o_dim) {
      throw NumericalError("observer_algebra: character value matches no pointer eigenvalue");
    }
    taken[match] = true;
    c.values[0] = model.qo_values[match];
    obs.pointers[match] = std::move(c);
  }
  return obs;
}

StatisticalDoublet make_statistical_doublet(const DensityMatrix& rho,
                                            const std::vector<ComplexMatrix>& pointer_projectors) {
  StatisticalDoublet theta{rho, {}, pointer_projectors};
  for (const auto& p : pointer_projectors) {
    require_same_shape(rho.matrix(), p, "make_statistical_doublet");
    theta.information.push_back(std::max(0.0, (p * rho.matrix()).trace().real()));
  }
  double total = 0.0;
  for (double v : theta.information) total += v;
  if (std::abs(total - 1.0) > tolerance::kNormalization) {
    throw ValidationError("make_statistical_doublet: pointer projectors do not resolve the identity");
  }
  return theta;
}

StatisticalDoublet evolve_sle(const StatisticalDoublet& theta, const ComplexMatrix& h, double t) {
  require_same_shape(theta.dynamical.matrix(), h, "evolve_sle");
  if (!is_hermitian(h)) throw ValidationError("evolve_sle: Hamiltonian is not Hermitian");
  const ComplexMatrix u = unitary_from_hamiltonian(h, t);
  return make_statistical_doublet(theta.dynamical.conjugated(u), theta.pointer_projectors);
}

MeasurementPipeline::MeasurementPipeline(MeasurementModel model) : model_(std::move(model)) {
  model_.validate();
  layout_ = model_.full_layout();
  unitary_ = premeasurement_unitary(model_);
  if (model_.environment) {
    unitary_ = environment_coupling_unitary(model_) *
               tensor(unitary_, identity(model_.environment->e_dim));
  }
  observer_ = observer_algebra(model_, layout_);
}

StateVector MeasurementPipeline::evolve(const StateVector& psi_s) const {
  StateVector in = initial_state(model_, psi_s);
  if (model_.environment) {
    in = in.tensor(StateVector::basis(SpaceLayout({{kEnvironmentLabel, model_.environment->e_dim}}), 0));
  }
  ComplexVector out = unitary_ * in.amplitudes();
  out.normalize();
  return StateVector(layout_, std::move(out));
}

std::pair<EventRecord, DoubletState> MeasurementPipeline::run_event(const MeasurementInput& input,
                                                                    RandomStream& rng,
                                                                    std::uint64_t event_index) const {
  EventRecord rec;
  rec.event_index = event_index;
  rec.seed = rng.seed();

  const StateVector* psi_s = nullptr;
  std::optional<StateVector> drawn;
  if (const auto* pure = std::get_if<StateVector>(&input)) {
    rec.input_descriptor = "pure";
    psi_s = pure;
  } else {
    const auto& w = std::get<Gemenge>(input);
    auto [row, state] = sample_gemenge(w, rng);
    rec.input_descriptor = "gemenge";
    rec.gemenge_row = row;
    drawn = std::move(state);
    psi_s = &*drawn;
  }

  const StateVector final_state = evolve(*psi_s);
  const auto sampled = sample_individual_restriction(final_state, observer_.pointers, rng);
  rec.pointer_index = sampled.index;
  rec.impression_value = observer_.pointers[sampled.index].values[0];
  rec.probability_used = sampled.probability;

  DoubletState doublet{density_from_vector(final_state), observer_.pointers[sampled.index],
                       sampled.index, static_cast<std::size_t>(event_index)};
  return {std::move(rec), std::move(doublet)};
}

std::vector<EventRecord> MeasurementPipeline::run_events(const MeasurementInput& input,
                                                         std::size_t n_events, std::uint64_t seed,
                                                         unsigned threads) const {
  std::vector<EventRecord> records(n_events);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      RandomStream rng = RandomStream::derived(seed, i);
      records[i] = run_event(input, rng, i).first;
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1 || n_events < 2 * threads) {
    work(0, n_events);
    return records;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (n_events + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n_events, begin + chunk);
    if (begin < end) pool.emplace_back(work, begin, end);
  }
  pool.clear();
  return records;
}

std::pair<EventRecord, DoubletState> run_event(const MeasurementModel& model,
                                               const MeasurementInput& input, RandomStream& rng) {
  return MeasurementPipeline(model).run_event(input, rng);
}

std::vector<ComplexVector> environment_branch_states(const MeasurementModel& model) {
  model.validate();
  require_environment(model, "environment_branch_states");
  const std::size_t e_dim = model.environment->e_dim;
  const std::size_t branches = model.o_dim - 1;
  const double c = model.environment->e_overlap;
  if (c < 1.0 && e_dim < branches + 1) {
    throw ValidationError("environment: e_dim " + std::to_string(e_dim) + " cannot host " +
                          std::to_string(branches) + " record states next to |E_0> (need " +
                          std::to_string(branches + 1) + ")");
  }

  std::vector<ComplexVector> states{basis_vector(e_dim, 0)};
  if (c == 1.0) {
    for (std::size_t i = 0; i < branches; ++i) states.push_back(basis_vector(e_dim, 1));
    return states;
  }
  // Gram factor: rows of the Cholesky factor of the overlap matrix.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Constant(branches, branches, c);
  gram.diagonal().setOnes();
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw NumericalError("environment: overlap matrix not positive");
  const Eigen::MatrixXd l = llt.matrixL();
  for (std::size_t i = 0; i < branches; ++i) {
    ComplexVector v = ComplexVector::Zero(e_dim);
    for (std::size_t k = 0; k < branches; ++k) v(k + 1) = l(i, k);
    states.push_back(v);
  }
  return states;
}

ComplexMatrix environment_coupling_unitary(const MeasurementModel& model) {
  const auto e_states = environment_branch_states(model);
  const std::size_t e_dim = model.environment->e_dim;
  const ComplexVector& e0 = e_states[0];
  ComplexMatrix controlled = ComplexMatrix::Zero(model.o_dim * e_dim, model.o_dim * e_dim);
  for (std::size_t i = 0; i < model.o_dim; ++i) {
    ComplexMatrix w = identity(e_dim);
    if (i > 0) {
      // Quarter turn in the (E_0, E_i) plane; E_i is orthogonal to E_0.
      const ComplexVector& ei = e_states[i];
      w += -outer(e0, e0) - outer(ei, ei) + outer(ei, e0) - outer(e0, ei);
    }
    controlled += tensor(projector_onto(model.o_dim, i), w);
  }
  return tensor(identity(model.s_dim), controlled);
}

DensityMatrix couple_environment(const MeasurementModel& model, const DensityMatrix& rho_ms) {
  require_environment(model, "couple_environment");
  if (!(rho_ms.layout() == model.ms_layout())) {
    throw ValidationError("couple_environment: input must live on the S ⊗ O layout");
  }
  const std::size_t e_dim = model.environment->e_dim;
  const ComplexMatrix e0 = projector_onto(e_dim, 0);
  const ComplexMatrix u = environment_coupling_unitary(model);
  ComplexMatrix out = u * tensor(rho_ms.matrix(), e0) * u.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(model.mse_layout(), std::move(out));
}

StateVector couple_environment(const MeasurementModel& model, const StateVector& psi_ms) {
  require_environment(model, "couple_environment");
  if (!(psi_ms.layout() == model.ms_layout())) {
    throw ValidationError("couple_environment: input must live on the S ⊗ O layout");
  }
  const ComplexVector in = tensor(psi_ms.amplitudes(), basis_vector(model.environment->e_dim, 0));
  ComplexVector out = environment_coupling_unitary(model) * in;
  out.normalize();
  return StateVector(model.mse_layout(), std::move(out));
}

const char* to_string(PointerBasisStatus status) {
  switch (status) {
    case PointerBasisStatus::kUnique:
      return "UNIQUE";
    case PointerBasisStatus::kDegenerateUnresolved:
      return "DEGENERATE-UNRESOLVED";
  }
  return "?";
}

namespace {

constexpr double kWeightFloor = 1e-10;

// S-conditioned reduced O states: Tr_{S,E} [(|s_k><s_k| ⊗ 1) rho].
std::vector<ComplexMatrix> s_conditioned_o_states(const ComplexMatrix& rho, const SpaceLayout& layout) {
  const std::size_t s_dim = layout.dim(kSystemLabel);
  std::vector<ComplexMatrix> out;
  for (std::size_t k = 0; k < s_dim; ++k) {
    const ComplexMatrix proj = embed(projector_onto(s_dim, k), layout, kSystemLabel);
    out.push_back(partial_trace(proj * rho * proj, layout, {kObserverLabel}));
  }
  return out;
}

// Residual of psi against sum_i |S_i>|o_i>|E_i> with orthogonal S parts.
double triple_form_residual(const ComplexVector& psi, const SpaceLayout& layout,
                            const std::vector<ComplexVector>& o_vectors) {
  const std::size_t s_dim = layout.dim(kSystemLabel);
  const std::size_t o_dim = layout.dim(kObserverLabel);
  const std::size_t e_dim = layout.dim(kEnvironmentLabel);

  double captured = 0.0;
  double residual = 0.0;
  std::vector<ComplexVector> s_parts;
  for (const auto& o : o_vectors) {
    // Branch amplitude as an S x E matrix: (<o| contracted on the middle factor).
    ComplexMatrix branch = ComplexMatrix::Zero(s_dim, e_dim);
    for (std::size_t s = 0; s < s_dim; ++s) {
      for (std::size_t m = 0; m < o_dim; ++m) {
        for (std::size_t e = 0; e < e_dim; ++e) {
          branch(s, e) += std::conj(o(m)) * psi(s * o_dim * e_dim + m * e_dim + e);
        }
      }
    }
    const double weight = branch.squaredNorm();
    captured += weight;
    if (weight <= kWeightFloor) continue;
    Eigen::JacobiSVD<ComplexMatrix> svd(branch, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    for (Eigen::Index k = 1; k < sv.size(); ++k) residual += sv(k) * sv(k);
    s_parts.push_back(svd.matrixU().col(0));
  }
  for (std::size_t i = 0; i < s_parts.size(); ++i) {
    for (std::size_t j = i + 1; j < s_parts.size(); ++j) {
      residual += std::norm(s_parts[i].dot(s_parts[j]));
    }
  }
  residual += std::abs(1.0 - captured);
  return residual;
}

}  // namespace

PointerBasisResult extract_pointer_basis(const DensityMatrix& rho_mse, double tol) {
  const auto& layout = rho_mse.layout();
  if (layout.factor_count() != 3 || layout.factors()[0].label != kSystemLabel ||
      layout.factors()[1].label != kObserverLabel || layout.factors()[2].label != kEnvironmentLabel) {
    throw ValidationError("extract_pointer_basis: expected an S ⊗ O ⊗ E layout");
  }
  const double purity = rho_mse.purity();
  if (std::abs(purity - 1.0) > tol) {
    std::ostringstream msg;
    msg << "extract_pointer_basis: input is not approximately tri-decomposable (mixed state, "
           "purity "
        << purity << ")";
    throw ValidationError(msg.str());
  }
  const auto global = hermitian_eig(rho_mse.matrix());
  const ComplexVector psi = global.vectors.col(global.values.size() - 1);

  const ComplexMatrix rho_o = partial_trace(rho_mse.matrix(), layout, {kObserverLabel});
  const auto eig = hermitian_eig(rho_o);

  PointerBasisResult result;
  std::vector<std::pair<double, ComplexVector>> found;
  std::vector<ComplexMatrix> conditioned;
  for (const auto& cluster : eig.clusters) {
    if (cluster.value <= kWeightFloor) continue;
    const ComplexMatrix block = eig.vectors.middleCols(cluster.begin, cluster.size);
    if (cluster.size == 1) {
      found.emplace_back(cluster.value, block.col(0));
      continue;
    }
    // Degenerate weight: split the eigenspace with the S-conditioned O states.
    if (conditioned.empty()) conditioned = s_conditioned_o_states(rho_mse.matrix(), layout);
    ComplexMatrix mix = ComplexMatrix::Zero(cluster.size, cluster.size);
    for (std::size_t k = 0; k < conditioned.size(); ++k) {
      mix += (1.0 + std::numbers::sqrt2 * static_cast<double>(k)) *
             (block.adjoint() * conditioned[k] * block);
    }
    const auto inner = hermitian_eig(0.5 * (mix + mix.adjoint()));
    bool split = inner.clusters.size() == cluster.size;
    for (std::size_t k = 0; split && k < conditioned.size(); ++k) {
      const ComplexMatrix ck = inner.vectors.adjoint() * (block.adjoint() * conditioned[k] * block) *
                               inner.vectors;
      const ComplexMatrix off = ck - ComplexMatrix(ck.diagonal().asDiagonal());
      if (off.cwiseAbs().maxCoeff() > tolerance::kSpectralConsistency) split = false;
    }
    if (!split) {
      result.status = PointerBasisStatus::kDegenerateUnresolved;
      for (std::size_t k = 0; k < cluster.size; ++k) found.emplace_back(cluster.value, block.col(k));
      continue;
    }
    const ComplexMatrix rotated = block * inner.vectors;
    for (std::size_t k = 0; k < cluster.size; ++k) found.emplace_back(cluster.value, rotated.col(k));
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (auto& [w, v] : found) {
    result.weights.push_back(w);
    result.vectors.push_back(std::move(v));
  }
  result.residual = triple_form_residual(psi, layout, result.vectors);
  if (result.status == PointerBasisStatus::kUnique && result.residual > tol) {
    std::ostringstream msg;
    msg << "extract_pointer_basis: input is not approximately tri-decomposable (residual "
        << result.residual << ")";
    throw ValidationError(msg.str());
  }
  return result;
}

ComplexMatrix dephasing_hamiltonian(const MeasurementModel& model) {
  model.validate();
  require_environment(model, "dephasing_hamiltonian");
  const std::size_t d = model.environment->e_dim;
  ComplexMatrix fourier(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      fourier(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(d)),
                                 2.0 * std::numbers::pi * static_cast<double>(j * k) /
                                     static_cast<double>(d));
    }
  }
  std::vector<double> levels(d);
  for (std::size_t k = 0; k < d; ++k) levels[k] = static_cast<double>(k);
  const ComplexMatrix v_e = fourier * diagonal(std::span<const double>(levels)) * fourier.adjoint();
  ComplexMatrix h = model.environment->coupling_strength *
                    tensor(pointer_observable(model), 0.5 * (v_e + v_e.adjoint()));
  return 0.5 * (h + h.adjoint());
}

std::vector<double> pointer_state_stability(const MeasurementModel& model,
                                            const StateVector& o_state,
                                            std::span<const double> t_grid) {
  require_environment(model, "pointer_state_stability");
  if (!(o_state.layout() == model.pointer_layout())) {
    throw ValidationError("pointer_state_stability: state must live on the O layout");
  }
  const SpaceLayout oe({{kObserverLabel, model.o_dim}, {kEnvironmentLabel, model.environment->e_dim}});
  const ComplexMatrix h = dephasing_hamiltonian(model);
  const auto eig = hermitian_eig(h);
  const ComplexVector start = tensor(o_state.amplitudes(), basis_vector(model.environment->e_dim, 0));
  const ComplexVector start_eigen = eig.vectors.adjoint() * start;

  std::vector<double> purity;
  purity.reserve(t_grid.size());
  for (double t : t_grid) {
    ComplexVector phased = start_eigen;
    for (Eigen::Index k = 0; k < phased.size(); ++k) {
      phased(k) *= std::exp(Complex(0.0, -eig.values(k) * t));
    }
    const ComplexVector psi = eig.vectors * phased;
    const ComplexMatrix rho_o = partial_trace(outer(psi, psi), oe, {kObserverLabel});
    purity.push_back((rho_o * rho_o).trace().real());
  }
  return purity;
}

WignerFriendReport wigner_friend_report(const MeasurementModel& model, const StateVector& psi_s,
                                        std::size_t n_events, std::uint64_t seed) {
  MeasurementModel ms_model = model;
  ms_model.environment.reset();
  ms_model.validate();
  if (n_events == 0) throw ValidationError("wigner_friend_report: n_events must be positive");

  const MeasurementPipeline pipeline(ms_model);
  const StateVector final_pure = pipeline.evolve(psi_s);
  const DensityMatrix rho_pure = density_from_vector(final_pure);
  const DensityMatrix rho_mixed = gemenge_mix(branch_gemenge(ms_model, psi_s));
  const ComplexMatrix b = interference_observable(ms_model);

  WignerFriendReport report{rho_pure, expectation(rho_pure, b), rho_pure.purity(), {}, {}, {}, {},
                            {}, {}, {}, {}};

  report.events = pipeline.run_events(psi_s, n_events, seed);
  report.histogram.assign(ms_model.o_dim, 0);
  for (const auto& r : report.events) ++report.histogram[r.pointer_index];
  for (std::size_t c : report.histogram) {
    report.frequencies.push_back(static_cast<double>(c) / static_cast<double>(n_events));
  }
  report.born_probabilities = restriction_distribution(final_pure, pipeline.observer().pointers);

  const auto& obs = pipeline.observer();
  const auto phi = restrict_state(rho_pure, obs.algebra);
  report.restricted_values = {phi.evaluate(identity(rho_pure.dim())).real(),
                              phi.evaluate(obs.algebra->generators()[0]).real()};
  report.restricted_weights = decompose_restricted(phi, obs.pointers).probabilities();
  report.observer_view = breuer_indistinguishable(rho_pure, rho_mixed, obs.algebra);

  const auto with_b = share(generate_algebra({obs.algebra->generators()[0], b}, rho_pure.layout()));
  report.with_interference = breuer_indistinguishable(rho_pure, rho_mixed, with_b);
  return report;
}

}  // namespace qmeas
