#pragma once

// Measurement models: a system S measured by an observer register O, with an
// optional environment E attached to O.
//
// Basis conventions (composite index = s * dim(O) * dim(E) + o * dim(E) + e):
//   S index k      <-> |s_{k+1}>, eigenvalue q_values[k] of Q
//   O index 0      <-> |O_0>, the "ready" pointer state
//   O index i >= 1 <-> |O_i>, recording |s_i>; qo_values[i] == q_values[i-1]
//   E index 0      <-> |E_0>, the environment's initial state
//
// Every event keeps two components: the dynamical one, which only ever evolves
// unitarily, and the information one, which is the pointer character the
// observer's commutative algebra {I, Q_O} assigns in that event.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qmeas/algebraic_states.hpp"
#include "qmeas/states.hpp"

namespace qmeas {

inline const std::string kSystemLabel = "S";
inline const std::string kObserverLabel = "O";
inline const std::string kEnvironmentLabel = "E";

struct EnvironmentConfig {
  std::size_t e_dim = 3;
  double coupling_strength = 1.0;  // g in the dephasing coupling g * Q_O ⊗ V_E
  double e_overlap = 0.0;          // <E_i|E_j> for distinct record branches
};

struct MeasurementModel {
  std::size_t s_dim = 2;
  std::size_t o_dim = 3;
  std::vector<double> q_values{1.0, -1.0};
  std::vector<double> qo_values{0.0, 1.0, -1.0};
  double interaction_duration = 1.0;
  std::optional<EnvironmentConfig> environment;

  /// Throws ValidationError when an invariant is violated.
  void validate() const;

  SpaceLayout system_layout() const;
  SpaceLayout pointer_layout() const;
  SpaceLayout ms_layout() const;
  /// S ⊗ O ⊗ E; requires an environment.
  SpaceLayout mse_layout() const;
  /// ms_layout() or mse_layout(), depending on whether an environment is configured.
  SpaceLayout full_layout() const;
};

/// Q on S and Q_O on O.
ComplexMatrix system_observable(const MeasurementModel& model);
ComplexMatrix pointer_observable(const MeasurementModel& model);

/// psi_s ⊗ |O_0>
StateVector initial_state(const MeasurementModel& model, const StateVector& psi_s);

/// Controlled swap |s_i>|O_0> <-> |s_i>|O_i> on S ⊗ O. Self-inverse.
ComplexMatrix premeasurement_unitary(const MeasurementModel& model);

/// (pi / (2 dt)) sum_i |s_i><s_i| ⊗ (|O_i><O_0| + |O_0><O_i|). Evolving for dt
/// maps |s_i>|O_0> to -i |s_i>|O_i>; the -i is common to all branches.
ComplexMatrix interaction_hamiltonian(const MeasurementModel& model);

/// |O_1><O_2| ⊗ |s_1><s_2| + h.c. on S ⊗ O (requires s_dim == 2).
ComplexMatrix interference_observable(const MeasurementModel& model);

/// Post-measurement branch table {(|s_i>|O_i>, |a_i|^2)} for input psi_s.
Gemenge branch_gemenge(const MeasurementModel& model, const StateVector& psi_s);

/// The observer's effective algebra {I, Q_O} on a layout that contains O,
/// with its characters ordered by pointer index.
struct ObserverAlgebra {
  AlgebraRef algebra;
  std::vector<Character> pointers;  // pointers[i] <-> |O_i>; values[0] == qo_values[i] exactly
  std::vector<ComplexMatrix> projectors() const;
};

ObserverAlgebra observer_algebra(const MeasurementModel& model, const SpaceLayout& layout);

/// Ensemble-level doublet: density matrix plus the pointer-outcome distribution.
struct StatisticalDoublet {
  DensityMatrix dynamical;
  std::vector<double> information;  // P_j = tr(P_j rho), in pointer order
  std::vector<ComplexMatrix> pointer_projectors;
};

StatisticalDoublet make_statistical_doublet(const DensityMatrix& rho,
                                            const std::vector<ComplexMatrix>& pointer_projectors);

/// Unitary evolution of the dynamical part under h for time t, then a refresh
/// of the information part from the pointer projectors.
StatisticalDoublet evolve_sle(const StatisticalDoublet& theta, const ComplexMatrix& h, double t);

/// Individual doublet after one event.
struct DoubletState {
  DensityMatrix dynamical;
  Character information;
  std::size_t pointer_index;
  std::size_t event_index;
};

struct EventRecord {
  std::uint64_t event_index = 0;
  std::uint64_t seed = 0;
  std::string input_descriptor;
  std::optional<std::size_t> gemenge_row;
  std::size_t pointer_index = 0;
  double impression_value = 0.0;
  double probability_used = 0.0;
};

using MeasurementInput = std::variant<StateVector, Gemenge>;

/// Precomputed operators for repeated events on one model.
class MeasurementPipeline {
 public:
  explicit MeasurementPipeline(MeasurementModel model);

  const MeasurementModel& model() const { return model_; }
  const ObserverAlgebra& observer() const { return observer_; }
  const SpaceLayout& layout() const { return layout_; }

  /// Final individual state of the composite for a given S input (no sampling).
  StateVector evolve(const StateVector& psi_s) const;

  std::pair<EventRecord, DoubletState> run_event(const MeasurementInput& input,
                                                 RandomStream& rng,
                                                 std::uint64_t event_index = 0) const;

  /// Event i draws from RandomStream::derived(seed, i). Output is independent
  /// of the number of worker threads.
  std::vector<EventRecord> run_events(const MeasurementInput& input, std::size_t n_events,
                                      std::uint64_t seed, unsigned threads = 1) const;

 private:
  MeasurementModel model_;
  SpaceLayout layout_;
  ComplexMatrix unitary_;  // premeasurement, followed by the environment coupling if any
  ObserverAlgebra observer_;
};

std::pair<EventRecord, DoubletState> run_event(const MeasurementModel& model,
                                               const MeasurementInput& input, RandomStream& rng);

/// |E_i> family: index 0 is |E_0>; record branches i >= 1 live on E indices
/// 1..o_dim-1 with pairwise overlap e_overlap.
std::vector<ComplexVector> environment_branch_states(const MeasurementModel& model);

/// sum_i |O_i><O_i| ⊗ W_i on S ⊗ O ⊗ E with W_i |E_0> = |E_i>.
ComplexMatrix environment_coupling_unitary(const MeasurementModel& model);

DensityMatrix couple_environment(const MeasurementModel& model, const DensityMatrix& rho_ms);
StateVector couple_environment(const MeasurementModel& model, const StateVector& psi_ms);

enum class PointerBasisStatus { kUnique, kDegenerateUnresolved };
const char* to_string(PointerBasisStatus status);

struct PointerBasisResult {
  std::vector<ComplexVector> vectors;  // on O, ordered by decreasing weight
  std::vector<double> weights;         // eigenvalues of the reduced O state
  PointerBasisStatus status = PointerBasisStatus::kUnique;
  double residual = 0.0;               // distance from the S-O-E triple form
};

/// Pointer basis of a pure S ⊗ O ⊗ E state. Degenerate reduced spectra are
/// split using the O states conditioned on each S basis state.
PointerBasisResult extract_pointer_basis(const DensityMatrix& rho_mse,
                                         double tol = tolerance::kReconstruction);

/// g * Q_O ⊗ V_E on O ⊗ E, with V_E = diag(0..e_dim-1) in the discrete Fourier
/// basis of E (so |E_0> is spread evenly over its eigenvectors).
ComplexMatrix dephasing_hamiltonian(const MeasurementModel& model);

/// Purity of Tr_E after evolving o_state ⊗ |E_0> for each t.
std::vector<double> pointer_state_stability(const MeasurementModel& model,
                                            const StateVector& o_state,
                                            std::span<const double> t_grid);

struct WignerFriendReport {
  // External observer: the whole S+O is in a pure state.
  DensityMatrix final_state;
  double interference_expectation;
  double purity;
  // Internal observer: sampled impressions and the restricted state.
  std::vector<std::size_t> histogram;  // by pointer index
  std::vector<double> frequencies;
  std::vector<double> born_probabilities;
  std::vector<double> restricted_values;  // <phi_O; I>, <phi_O; Q_O>
  std::vector<double> restricted_weights; // decomposition over pointer characters
  BreuerReport observer_view;             // pure vs mixed on {I, Q_O}
  BreuerReport with_interference;         // pure vs mixed on {Q_O, B}
  std::vector<EventRecord> events;
};

WignerFriendReport wigner_friend_report(const MeasurementModel& model, const StateVector& psi_s,
                                        std::size_t n_events, std::uint64_t seed);

}  // namespace qmeas
