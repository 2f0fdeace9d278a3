#include "qmeas/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "qmeas/errors.hpp"

namespace qmeas {

using nlohmann::json;

const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kPure: return "pure";
    case ScenarioKind::kGemenge: return "gemenge";
    case ScenarioKind::kWignerFriend: return "wigner-friend";
    case ScenarioKind::kDecoherence: return "decoherence";
    case ScenarioKind::kErasure: return "erasure";
    case ScenarioKind::kAlgebraProbe: return "algebra-probe";
  }
  return "?";
}

const char* to_string(OutputFormat format) {
  return format == OutputFormat::kJson ? "json" : "csv";
}

ScenarioKind scenario_kind_from_string(std::string_view name) {
  for (auto k : {ScenarioKind::kPure, ScenarioKind::kGemenge, ScenarioKind::kWignerFriend,
                 ScenarioKind::kDecoherence, ScenarioKind::kErasure, ScenarioKind::kAlgebraProbe}) {
    if (name == to_string(k)) return k;
  }
  throw ValidationError("scenario-name: unknown scenario '" + std::string(name) + "'");
}

OutputFormat output_format_from_string(std::string_view name) {
  if (name == "json") return OutputFormat::kJson;
  if (name == "csv") return OutputFormat::kCsv;
  throw ValidationError("output-format: expected 'json' or 'csv', got '" + std::string(name) + "'");
}

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) field_error(path.empty() ? key : path + "." + key, "unknown field");
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) field_error(path, "must be finite");
  return v;
}

std::size_t get_count(const json& j, const std::string& path, std::size_t min_value) {
  if (!j.is_number_integer()) field_error(path, "expected an integer");
  if (j.is_number_unsigned()) {
    const auto v = j.get<std::uint64_t>();
    if (v < min_value) field_error(path, "must be at least " + std::to_string(min_value));
    return static_cast<std::size_t>(v);
  }
  const auto v = j.get<std::int64_t>();
  if (v < static_cast<std::int64_t>(min_value)) {
    field_error(path, "must be at least " + std::to_string(min_value));
  }
  return static_cast<std::size_t>(v);
}

std::vector<double> get_reals(const json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Complex get_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {get_number(j, path), 0.0};
  if (!j.is_array() || j.size() != 2) field_error(path, "expected [re, im]");
  return {get_number(j[0], path + "[0]"), get_number(j[1], path + "[1]")};
}

std::vector<Complex> get_amplitudes(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) field_error(path, "expected a non-empty list of [re, im] pairs");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_complex(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

ComplexMatrix get_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) field_error(path, "expected a square matrix of [re, im] entries");
  const std::size_t n = j.size();
  ComplexMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != n) field_error(row_path, "row length must equal row count");
    for (std::size_t c = 0; c < n; ++c) {
      m(r, c) = get_complex(j[r][c], row_path + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json amplitudes_json(const std::vector<Complex>& amps) {
  json arr = json::array();
  for (const auto& z : amps) arr.push_back(complex_json(z));
  return arr;
}

json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

StateVector build_state(const SpaceLayout& layout, const std::vector<Complex>& amps,
                        const std::string& path) {
  if (amps.size() != layout.total_dim()) {
    field_error(path, "expected " + std::to_string(layout.total_dim()) + " amplitudes, got " +
                          std::to_string(amps.size()));
  }
  ComplexVector v(amps.size());
  for (std::size_t i = 0; i < amps.size(); ++i) v(i) = amps[i];
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > kLiteralNormTolerance) {
    std::ostringstream msg;
    msg << "normalization violated (norm = " << norm << ")";
    field_error(path, msg.str());
  }
  v /= norm;
  return StateVector(layout, std::move(v));
}

MeasurementModel parse_model(const json& j) {
  MeasurementModel m;
  if (j.is_null()) return m;
  if (!j.is_object()) field_error("model", "expected an object");
  reject_unknown_keys(j, "model",
                      {"s-dim", "o-dim", "q-values", "qo-values", "interaction-duration", "environment"});
  if (j.contains("s-dim")) m.s_dim = get_count(j["s-dim"], "model.s-dim", 1);
  m.o_dim = m.s_dim + 1;
  if (j.contains("o-dim")) m.o_dim = get_count(j["o-dim"], "model.o-dim", 2);

  if (j.contains("q-values")) {
    m.q_values = get_reals(j["q-values"], "model.q-values");
  } else if (m.s_dim == 2) {
    m.q_values = {1.0, -1.0};
  } else {
    m.q_values.clear();
    for (std::size_t k = 0; k < m.s_dim; ++k) m.q_values.push_back(static_cast<double>(k + 1));
  }
  if (j.contains("qo-values")) {
    m.qo_values = get_reals(j["qo-values"], "model.qo-values");
  } else {
    // Ready value 0, record values equal to the measured eigenvalues, spare
    // pointer states numbered past the largest magnitude.
    m.qo_values.assign(m.o_dim, 0.0);
    double top = 0.0;
    for (std::size_t i = 1; i < m.o_dim && i <= m.s_dim; ++i) {
      m.qo_values[i] = m.q_values.size() >= i ? m.q_values[i - 1] : 0.0;
      top = std::max(top, std::abs(m.qo_values[i]));
    }
    for (std::size_t i = m.s_dim + 1; i < m.o_dim; ++i) m.qo_values[i] = top + static_cast<double>(i);
  }
  if (j.contains("interaction-duration")) {
    m.interaction_duration = get_number(j["interaction-duration"], "model.interaction-duration");
  }
  if (j.contains("environment") && !j["environment"].is_null()) {
    const auto& e = j["environment"];
    if (!e.is_object()) field_error("model.environment", "expected an object");
    reject_unknown_keys(e, "model.environment", {"e-dim", "coupling-strength", "e-overlap"});
    EnvironmentConfig env;
    env.e_dim = m.o_dim;
    if (e.contains("e-dim")) env.e_dim = get_count(e["e-dim"], "model.environment.e-dim", 2);
    if (e.contains("coupling-strength")) {
      env.coupling_strength = get_number(e["coupling-strength"], "model.environment.coupling-strength");
    }
    if (e.contains("e-overlap")) env.e_overlap = get_number(e["e-overlap"], "model.environment.e-overlap");
    m.environment = env;
  }
  try {
    m.validate();
  } catch (const ValidationError& err) {
    throw ValidationError(std::string("model: ") + err.what());
  }
  return m;
}

json model_json(const MeasurementModel& m) {
  json j;
  j["s-dim"] = m.s_dim;
  j["o-dim"] = m.o_dim;
  j["q-values"] = m.q_values;
  j["qo-values"] = m.qo_values;
  j["interaction-duration"] = m.interaction_duration;
  if (m.environment) {
    j["environment"] = {{"e-dim", m.environment->e_dim},
                        {"coupling-strength", m.environment->coupling_strength},
                        {"e-overlap", m.environment->e_overlap}};
  }
  return j;
}

}  // namespace

StateVector ScenarioConfig::system_state() const {
  if (!amplitudes) throw ValidationError("input.amplitudes: required for this scenario");
  return build_state(model.system_layout(), *amplitudes, "input.amplitudes");
}

Gemenge ScenarioConfig::system_gemenge() const {
  if (!gemenge) throw ValidationError("input.gemenge: required for this scenario");
  std::vector<GemengeRow> rows;
  for (std::size_t i = 0; i < gemenge->size(); ++i) {
    const std::string path = "input.gemenge[" + std::to_string(i) + "]";
    const auto& row = (*gemenge)[i];
    rows.push_back({build_state(model.system_layout(), row.amplitudes, path + ".amplitudes"),
                    row.probability});
  }
  try {
    return Gemenge(std::move(rows));
  } catch (const ValidationError& err) {
    throw ValidationError(std::string("input.gemenge: ") + err.what());
  }
}

ScenarioConfig parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ValidationError(std::string("malformed scenario document: ") + err.what());
  }
  if (!doc.is_object()) throw ValidationError("malformed scenario document: expected an object");
  reject_unknown_keys(doc, "",
                      {"scenario-name", "model", "input", "n-events", "seed", "output-format",
                       "tolerances", "probe-generators", "t-grid", "threads"});

  ScenarioConfig cfg;
  if (!doc.contains("scenario-name") || !doc["scenario-name"].is_string()) {
    field_error("scenario-name", "required string");
  }
  cfg.scenario = scenario_kind_from_string(doc["scenario-name"].get<std::string>());
  cfg.model = parse_model(doc.value("model", json()));

  if (doc.contains("input")) {
    const auto& in = doc["input"];
    if (!in.is_object()) field_error("input", "expected an object");
    reject_unknown_keys(in, "input", {"amplitudes", "gemenge"});
    if (in.contains("amplitudes")) cfg.amplitudes = get_amplitudes(in["amplitudes"], "input.amplitudes");
    if (in.contains("gemenge")) {
      const auto& rows = in["gemenge"];
      if (!rows.is_array() || rows.empty()) field_error("input.gemenge", "expected a non-empty list");
      std::vector<GemengeInputRow> parsed;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string path = "input.gemenge[" + std::to_string(i) + "]";
        if (!rows[i].is_object()) field_error(path, "expected an object");
        reject_unknown_keys(rows[i], path, {"amplitudes", "probability"});
        if (!rows[i].contains("amplitudes")) field_error(path + ".amplitudes", "required");
        if (!rows[i].contains("probability")) field_error(path + ".probability", "required");
        parsed.push_back({get_amplitudes(rows[i]["amplitudes"], path + ".amplitudes"),
                          get_number(rows[i]["probability"], path + ".probability")});
      }
      cfg.gemenge = std::move(parsed);
    }
  }

  if (doc.contains("n-events")) cfg.n_events = get_count(doc["n-events"], "n-events", 1);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) field_error("seed", "expected an unsigned 64-bit integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("output-format")) {
    if (!doc["output-format"].is_string()) field_error("output-format", "expected a string");
    cfg.output_format = output_format_from_string(doc["output-format"].get<std::string>());
  }
  if (doc.contains("tolerances")) {
    const auto& t = doc["tolerances"];
    if (!t.is_object()) field_error("tolerances", "expected an object");
    reject_unknown_keys(t, "tolerances", {"algebra", "breuer", "pointer-basis"});
    auto positive = [&](const char* key, double& slot) {
      if (!t.contains(key)) return;
      slot = get_number(t[key], std::string("tolerances.") + key);
      if (!(slot > 0.0)) field_error(std::string("tolerances.") + key, "must be positive");
    };
    positive("algebra", cfg.tolerances.algebra);
    positive("breuer", cfg.tolerances.breuer);
    positive("pointer-basis", cfg.tolerances.pointer_basis);
  }
  if (doc.contains("probe-generators")) {
    const auto& gens = doc["probe-generators"];
    if (!gens.is_array()) field_error("probe-generators", "expected a list");
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const std::string path = "probe-generators[" + std::to_string(i) + "]";
      if (gens[i].is_string()) {
        const auto name = gens[i].get<std::string>();
        static const std::set<std::string> known{"q", "q-o", "q-o-ms", "b", "identity-o"};
        if (!known.contains(name)) field_error(path, "unknown generator name '" + name + "'");
        cfg.probe_generators.push_back({name, std::nullopt});
      } else if (gens[i].is_object() && gens[i].contains("matrix")) {
        reject_unknown_keys(gens[i], path, {"matrix"});
        cfg.probe_generators.push_back({"matrix", get_matrix(gens[i]["matrix"], path + ".matrix")});
      } else {
        field_error(path, "expected a generator name or {\"matrix\": ...}");
      }
    }
  }
  if (doc.contains("t-grid")) {
    cfg.t_grid = get_reals(doc["t-grid"], "t-grid");
  }
  if (doc.contains("threads")) cfg.threads = static_cast<unsigned>(get_count(doc["threads"], "threads", 1));

  // Scenario-specific requirements, checked now so that errors carry field paths.
  switch (cfg.scenario) {
    case ScenarioKind::kGemenge:
      (void)cfg.system_gemenge();
      break;
    case ScenarioKind::kDecoherence:
      if (!cfg.model.environment) field_error("model.environment", "required for decoherence");
      if (cfg.model.s_dim != 2) field_error("model.s-dim", "decoherence scenario needs s-dim 2");
      (void)environment_branch_states(cfg.model);
      (void)cfg.system_state();
      break;
    case ScenarioKind::kWignerFriend:
      if (cfg.model.s_dim != 2) field_error("model.s-dim", "wigner-friend scenario needs s-dim 2");
      (void)cfg.system_state();
      break;
    case ScenarioKind::kPure:
    case ScenarioKind::kErasure:
      (void)cfg.system_state();
      break;
    case ScenarioKind::kAlgebraProbe:
      if (cfg.probe_generators.empty()) field_error("probe-generators", "required for algebra-probe");
      break;
  }
  return cfg;
}

json serialize_scenario(const ScenarioConfig& cfg) {
  json j;
  j["scenario-name"] = to_string(cfg.scenario);
  j["model"] = model_json(cfg.model);
  json input = json::object();
  if (cfg.amplitudes) input["amplitudes"] = amplitudes_json(*cfg.amplitudes);
  if (cfg.gemenge) {
    json rows = json::array();
    for (const auto& r : *cfg.gemenge) {
      rows.push_back({{"amplitudes", amplitudes_json(r.amplitudes)}, {"probability", r.probability}});
    }
    input["gemenge"] = rows;
  }
  if (!input.empty()) j["input"] = input;
  j["n-events"] = cfg.n_events;
  j["seed"] = cfg.seed;
  j["output-format"] = to_string(cfg.output_format);
  j["tolerances"] = {{"algebra", cfg.tolerances.algebra},
                     {"breuer", cfg.tolerances.breuer},
                     {"pointer-basis", cfg.tolerances.pointer_basis}};
  if (!cfg.probe_generators.empty()) {
    json gens = json::array();
    for (const auto& g : cfg.probe_generators) {
      if (g.matrix) {
        gens.push_back({{"matrix", matrix_json(*g.matrix)}});
      } else {
        gens.push_back(g.name);
      }
    }
    j["probe-generators"] = gens;
  }
  if (!cfg.t_grid.empty()) j["t-grid"] = cfg.t_grid;
  j["threads"] = cfg.threads;
  return j;
}

namespace {

json histogram_summary(const std::vector<EventRecord>& events, const MeasurementModel& model,
                       const std::vector<double>& expected) {
  std::vector<std::size_t> hist(model.o_dim, 0);
  double mean = 0.0;
  for (const auto& e : events) {
    ++hist[e.pointer_index];
    mean += e.impression_value;
  }
  const double n = static_cast<double>(events.size());
  mean /= n;
  std::vector<double> freq, sigma;
  double expected_mean = 0.0, worst_z = 0.0;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    freq.push_back(static_cast<double>(hist[i]) / n);
    const double p = expected[i];
    sigma.push_back(std::sqrt(p * (1.0 - p) / n));
    expected_mean += p * model.qo_values[i];
    if (sigma.back() > 0.0) worst_z = std::max(worst_z, std::abs(freq.back() - p) / sigma.back());
  }
  return {{"n-events", events.size()},
          {"histogram", hist},
          {"frequencies", freq},
          {"expected-probabilities", expected},
          {"binomial-sigma", sigma},
          {"max-deviation-sigma", worst_z},
          {"pointer-values", model.qo_values},
          {"mean-impression", mean},
          {"expected-impression", expected_mean}};
}

json breuer_json(const BreuerReport& r) {
  return {{"indistinguishable", r.indistinguishable},
          {"max-deviation", r.max_deviation},
          {"max-basis-deviation", r.max_basis_deviation},
          {"worst-is-generator", r.worst_is_generator},
          {"worst-index", r.worst_index}};
}

json vector_json(const ComplexVector& v) {
  // Fix the global phase: largest component real and positive.
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  const Complex phase = std::abs(v(arg)) > 0 ? std::conj(v(arg)) / std::abs(v(arg)) : Complex(1.0);
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(complex_json(phase * v(i)));
  return arr;
}

json run_ensemble(const ScenarioConfig& cfg, const MeasurementInput& input,
                  std::vector<EventRecord>& events) {
  const MeasurementPipeline pipeline(cfg.model);
  events = pipeline.run_events(input, cfg.n_events, cfg.seed, cfg.threads);
  std::vector<double> expected(cfg.model.o_dim, 0.0);
  if (const auto* pure = std::get_if<StateVector>(&input)) {
    expected = restriction_distribution(pipeline.evolve(*pure), pipeline.observer().pointers);
  } else {
    for (const auto& row : std::get<Gemenge>(input).rows()) {
      const auto p = restriction_distribution(pipeline.evolve(row.state), pipeline.observer().pointers);
      for (std::size_t i = 0; i < p.size(); ++i) expected[i] += row.probability * p[i];
    }
  }
  return histogram_summary(events, cfg.model, expected);
}

json run_wigner_friend(const ScenarioConfig& cfg, std::vector<EventRecord>& events) {
  auto r = wigner_friend_report(cfg.model, cfg.system_state(), cfg.n_events, cfg.seed);
  events = std::move(r.events);
  json internal = histogram_summary(events, cfg.model, r.born_probabilities);
  internal["restricted-state"] = {{"identity", r.restricted_values[0]}, {"q-o", r.restricted_values[1]}};
  internal["restricted-weights"] = r.restricted_weights;
  return {{"external", {{"interference-expectation", r.interference_expectation}, {"purity", r.purity}}},
          {"internal", internal},
          {"breuer",
           {{"observer-algebra", breuer_json(r.observer_view)},
            {"with-interference", breuer_json(r.with_interference)}}}};
}

json run_decoherence(const ScenarioConfig& cfg, std::vector<EventRecord>& events) {
  const auto& model = cfg.model;
  MeasurementModel ms_model = model;
  ms_model.environment.reset();
  const StateVector psi_s = cfg.system_state();
  const MeasurementPipeline ms_pipeline(ms_model);
  const StateVector psi_ms = ms_pipeline.evolve(psi_s);
  const DensityMatrix rho_ms = density_from_vector(psi_ms);
  const DensityMatrix rho_mse = couple_environment(model, rho_ms);
  const DensityMatrix reduced = rho_mse.reduced({kSystemLabel, kObserverLabel});

  // Branch coherence between |s_1 O_1> and |s_2 O_2>.
  const std::size_t i1 = 0 * model.o_dim + 1;
  const std::size_t i2 = 1 * model.o_dim + 2;
  const double coherence_before = std::abs(rho_ms.matrix()(i1, i2));
  const double coherence_after = std::abs(reduced.matrix()(i1, i2));

  const auto obs_ms = observer_algebra(ms_model, ms_model.ms_layout());
  const auto restricted_report =
      breuer_indistinguishable(reduced, rho_ms, obs_ms.algebra, cfg.tolerances.breuer);

  json pointer;
  try {
    const auto basis = extract_pointer_basis(rho_mse, cfg.tolerances.pointer_basis);
    json vecs = json::array();
    for (const auto& v : basis.vectors) vecs.push_back(vector_json(v));
    pointer = {{"status", to_string(basis.status)},
               {"weights", basis.weights},
               {"vectors", vecs},
               {"residual", basis.residual}};
  } catch (const ValidationError& err) {
    pointer = {{"status", "NOT-TRI-DECOMPOSABLE"}, {"error", err.what()}};
  }

  std::vector<double> grid = cfg.t_grid;
  if (grid.empty()) {
    for (int k = 0; k <= 10; ++k) grid.push_back(0.1 * k);
  }
  const auto o1 = StateVector::basis(model.pointer_layout(), 1);
  ComplexVector sup = ComplexVector::Zero(model.o_dim);
  sup(1) = sup(2) = 1.0 / std::numbers::sqrt2;
  const StateVector superposition(model.pointer_layout(), sup);

  json stability = {{"t-grid", grid},
                    {"pointer-state-purity", pointer_state_stability(model, o1, grid)},
                    {"superposition-purity", pointer_state_stability(model, superposition, grid)}};

  json out = run_ensemble(cfg, psi_s, events);
  out["branch-coherence-before"] = coherence_before;
  out["branch-coherence-after"] = coherence_after;
  out["e-overlap"] = model.environment->e_overlap;
  out["restricted-matches-pure"] = breuer_json(restricted_report);
  out["pointer-basis"] = pointer;
  out["stability"] = stability;
  return out;
}

json run_erasure(const ScenarioConfig& cfg) {
  MeasurementModel ms_model = cfg.model;
  ms_model.environment.reset();
  const StateVector psi_s = cfg.system_state();
  const StateVector psi_in = initial_state(ms_model, psi_s);
  const auto obs = observer_algebra(ms_model, ms_model.ms_layout());
  const auto projectors = obs.projectors();
  const ComplexMatrix u = premeasurement_unitary(ms_model);

  const auto before = make_statistical_doublet(density_from_vector(psi_in), projectors);
  const auto measured = make_statistical_doublet(before.dynamical.conjugated(u), projectors);
  const auto erased = make_statistical_doublet(measured.dynamical.conjugated(u.adjoint()), projectors);

  const StateVector recovered(ms_model.ms_layout(), u.adjoint() * (u * psi_in.amplitudes()));
  const double fidelity = recovered.fidelity(psi_in);

  // The same round trip through the interaction Hamiltonian.
  const ComplexMatrix h = interaction_hamiltonian(ms_model);
  const auto sle_forward = evolve_sle(before, h, ms_model.interaction_duration);
  const auto sle_back = evolve_sle(sle_forward, h, -ms_model.interaction_duration);
  const double sle_fidelity =
      (before.dynamical.matrix() * sle_back.dynamical.matrix()).trace().real();

  double reset_error = 0.0;
  for (std::size_t i = 0; i < erased.information.size(); ++i) {
    reset_error = std::max(reset_error, std::abs(erased.information[i] - before.information[i]));
    reset_error = std::max(reset_error, std::abs(sle_back.information[i] - before.information[i]));
  }
  return {{"recovered-initial-state-fidelity", fidelity},
          {"sle-recovered-fidelity", sle_fidelity},
          {"information-before", before.information},
          {"information-after-measurement", measured.information},
          {"information-after-erasure", erased.information},
          {"sle-information-after-measurement", sle_forward.information},
          {"sle-information-after-erasure", sle_back.information},
          {"information-reset", reset_error <= tolerance::kReconstruction},
          {"information-reset-error", reset_error}};
}

json run_algebra_probe(const ScenarioConfig& cfg) {
  const auto& model = cfg.model;
  std::vector<ComplexMatrix> gens;
  std::optional<SpaceLayout> layout;
  std::vector<std::string> names;
  auto want_layout = [&](const SpaceLayout& l, const std::string& name) {
    if (layout && !(*layout == l)) {
      throw ValidationError("probe-generators: '" + name + "' acts on a different space than earlier generators");
    }
    layout = l;
  };
  for (const auto& g : cfg.probe_generators) {
    names.push_back(g.name);
    if (g.matrix) {
      want_layout(SpaceLayout({{"H", static_cast<std::size_t>(g.matrix->rows())}}), g.name);
      gens.push_back(*g.matrix);
    } else if (g.name == "q") {
      want_layout(model.system_layout(), g.name);
      gens.push_back(system_observable(model));
    } else if (g.name == "q-o") {
      want_layout(model.pointer_layout(), g.name);
      gens.push_back(pointer_observable(model));
    } else if (g.name == "identity-o") {
      want_layout(model.pointer_layout(), g.name);
      gens.push_back(identity(model.o_dim));
    } else if (g.name == "q-o-ms") {
      want_layout(model.ms_layout(), g.name);
      gens.push_back(embed(pointer_observable(model), model.ms_layout(), kObserverLabel));
    } else if (g.name == "b") {
      want_layout(model.ms_layout(), g.name);
      gens.push_back(interference_observable(model));
    }
  }
  const auto alg = share(generate_algebra(gens, *layout, cfg.tolerances.algebra));
  json out = {{"generators", names},
              {"space-dim", alg->space_dim()},
              {"dimension", alg->dimension()},
              {"commutative", alg->commutative()},
              {"max-commutator", max_commutator(*alg)}};
  if (alg->commutative()) {
    json chars = json::array();
    for (const auto& c : extremal_states(alg)) {
      chars.push_back({{"values", c.values}, {"rank", std::lround(c.projector.trace().real())}});
    }
    out["characters"] = chars;
  }
  return out;
}

void check_report_invariants(const RunReport& report) {
  // Every probability-like array must lie in [0,1]; histograms must account for every event.
  std::function<void(const json&, const std::string&)> walk = [&](const json& j, const std::string& key) {
    if (j.is_object()) {
      for (const auto& [k, v] : j.items()) walk(v, k);
    } else if (j.is_array()) {
      for (const auto& v : j) walk(v, key);
    } else if (j.is_number() &&
               (key.find("probabilit") != std::string::npos || key == "frequencies" ||
                key == "restricted-weights")) {
      const double p = j.get<double>();
      if (p < -tolerance::kNormalization || p > 1.0 + tolerance::kNormalization) {
        throw NumericalError("report invariant violated: " + key + " value outside [0,1]");
      }
    }
  };
  walk(report.summary, "");
  std::function<void(const json&)> hist = [&](const json& j) {
    if (!j.is_object()) return;
    if (j.contains("histogram") && j.contains("n-events")) {
      std::size_t total = 0;
      for (const auto& c : j["histogram"]) total += c.get<std::size_t>();
      if (total != j["n-events"].get<std::size_t>()) {
        throw NumericalError("report invariant violated: histogram does not sum to n-events");
      }
    }
    for (const auto& [_, v] : j.items()) hist(v);
  };
  hist(report.summary);
  for (const auto& e : report.events) {
    if (e.probability_used < 0.0 || e.probability_used > 1.0 + tolerance::kNormalization) {
      throw NumericalError("report invariant violated: event probability outside [0,1]");
    }
  }
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.scenario = to_string(cfg.scenario);
  report.config = serialize_scenario(cfg);
  try {
    switch (cfg.scenario) {
      case ScenarioKind::kPure:
        report.summary = run_ensemble(cfg, cfg.system_state(), report.events);
        break;
      case ScenarioKind::kGemenge:
        report.summary = run_ensemble(cfg, cfg.system_gemenge(), report.events);
        break;
      case ScenarioKind::kWignerFriend:
        report.summary = run_wigner_friend(cfg, report.events);
        break;
      case ScenarioKind::kDecoherence:
        report.summary = run_decoherence(cfg, report.events);
        break;
      case ScenarioKind::kErasure:
        report.summary = run_erasure(cfg);
        break;
      case ScenarioKind::kAlgebraProbe:
        report.summary = run_algebra_probe(cfg);
        break;
    }
  } catch (const ValidationError& err) {
    throw ValidationError(std::string("scenario '") + report.scenario + "': " + err.what());
  } catch (const NumericalError& err) {
    throw NumericalError(std::string("scenario '") + report.scenario + "': " + err.what());
  }
  canonicalize(report.summary);
  check_report_invariants(report);
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

double round_significant(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double y = std::strtod(buf, nullptr);
  return y == 0.0 ? 0.0 : y;
}

void canonicalize(json& j) {
  if (j.is_number_float()) {
    j = round_significant(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& v : j) canonicalize(v);
  }
}

namespace {

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

json report_json(const RunReport& report, bool include_timing) {
  json j = {{"scenario-name", report.scenario},
            {"config", report.config},
            {"summary", report.summary},
            {"event-count", report.events.size()}};
  if (include_timing) j["wall-time-seconds"] = report.wall_time_seconds;
  canonicalize(j);
  return j;
}

}  // namespace

std::string emit_report(const RunReport& report, OutputFormat format, bool include_timing) {
  const json j = report_json(report, include_timing);
  if (format == OutputFormat::kJson) return j.dump(2) + "\n";
  std::ostringstream out;
  out << "key,value\n";
  const json flat = j.flatten();
  for (const auto& [path, value] : flat.items()) {
    out << path << ',';
    if (value.is_string()) {
      out << value.get<std::string>();
    } else if (value.is_number_float()) {
      out << format_number(value.get<double>());
    } else {
      out << value.dump();
    }
    out << '\n';
  }
  return out.str();
}

std::string emit_event_log(const std::vector<EventRecord>& events) {
  std::ostringstream out;
  out << "event-index,gemenge-row,pointer-index,impression-value,probability-used\n";
  for (const auto& e : events) {
    out << e.event_index << ',';
    if (e.gemenge_row) out << *e.gemenge_row;
    out << ',' << e.pointer_index << ',' << format_number(e.impression_value) << ','
        << format_number(e.probability_used) << '\n';
  }
  return out.str();
}

json parse_report_summary(std::string_view json_report) {
  try {
    return json::parse(json_report).at("summary");
  } catch (const json::exception& err) {
    throw ValidationError(std::string("malformed report: ") + err.what());
  }
}

std::string event_log_path(const std::string& out_path) { return out_path + ".events.csv"; }

void write_report(const RunReport& report, OutputFormat format, const std::string& out_path,
                  bool include_timing) {
  auto write = [](const std::string& path, const std::string& data) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << data;
    if (!f) throw std::runtime_error("failed writing '" + path + "'");
  };
  write(out_path, emit_report(report, format, include_timing));
  if (!report.events.empty()) write(event_log_path(out_path), emit_event_log(report.events));
}

}  // namespace qmeas
