#pragma once

// Declarative scenario configs, their execution, and byte-stable reports.
// The config grammar is documented in README.md ("Scenario files").

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmeas/measurement.hpp"

namespace qmeas {

enum class ScenarioKind { kPure, kGemenge, kWignerFriend, kDecoherence, kErasure, kAlgebraProbe };
enum class OutputFormat { kJson, kCsv };

const char* to_string(ScenarioKind kind);
const char* to_string(OutputFormat format);
ScenarioKind scenario_kind_from_string(std::string_view name);
OutputFormat output_format_from_string(std::string_view name);

/// Literal amplitudes may be off by this much in norm (rounded decimals);
/// they are renormalized after the check.
inline constexpr double kLiteralNormTolerance = 1e-3;

struct ScenarioTolerances {
  double algebra = tolerance::kAlgebraRank;
  double breuer = tolerance::kStateEquality;
  double pointer_basis = tolerance::kReconstruction;
};

struct GemengeInputRow {
  std::vector<Complex> amplitudes;
  double probability = 0.0;
};

/// A generator for the algebra-probe scenario: a named model operator or an
/// explicit matrix.
struct ProbeGenerator {
  std::string name;  // "q", "q-o", "q-o-ms", "b", "identity-o", or "matrix"
  std::optional<ComplexMatrix> matrix;
};

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::kPure;
  MeasurementModel model;
  std::optional<std::vector<Complex>> amplitudes;  // literal values as written
  std::optional<std::vector<GemengeInputRow>> gemenge;
  std::size_t n_events = 1000;
  std::uint64_t seed = 0;
  OutputFormat output_format = OutputFormat::kJson;
  ScenarioTolerances tolerances;
  std::vector<ProbeGenerator> probe_generators;
  std::vector<double> t_grid;
  unsigned threads = 1;

  /// Normalized S state built from `amplitudes`.
  StateVector system_state() const;
  /// Gemenge on S built from `gemenge`.
  Gemenge system_gemenge() const;
};

/// Parse and validate a JSON scenario document. Throws ValidationError with a
/// field path in the message.
ScenarioConfig parse_scenario(std::string_view text);

/// Canonical JSON form of a config; parse_scenario(dump) reproduces it.
nlohmann::json serialize_scenario(const ScenarioConfig& cfg);

struct RunReport {
  std::string scenario;
  nlohmann::json config;   // echo, sufficient to rerun
  nlohmann::json summary;
  std::vector<EventRecord> events;
  double wall_time_seconds = 0.0;
};

RunReport run_scenario(const ScenarioConfig& cfg);

/// Round to 12 significant digits (and fold -0 into 0).
double round_significant(double x);
/// Apply round_significant to every float in a JSON tree.
void canonicalize(nlohmann::json& j);

/// Serialized report. Keys are sorted and floats carry 12 significant digits,
/// so the output is byte-stable for a fixed config. Wall time is excluded
/// unless requested.
std::string emit_report(const RunReport& report, OutputFormat format, bool include_timing = false);

/// CSV event log: event-index,gemenge-row,pointer-index,impression-value,probability-used
std::string emit_event_log(const std::vector<EventRecord>& events);

/// The "summary" object of a JSON report.
nlohmann::json parse_report_summary(std::string_view json_report);

/// Writes the report to `out_path` and, when there are events, the event log
/// to `out_path + ".events.csv"`. Throws std::runtime_error if unwritable.
void write_report(const RunReport& report, OutputFormat format, const std::string& out_path,
                  bool include_timing = false);

/// Event-log path used by write_report.
std::string event_log_path(const std::string& out_path);

}  // namespace qmeas
