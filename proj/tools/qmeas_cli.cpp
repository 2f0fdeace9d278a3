#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qmeas/errors.hpp"
#include "qmeas/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qmeas::ValidationError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate measurement scenarios and write reproducible reports."};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> events;
  std::optional<std::string> format;
  std::optional<std::string> out_path;
  bool quiet = false;
  bool timing = false;

  auto* run = app.add_subcommand("run", "Run the scenario described by a config file");
  run->add_option("config-path", config_path, "Scenario config (JSON)")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--events", events, "Override the number of events")->check(CLI::PositiveNumber);
  run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--out", out_path, "Write the report here (and the event log next to it)");
  run->add_flag("--quiet", quiet, "Suppress progress messages on stderr");
  run->add_flag("--timing", timing, "Include wall time in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    auto cfg = qmeas::parse_scenario(read_file(config_path));
    if (seed) cfg.seed = *seed;
    if (events) cfg.n_events = *events;
    if (format) cfg.output_format = qmeas::output_format_from_string(*format);

    const auto report = qmeas::run_scenario(cfg);
    if (out_path) {
      qmeas::write_report(report, cfg.output_format, *out_path, timing);
      if (!quiet) {
        std::cerr << "wrote " << *out_path;
        if (!report.events.empty()) std::cerr << " and " << qmeas::event_log_path(*out_path);
        std::cerr << '\n';
      }
    } else {
      std::cout << qmeas::emit_report(report, cfg.output_format, timing);
    }
    if (!quiet) {
      std::cerr << report.scenario << ": " << report.events.size() << " events in "
                << report.wall_time_seconds << " s\n";
    }
    return kExitOk;
  } catch (const qmeas::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const qmeas::NumericalError& e) {
    std::cerr << "numerical invariant violated: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}
