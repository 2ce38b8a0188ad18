#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "runner/config.hpp"
#include "runner/experiment.hpp"
#include "runner/report.hpp"
#include "sideinfo/errors.hpp"

using namespace sideinfo;
using namespace sideinfo::runner;

namespace {

int execute(ExperimentConfig config) {
  // CSV goes to stdout when no path is set; notes then move to stderr,
  // except for verify and probe, whose only output is notes.
  const bool to_stdout = config.output_path.empty();
  const bool notes_only = config.command == Command::verify || config.command == Command::probe;
  std::ostream& notes = to_stdout && !notes_only ? std::cerr : std::cout;
  const auto rows = run_experiment(config, notes);
  if (to_stdout) {
    if (!notes_only) write_report(rows, std::cout);
  } else {
    emit_report(rows, config.output_path);
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Source coding with side information: optimal codes, multi-code search and exponents"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> workers;

  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("--config", config_path, "Path to the JSON config")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out, "Write CSV here instead of the config's output_path");
  run->add_option("--workers", workers, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Run every module's invariant suite");
  verify->add_option("--seed", seed, "Seed for the randomized instances");
  verify->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    ExperimentConfig config;
    if (*run) config = load_config(config_path);
    if (*verify) config.command = Command::verify;
    if (seed) config.seed = *seed;
    if (out) config.output_path = *out;
    if (workers) config.workers = *workers;
    return execute(std::move(config));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const ArgumentError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const VerifyFailure& e) {
    std::cerr << "verify failure: " << e.what() << '\n';
    return exit_verify;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return exit_resource;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return exit_io;
  }
}
