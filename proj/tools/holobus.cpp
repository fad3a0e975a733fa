// Command-line front end: run and validate experiment specs, list gates.
#include "holobus/errors.hpp"
#include "holobus/experiment.hpp"
#include "holobus/frames.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ex = holobus::experiment;

namespace {

bool read_file(const std::string& path, std::string& text) {
  std::ifstream in(path);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  text = ss.str();
  return true;
}

int report(const std::vector<ex::Diagnostic>& diags) {
  for (const auto& d : diags) std::cerr << "error: " << ex::format(d) << '\n';
  return diags.empty() ? ex::ExitCode::ok : ex::ExitCode::spec_error;
}

void print_row(const Eigen::Vector3d& v) {
  std::printf("  % .6f % .6f % .6f\n", v(0), v(1), v(2));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holographic spin-chain bus and gate simulator"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_dir = ".";
  std::size_t workers = 1;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment spec and write its table");
  run_cmd->add_option("spec", spec_path, "Experiment spec (JSON)")->required();
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--workers", workers, "Worker threads for grid sweeps")
      ->check(CLI::PositiveNumber);

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a spec without running it");
  validate_cmd->add_option("spec", validate_path, "Experiment spec (JSON)")->required();

  auto* gates_cmd = app.add_subcommand("gates", "Named single-qubit gates");
  gates_cmd->require_subcommand(1);
  auto* gates_list = gates_cmd->add_subcommand("list", "List gates and their frames");

  CLI11_PARSE(app, argc, argv);

  if (gates_list->parsed()) {
    for (const auto& gate : holobus::named_gates()) {
      const holobus::Frame f = holobus::frame_from_gate(gate);
      std::cout << gate.name() << '\n';
      std::cout.flush();
      for (int a = 0; a < 3; ++a) {
        std::printf("  %s' =", holobus::axis_name(static_cast<holobus::Axis>(a)).data());
        print_row(f.primed(static_cast<holobus::Axis>(a)));
      }
      std::fflush(stdout);
    }
    return ex::ExitCode::ok;
  }

  const std::string& path = run_cmd->parsed() ? spec_path : validate_path;
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "error: cannot read " << path << '\n';
    return ex::ExitCode::spec_error;
  }

  if (validate_cmd->parsed()) {
    const int code = report(ex::validate_text(text));
    if (code == ex::ExitCode::ok) std::cout << path << ": ok\n";
    return code;
  }

  const ex::ParseResult parsed = ex::parse_spec(text);
  if (!parsed.spec) return report(parsed.diagnostics);
  try {
    const ex::RunOutcome outcome = ex::run(*parsed.spec, out_dir, workers);
    for (const auto& m : outcome.messages) std::cerr << m << '\n';
    if (!outcome.output_file.empty() && outcome.exit_code != ex::ExitCode::spec_error) {
      std::cout << "wrote " << outcome.rows << " rows to " << outcome.output_file.string() << '\n';
    }
    return outcome.exit_code;
  } catch (const holobus::ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ex::ExitCode::resource_cap;
  } catch (const holobus::AccuracyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ex::ExitCode::accuracy_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
