#pragma once

#include "holobus/dynamics.hpp"
#include "holobus/flux_qubit.hpp"
#include "holobus/frames.hpp"
#include "holobus/state.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace holobus::experiment {

enum class Protocol { bus, gate, cnot, flux_verify };
enum class Table { fidelity, gap };

struct QubitSpec {
  bool random = false;
  Qubit value{};
};

struct GateSpec {
  std::string name;                       // Table name, or "custom"
  std::optional<Eigen::Matrix2cd> matrix;  // explicit 2x2 unitary
};

struct ExperimentSpec {
  Protocol protocol = Protocol::bus;
  std::string output;
  Table table = Table::fidelity;
  std::uint64_t seed = 0;

  std::vector<std::size_t> n_sites{3};
  std::vector<double> t_fin;
  std::vector<double> h{10.0};
  std::optional<GateSpec> gate;
  std::size_t twist_start = 1;
  QubitSpec input{};
  QubitSpec control{};
  EvolutionConfig evolution{};

  flux::CircuitParams circuit{};
  flux::FluxGrid flux_grid{};
};

struct Diagnostic {
  std::string field;
  std::string message;
};

std::string format(const Diagnostic& d);

struct ParseResult {
  std::optional<ExperimentSpec> spec;
  std::vector<Diagnostic> diagnostics;
};

/// JSON text -> spec. Syntax errors carry line/column; type errors name the field.
ParseResult parse_spec(std::string_view json_text);

/// Every violated invariant of an already-parsed spec; runs nothing.
std::vector<Diagnostic> validate(const ExperimentSpec& spec);

/// Parse + validate.
std::vector<Diagnostic> validate_text(std::string_view json_text);

/// Resolves the spec's gate; nullopt if it does not name a known gate.
std::optional<SingleQubitGate> resolve_gate(const GateSpec& gate);

/// Qubit used for one grid point; random qubits depend only on
/// (seed, salt, row key).
Qubit pick_qubit(const QubitSpec& q, std::uint64_t seed, std::uint64_t salt,
                 const std::vector<double>& key);

enum ExitCode : int { ok = 0, spec_error = 2, resource_cap = 3, accuracy_failure = 4 };

struct RunOutcome {
  int exit_code = ExitCode::ok;
  std::filesystem::path output_file;
  std::size_t rows = 0;
  std::vector<std::string> messages;
};

/// Runs a validated spec and writes its CSV (or flux report) into `out_dir`.
RunOutcome run(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
               std::size_t workers = 1);

/// Doubles printed with 12 significant digits.
std::string format_number(double v);

}  // namespace holobus::experiment
