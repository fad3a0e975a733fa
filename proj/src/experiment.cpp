#include "holobus/experiment.hpp"

#include "holobus/errors.hpp"
#include "holobus/protocols.hpp"

#include "json.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace holobus::experiment {

namespace {

using json = nlohmann::json;
using cd = std::complex<double>;

const std::set<std::string> kKnownFields{
    "protocol", "output", "table", "seed", "N", "t_fin", "h", "gate", "twist_start", "input",
    "control", "dt", "min_steps", "gap_samples", "degeneracy_tol", "check_convergence", "convergence_tol",
    "site_cap", "circuit", "grid"};

class Reader {
 public:
  Reader(const json& root, std::vector<Diagnostic>& diags) : root_(root), diags_(diags) {}

  bool has(const char* key) const { return root_.contains(key); }

  template <typename T>
  void scalar(const char* key, T& out) {
    if (!has(key)) return;
    try {
      out = root_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, "has the wrong type");
    }
  }

  template <typename T>
  void list(const char* key, std::vector<T>& out) {
    if (!has(key)) return;
    const json& v = root_.at(key);
    try {
      out = v.is_array() ? v.get<std::vector<T>>() : std::vector<T>{v.get<T>()};
    } catch (const json::exception&) {
      fail(key, "must be a number or a list of numbers");
    }
  }

  void fail(std::string field, std::string message) {
    diags_.push_back({std::move(field), std::move(message)});
  }

  const json& at(const char* key) const { return root_.at(key); }

 private:
  const json& root_;
  std::vector<Diagnostic>& diags_;
};

std::optional<cd> parse_complex(const json& v) {
  if (v.is_number()) return cd(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return cd(v[0].get<double>(), v[1].get<double>());
  }
  return std::nullopt;
}

void parse_qubit(Reader& r, const char* key, QubitSpec& out) {
  if (!r.has(key)) return;
  const json& v = r.at(key);
  if (v.is_string()) {
    const auto name = v.get<std::string>();
    if (name == "up") out = {false, Qubit::spin_up()};
    else if (name == "down") out = {false, Qubit::spin_down()};
    else if (name == "plus") out = {false, Qubit::plus()};
    else if (name == "random") out = {true, {}};
    else r.fail(key, "unknown qubit '" + name + "' (use up, down, plus, random or [[re,im],[re,im]])");
    return;
  }
  if (v.is_array() && v.size() == 2) {
    const auto a = parse_complex(v[0]);
    const auto b = parse_complex(v[1]);
    if (a && b) {
      out = {false, Qubit{*a, *b}};
      return;
    }
  }
  r.fail(key, "must be a qubit name or a pair of amplitudes");
}

void parse_gate(Reader& r, std::optional<GateSpec>& out) {
  if (!r.has("gate")) return;
  const json& v = r.at("gate");
  if (v.is_string()) {
    out = GateSpec{v.get<std::string>(), std::nullopt};
    return;
  }
  if (v.is_object() && v.contains("matrix") && v["matrix"].is_array() && v["matrix"].size() == 2) {
    Eigen::Matrix2cd m;
    bool good = true;
    for (int i = 0; i < 2 && good; ++i) {
      const json& row = v["matrix"][static_cast<std::size_t>(i)];
      if (!row.is_array() || row.size() != 2) {
        good = false;
        break;
      }
      for (int j = 0; j < 2; ++j) {
        const auto c = parse_complex(row[static_cast<std::size_t>(j)]);
        if (!c) good = false;
        else m(i, j) = *c;
      }
    }
    if (good) {
      out = GateSpec{v.value("name", std::string("custom")), m};
      return;
    }
  }
  r.fail("gate", "must be a gate name or {\"matrix\": [[a, b], [c, d]]} with [re, im] entries");
}

void parse_circuit(Reader& r, flux::CircuitParams& p) {
  if (!r.has("circuit")) return;
  const json& c = r.at("circuit");
  if (!c.is_object()) {
    r.fail("circuit", "must be an object");
    return;
  }
  try {
    p.L_q = c.value("L_q", p.L_q);
    p.phi0 = c.value("phi0", p.phi0);
    p.U_q = c.value("U_q", p.U_q);
    if (c.contains("currents")) {
      const auto currents = c.at("currents").get<std::vector<double>>();
      if (currents.size() != 4) r.fail("circuit.currents", "needs exactly four currents");
      else std::copy(currents.begin(), currents.end(), p.currents.begin());
    }
  } catch (const json::exception&) {
    r.fail("circuit", "has a field of the wrong type");
  }
}

void parse_grid(Reader& r, flux::FluxGrid& g) {
  if (!r.has("grid")) return;
  const json& v = r.at("grid");
  if (!v.is_object()) {
    r.fail("grid", "must be an object");
    return;
  }
  try {
    g.n_ccjj = v.value("n_ccjj", g.n_ccjj);
    g.n_y = v.value("n_y", g.n_y);
    if (v.contains("phi_q")) g.phi_q = v.at("phi_q").get<std::vector<double>>();
  } catch (const json::exception&) {
    r.fail("grid", "has a field of the wrong type");
  }
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else if (ch == '\n') out += ' ';
    else out += ch;
  }
  return out + "\"";
}

std::string gate_list() {
  std::string names;
  for (const auto& n : gate_names()) names += (names.empty() ? "" : ", ") + n;
  return names;
}

bool is_resource_message(const std::string& msg) { return msg.find("exceeds the cap") != std::string::npos; }

}  // namespace

std::string format(const Diagnostic& d) { return d.field + ": " + d.message; }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ParseResult parse_spec(std::string_view text) {
  ParseResult result;
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    result.diagnostics.push_back(
        {"line " + std::to_string(line) + ", column " + std::to_string(column), "invalid JSON"});
    return result;
  }
  if (!root.is_object()) {
    result.diagnostics.push_back({"<root>", "spec must be a JSON object"});
    return result;
  }
  for (const auto& [key, value] : root.items()) {
    if (!kKnownFields.count(key)) result.diagnostics.push_back({key, "unknown field"});
  }

  ExperimentSpec spec;
  Reader r(root, result.diagnostics);
  std::string protocol;
  r.scalar("protocol", protocol);
  if (protocol == "bus") spec.protocol = Protocol::bus;
  else if (protocol == "gate") spec.protocol = Protocol::gate;
  else if (protocol == "cnot") spec.protocol = Protocol::cnot;
  else if (protocol == "flux-verify") spec.protocol = Protocol::flux_verify;
  else if (protocol.empty()) r.fail("protocol", "is required (bus, gate, cnot, flux-verify)");
  else r.fail("protocol", "unknown protocol '" + protocol + "' (bus, gate, cnot, flux-verify)");

  r.scalar("output", spec.output);
  std::string table = "fidelity";
  r.scalar("table", table);
  if (table == "gap") spec.table = Table::gap;
  else if (table != "fidelity") r.fail("table", "must be 'fidelity' or 'gap'");

  r.scalar("seed", spec.seed);
  std::vector<long long> n_sites;
  r.list("N", n_sites);
  if (r.has("N")) {
    spec.n_sites.clear();
    for (long long n : n_sites) {
      if (n < 1) r.fail("N", "chain lengths must be positive");
      else spec.n_sites.push_back(static_cast<std::size_t>(n));
    }
  }
  r.list("t_fin", spec.t_fin);
  r.list("h", spec.h);
  parse_gate(r, spec.gate);
  long long twist_start = static_cast<long long>(spec.twist_start);
  r.scalar("twist_start", twist_start);
  if (twist_start < 0) r.fail("twist_start", "must be nonnegative");
  else spec.twist_start = static_cast<std::size_t>(twist_start);
  parse_qubit(r, "input", spec.input);
  parse_qubit(r, "control", spec.control);

  r.scalar("dt", spec.evolution.dt);
  r.scalar("min_steps", spec.evolution.min_steps);
  r.scalar("gap_samples", spec.evolution.gap_samples);
  r.scalar("degeneracy_tol", spec.evolution.degeneracy_tol);
  r.scalar("check_convergence", spec.evolution.check_convergence);
  r.scalar("convergence_tol", spec.evolution.convergence_tol);
  r.scalar("site_cap", spec.evolution.site_cap);
  parse_circuit(r, spec.circuit);
  parse_grid(r, spec.flux_grid);

  if (result.diagnostics.empty()) result.spec = std::move(spec);
  return result;
}

std::optional<SingleQubitGate> resolve_gate(const GateSpec& gate) {
  if (gate.matrix) {
    try {
      return SingleQubitGate(*gate.matrix, gate.name);
    } catch (const ValidationError&) {
      return std::nullopt;
    }
  }
  return gate_by_name(gate.name);
}

std::vector<Diagnostic> validate(const ExperimentSpec& spec) {
  std::vector<Diagnostic> d;
  const auto add = [&](std::string field, std::string msg) { d.push_back({std::move(field), std::move(msg)}); };

  if (spec.output.empty()) add("output", "is required");
  const bool dynamic = spec.protocol != Protocol::flux_verify;

  if (dynamic) {
    try {
      spec.evolution.validate();
    } catch (const ValidationError& e) {
      add("evolution", e.what());
    }
    if (spec.table == Table::fidelity) {
      if (spec.t_fin.empty()) add("t_fin", "grid must be nonempty");
      for (double t : spec.t_fin) {
        if (!(t > 0.0) || !std::isfinite(t)) add("t_fin", "values must be positive (got " + format_number(t) + ")");
      }
    }
    if (!spec.input.random && !spec.input.value.is_normalized()) add("input", "qubit must be normalized");
  }

  if (spec.protocol == Protocol::bus || spec.protocol == Protocol::gate) {
    if (spec.n_sites.empty()) add("N", "grid must be nonempty");
    for (std::size_t n : spec.n_sites) {
      if (n % 2 == 0) add("N", "N must be odd (got " + std::to_string(n) + ")");
      else if (n < 3) add("N", "N must be at least 3 (got " + std::to_string(n) + ")");
    }
  }

  if (spec.protocol == Protocol::gate) {
    if (!spec.gate) {
      add("gate", "is required for the gate protocol; known gates: " + gate_list());
    } else if (!resolve_gate(*spec.gate)) {
      if (spec.gate->matrix) add("gate", "matrix is not unitary");
      else add("gate", "unknown gate '" + spec.gate->name + "'; known gates: " + gate_list());
    }
    for (std::size_t n : spec.n_sites) {
      if (spec.twist_start < 1 || spec.twist_start + 1 > n) {
        add("twist_start", "must satisfy 1 <= L <= N - 1 (N = " + std::to_string(n) + ")");
      }
    }
  }

  if (spec.protocol == Protocol::cnot) {
    if (spec.h.empty()) add("h", "grid must be nonempty");
    for (double h : spec.h) {
      if (!(h >= 0.0) || !std::isfinite(h)) add("h", "h must be >= 0 (got " + format_number(h) + ")");
    }
    if (!spec.control.random && !spec.control.value.is_normalized()) {
      add("control", "qubit must be normalized");
    }
  }

  if (spec.protocol == Protocol::flux_verify) {
    try {
      spec.circuit.validate();
    } catch (const ValidationError& e) {
      add("circuit", e.what());
    }
    if (spec.flux_grid.n_ccjj == 0 || spec.flux_grid.n_y == 0 || spec.flux_grid.phi_q.empty()) {
      add("grid", "flux grid must be nonempty");
    }
  }
  return d;
}

std::vector<Diagnostic> validate_text(std::string_view text) {
  ParseResult parsed = parse_spec(text);
  if (!parsed.spec) return parsed.diagnostics;
  return validate(*parsed.spec);
}

Qubit pick_qubit(const QubitSpec& q, std::uint64_t seed, std::uint64_t salt,
                 const std::vector<double>& key) {
  if (!q.random) return q.value;
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed),
                                   static_cast<std::uint32_t>(seed >> 32),
                                   static_cast<std::uint32_t>(salt)};
  for (double k : key) {
    const auto bits = std::bit_cast<std::uint64_t>(k);
    words.push_back(static_cast<std::uint32_t>(bits));
    words.push_back(static_cast<std::uint32_t>(bits >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::mt19937_64 rng(seq);
  return Qubit::random(rng);
}

namespace {

struct Table_ {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::filesystem::path& file, const Table_& t) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

std::vector<std::string> fidelity_cells(const SweepRow& r) {
  return {format_number(r.fidelity), format_number(r.infidelity), format_number(r.min_gap),
          format_number(r.polarization), csv_field(r.error)};
}

void note_row_errors(const std::vector<SweepRow>& rows, RunOutcome& outcome) {
  for (const auto& r : rows) {
    if (r.error.empty()) continue;
    if (r.accuracy_failure) outcome.exit_code = std::max(outcome.exit_code, int{ExitCode::accuracy_failure});
    else if (is_resource_message(r.error)) outcome.exit_code = std::max(outcome.exit_code, int{ExitCode::resource_cap});
    outcome.messages.push_back(r.error);
  }
}

Table_ chain_table(const ExperimentSpec& spec, std::size_t workers, RunOutcome& outcome) {
  const bool twisted = spec.protocol == Protocol::gate;
  const Frame twist = twisted ? frame_from_gate(*resolve_gate(*spec.gate)) : Frame{};
  Table_ t;
  if (spec.table == Table::gap) {
    t.header = {"N", "s", "gap", "ground_energy", "degeneracy"};
    for (std::size_t n : spec.n_sites) {
      std::vector<Frame> frames(n);
      if (twisted) {
        for (std::size_t i = spec.twist_start; i < n; ++i) frames[i] = twist;
      }
      const GapTrace trace = gap_trace(bus_hamiltonian(n, frames, 1.0), spec.evolution);
      for (const auto& g : trace.samples) {
        t.rows.push_back({std::to_string(n), format_number(g.s), format_number(g.gap),
                          format_number(g.ground_energy), std::to_string(g.degeneracy)});
      }
    }
    return t;
  }

  t.header = {"N", "t_fin", "fidelity", "one_minus_fidelity", "min_gap", "polarization", "error"};
  for (std::size_t n : spec.n_sites) {
    const auto runner = [&, n](double t_fin, double) {
      BusConfig bus{n, pick_qubit(spec.input, spec.seed, 1, {static_cast<double>(n)}),
                    t_fin, spec.evolution};
      if (!twisted) return run_bus(bus);
      return run_gate(GateConfig{bus, twist, spec.twist_start});
    };
    const auto rows = sweep(runner, SweepGrid{spec.t_fin, {0.0}}, workers);
    note_row_errors(rows, outcome);
    for (const auto& r : rows) {
      auto cells = fidelity_cells(r);
      cells.insert(cells.begin(), {std::to_string(n), format_number(r.t_fin)});
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

Table_ cnot_table(const ExperimentSpec& spec, std::size_t workers, RunOutcome& outcome) {
  Table_ t;
  if (spec.table == Table::gap) {
    t.header = {"h", "s", "gap", "ground_energy", "degeneracy"};
    for (double h : spec.h) {
      const GapTrace trace = gap_trace(cnot_schedule(h, 1.0), spec.evolution);
      for (const auto& g : trace.samples) {
        t.rows.push_back({format_number(h), format_number(g.s), format_number(g.gap),
                          format_number(g.ground_energy), std::to_string(g.degeneracy)});
      }
    }
    return t;
  }
  t.header = {"t_fin", "h", "fidelity", "one_minus_fidelity", "min_gap", "polarization", "error"};
  const auto runner = [&](double t_fin, double h) {
    CnotConfig c{pick_qubit(spec.input, spec.seed, 1, {}),
                 pick_qubit(spec.control, spec.seed, 2, {}), h, t_fin, spec.evolution};
    return run_cnot(c);
  };
  const auto rows = sweep(runner, SweepGrid{spec.t_fin, spec.h}, workers);
  note_row_errors(rows, outcome);
  for (const auto& r : rows) {
    auto cells = fidelity_cells(r);
    cells.insert(cells.begin(), {format_number(r.t_fin), format_number(r.h)});
    t.rows.push_back(std::move(cells));
  }
  return t;
}

constexpr double kFluxTolerance = 1e-12;

void flux_report(const ExperimentSpec& spec, const std::filesystem::path& file, RunOutcome& outcome) {
  const flux::SimplificationReport rep = flux::verify_simplification(spec.circuit, spec.flux_grid);
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << "flux simplification check\n";
  out << "grid_points " << rep.points << '\n';
  out << "assumptions_hold " << (rep.assumptions_hold ? "yes" : "no") << '\n';
  for (const auto& v : rep.violations) out << "violation " << v << '\n';
  out << "max_beta_eff_deviation " << format_number(rep.max_beta_eff_deviation) << '\n';
  out << "max_beta_lr_deviation " << format_number(rep.max_beta_lr_deviation) << '\n';
  out << "max_potential_deviation " << format_number(rep.max_potential_deviation) << '\n';
  out << "max_deviation " << format_number(rep.max_deviation()) << '\n';
  out << "tolerance " << format_number(kFluxTolerance) << '\n';
  const bool pass = rep.max_deviation() < kFluxTolerance;
  out << "status " << (rep.assumptions_hold ? (pass ? "pass" : "fail") : "assumptions-violated")
      << '\n';
  outcome.rows = rep.points;
  if (rep.assumptions_hold && !pass) {
    outcome.exit_code = ExitCode::accuracy_failure;
    outcome.messages.push_back("simplification deviation " + format_number(rep.max_deviation()) +
                               " exceeds " + format_number(kFluxTolerance));
  }
}

}  // namespace

RunOutcome run(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
               std::size_t workers) {
  RunOutcome outcome;
  if (const auto diags = validate(spec); !diags.empty()) {
    outcome.exit_code = ExitCode::spec_error;
    for (const auto& d : diags) outcome.messages.push_back(format(d));
    return outcome;
  }
  if (spec.protocol == Protocol::bus || spec.protocol == Protocol::gate) {
    for (std::size_t n : spec.n_sites) {
      if (n > spec.evolution.site_cap) {
        outcome.exit_code = ExitCode::resource_cap;
        outcome.messages.push_back("N = " + std::to_string(n) + " exceeds the site cap of " +
                                   std::to_string(spec.evolution.site_cap));
        return outcome;
      }
    }
  }
  if (spec.protocol == Protocol::cnot && cnot_system().n_sites() > spec.evolution.site_cap) {
    outcome.exit_code = ExitCode::resource_cap;
    outcome.messages.push_back("the CNOT network exceeds the site cap");
    return outcome;
  }

  std::filesystem::create_directories(out_dir);
  outcome.output_file = out_dir / spec.output;
  if (outcome.output_file.has_parent_path()) {
    std::filesystem::create_directories(outcome.output_file.parent_path());
  }

  if (spec.protocol == Protocol::flux_verify) {
    flux_report(spec, outcome.output_file, outcome);
    return outcome;
  }
  const Table_ table = spec.protocol == Protocol::cnot ? cnot_table(spec, workers, outcome)
                                                       : chain_table(spec, workers, outcome);
  write_csv(outcome.output_file, table);
  outcome.rows = table.rows.size();
  return outcome;
}

}  // namespace holobus::experiment
