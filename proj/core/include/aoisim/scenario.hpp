#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aoisim/access.hpp"
#include "aoisim/mdp.hpp"
#include "aoisim/policies.hpp"

namespace aoisim {

/// Configuration problem (schema violation, unknown field, bad value).
/// Maps to CLI exit code 1; runtime failures map to 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AccessRunConfig {
  AccessProtocol protocol = AccessProtocol::ipra;
  AccessConfig config;
  bool auto_threshold = false;
  std::uint64_t tune_horizon = 200'000;
  int tune_grid_points = 13;
  std::optional<double> tune_grid_lo;
  std::optional<double> tune_grid_hi;
};

/// Declarative description of one experiment: terminals, what to run
/// (policies, the exact two-terminal oracle, a contention protocol), the
/// horizon, replications, optional one-variable sweep, and the master seed
/// every stream derives from.
struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  std::uint64_t horizon = 1'000'000;
  int replications = 1;
  int frame_slots = 1;
  std::vector<TerminalSpec> terminals;
  std::vector<std::string> policies;  // policy names and/or "mdp_oracle"
  std::optional<AccessRunConfig> access;
  std::optional<std::string> sweep_variable;
  std::vector<double> sweep_values;
  std::optional<std::string> output;

  void validate() const;
};

/// Parses and schema-checks a config from JSON text / file. Throws
/// ConfigError with a field-specific message.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);

/// One CSV row. normalized_aoi is filled on access rows when a centralized
/// policy row exists at the same sweep point (access AoI divided by the
/// first policy row's AoI). wall_ms is the only nondeterministic column.
struct CsvRow {
  std::string scenario;
  std::string sweep_var;
  std::optional<double> sweep_value;
  int replication = 0;
  std::string kind;   // policy | access | oracle
  std::string label;  // whittle, rr_one, ipra, mdp_oracle, ...
  int n_terminals = 0;
  std::uint64_t horizon = 0;
  int frame_slots = 1;
  std::uint64_t seed = 0;
  double avg_weighted_aoi = 0.0;
  std::vector<double> per_terminal_aoi;
  std::vector<double> violation_freq;
  ContentionStats contention;
  double index_threshold = 0.0;
  std::optional<double> normalized_aoi;
  double wall_ms = 0.0;
};

std::string csv_header();
std::string to_csv_line(const CsvRow& row);

/// Executes the scenario: one row per (sweep point, run item, replication);
/// oracle rows once per sweep point. Grid points and replications run
/// concurrently (AOISIM_THREADS, default hardware concurrency); results are
/// merged in deterministic order, so the CSV is byte-identical for a given
/// config and seed regardless of thread count, wall_ms aside. Writes
/// config.output if set.
std::vector<CsvRow> run_scenario(const ScenarioConfig& config);

void write_csv(const std::string& path, const std::vector<CsvRow>& rows);

struct PresetInfo {
  std::string name;
  std::string description;
};

std::vector<PresetInfo> list_presets();
ScenarioConfig make_preset(const std::string& name);

/// One state of the index-validation grid: the closed-form index must
/// bracket the decoupled oracle's action-flip charge within one d-unit of
/// integrality slack.
struct IndexCheck {
  double lambda = 0;
  int a = 0;
  int d = 0;
  double closed_form = 0;
  double flip_charge = 0;
  double bracket_lo = 0;
  double bracket_hi = 0;
  bool pass = false;
};

struct IndexValidationReport {
  std::vector<IndexCheck> checks;
  bool all_pass = false;
};

/// Runs the oracle-vs-closed-form grid (threaded). Throws ConfigError on an
/// empty grid.
IndexValidationReport validate_indices(
    const std::vector<double>& lambdas, const std::vector<int>& as,
    const std::vector<int>& ds,
    const RviOptions& oracle_opts = {64, 192, 1e-9, 1'000'000, 0.0});

/// Worker count: AOISIM_THREADS if set and positive, else hardware
/// concurrency, at least 1.
int worker_threads();

}  // namespace aoisim
