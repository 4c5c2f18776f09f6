// app.hpp
//
// Run configuration and command dispatch behind the `dphase` executable.
// Configs are flat `key = value` files with dotted sections; command-line
// flags arrive as the same keys and override file values.

#ifndef DPHASE_APP_HPP
#define DPHASE_APP_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dphase/control.hpp"
#include "dphase/convexity.hpp"

namespace dphase {

enum class Command { solve, compare_ops, convexity, control, exponents };

std::string to_string(Command c);
Command parse_command(const std::string& text);

/// Where a nodal field comes from: a constant, a named preset, or a CSV file.
struct FieldSource {
  std::string kind = "constant";
  double value = 0.0;
  std::string preset;
  std::filesystem::path path;
};

/// Names accepted by FieldSource::preset.
std::vector<std::string> field_presets();

GridFunction make_field(const FieldSource& src, const Grid& grid);

struct RunConfig {
  Command command = Command::solve;
  int n = 1;
  int m = 15;
  ExponentMode mode = ExponentMode::strict;
  Exponents exponents;

  std::string weight_kind = "constant";
  double mu0 = 1.0;
  std::optional<double> mu1;
  std::filesystem::path weight_path;

  FieldSource forcing;
  FieldSource field;  // compare-ops input
  std::string init = "zero";

  SolverConfig solver;
  ControlConfig control;
  FieldSource target;                   // f-hat; u_d = psi(f-hat)
  std::filesystem::path desired_path;  // u_d from CSV instead
  FieldSource f0;

  std::string functional = "energy";
  std::optional<double> gamma;
  SamplerConfig sampler;

  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  bool dump_energy_trace = false;
};

using KeyValues = std::map<std::string, std::string>;

/// Every key a config or flag may set.
const std::vector<std::string>& known_keys();

/// Parses `key = value` lines; `#` starts a comment. Throws contract_error
/// naming the line on malformed input, duplicate or unknown keys.
KeyValues parse_key_values(const std::string& text);

/// Validates and types the merged key set. Relative paths resolve against
/// `base`. Errors name the offending key.
RunConfig parse_config(const KeyValues& kv, const std::filesystem::path& base = {});

/// File (optional) plus flag overrides, later entries winning.
RunConfig load_config(const std::optional<std::filesystem::path>& file,
                      const std::vector<std::pair<std::string, std::string>>& overrides);

WeightField make_weight(const RunConfig& cfg, const Grid& grid);

/// Executes the command, writing artifacts under cfg.out. Returns the exit
/// status: 0 success, 1 contract or configuration error, 2 numerical failure.
/// Diagnostics and wall times go to `log`, never into artifacts.
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace dphase

#endif
