#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace cspi::lab {

inline constexpr std::string_view kVersion = "0.1.0";

struct RunConfig {
  double beta = 1.0;
  double mu = -0.5;
  double u = 1.0;
  /// Empty lists select the per-command defaults.
  std::vector<int> n_values;
  std::vector<double> s_values;
  std::string scheme = "exact-product";
  int n_max = 64;
  double tol = 1e-12;
  bool high_precision = false;
  int nodes = 128;
  /// Fock truncation for ordering-check.
  int fock_n = 30;
  long samples = 100000;
  std::uint64_t seed = 20240611;
  /// Let Monte Carlo and the HS series run where the contour condition fails.
  bool allow_unsafe_contour = false;
  std::string format = "json";
  std::string path;  // empty: stdout
  /// When false wall_ms is written as 0 so repeated runs compare bytewise.
  bool timing = true;

  /// Throws ConfigInvalid naming the offending field, e.g. "model.beta".
  void validate() const;
};

using SweepValue = std::variant<long, double, std::string>;

struct Row {
  std::vector<std::pair<std::string, SweepValue>> sweep;
  std::optional<double> value;
  std::optional<double> reference;
  std::optional<double> abs_error;
  std::optional<double> rel_error;
  std::optional<double> tail_bound;
  std::optional<double> stat_error;
  bool pass = true;
};

struct Report {
  std::string command;
  RunConfig config;
  std::vector<Row> rows;
  double wall_ms = 0.0;
  bool pass = true;
  std::optional<double> fitted_order;
  /// Module errors with the sweep point they came from.
  std::vector<std::string> errors;
};

bool is_command(std::string_view name);
const std::vector<std::string>& commands();

/// Validates the config, runs the sweep and applies the tolerance gates.
/// Module errors at individual sweep points are recorded in the report and
/// fail that row; they are not rethrown.
Report run(std::string_view command, const RunConfig& config);

std::string render_json(const Report& report);
std::string render_csv(const Report& report);

/// Writes in config.format to config.path (stdout when empty).
void write_report(const Report& report);

}  // namespace cspi::lab
