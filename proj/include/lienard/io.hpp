#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "lienard/classify.hpp"
#include "lienard/config.hpp"
#include "lienard/problem.hpp"
#include "lienard/synthesis.hpp"
#include "lienard/verify.hpp"

namespace lienard::io {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

/// Optional [config] table of a problem file.
struct ConfigOverrides {
  std::optional<int> grid_size;
  std::optional<double> margin;
  std::optional<double> quad_tol;
  std::optional<int> offset_seeds;
  std::optional<Interval> offset_range;
  std::optional<double> tol_const;
  std::optional<double> residual_tol;
  std::optional<double> merge_rel;
  std::optional<double> a_zero_tol;

  void apply(Config& cfg) const;
};

struct ProblemFile {
  ProblemSpec problem;
  ConfigOverrides overrides;
  std::optional<std::string> spec_hash;  // [provenance] of synthesized files
};

/// TOML text:  n = 4, interval = [lo, hi], f0 = "...", ..., fn = "...".
/// Expression errors are rethrown as ParseError naming the key; structural
/// problems as SpecError.
ProblemFile parse_problem(const std::string& text);
ProblemFile load_problem(const std::filesystem::path& path);
std::string problem_to_toml(const ProblemSpec& problem,
                            const std::optional<std::string>& spec_hash = std::nullopt);

/// TOML text:  n, F, interval, a, b = [b_0 .. b_{n-1}], epsilon, nu.
SynthesisSpec parse_synthesis_spec(const std::string& text);
SynthesisSpec load_synthesis_spec(const std::filesystem::path& path);
std::string synthesis_spec_to_toml(const SynthesisSpec& spec);

Json config_to_json(const Config& cfg);

/// Report object with "schema", "tool_version" and "status": "ok".
Json report_to_json(const SymmetryReport& report);
SymmetryReport report_from_json(const Json& j);

/// Report for the AmbiguousOffset outcome, "status": "ambiguous_offset".
Json ambiguous_to_json(const AmbiguousOffset& e, int n);

Json residual_to_json(const ConditionResidual& r);

/// Columns u, F, g, a, R0 .. Rn on the classification grid.
void write_grid_csv(const std::filesystem::path& path, const SymmetryReport& report);

/// Columns t, u, udot.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
std::string trajectory_csv(const Trajectory& traj);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

/// Shortest text that round-trips the double.
std::string format_double(double v);

}  // namespace lienard::io
