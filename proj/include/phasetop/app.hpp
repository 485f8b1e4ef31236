#pragma once

// Run configuration, the four pipelines behind the command line (analyze,
// random-suite, deform, gauge-demo), their JSON reports and field dumps.
//
// Exit codes: 0 success or expected negative result, 2 configuration error,
// 3 numerical failure.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "phasetop/models.hpp"

namespace phasetop {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct RunConfig {
  ModelSpec model;
  GridSpec grid;
  Tolerances tol;
  std::optional<std::string> report_path;
  std::optional<std::string> dump_dir;
  std::optional<std::uint64_t> seed;  // replaces every model seed when set
  /// Band ranges [first, last] to analyse; default is the maximal gapped
  /// decomposition.
  std::optional<std::vector<std::pair<int, int>>> groups;
};

/// Throws ConfigError on schema violations (unknown keys, wrong types, odd
/// or too small grid, non-positive tolerances, bad model parameters).
RunConfig parse_config(const Json& doc);
RunConfig load_config(const std::string& path);
ModelSpec parse_model(const Json& doc, std::optional<std::uint64_t> seed_override = std::nullopt);

Json model_to_json(const ModelSpec& spec);
Json config_to_json(const RunConfig& config);
Json report_to_json(const InvariantReport& report);

/// config.groups measured on the spectrum, or every gapped group.
/// Throws ConfigError for a band range outside the spectrum.
std::vector<BandGroup> select_groups(const RunConfig& config, const Spectrum& spectrum);

struct CommandResult {
  Json report;
  int exit_code = kExitOk;
};

struct AnalyzeOptions {
  bool timing = false;
};

/// All gapped groups of the model, each run through verify_group. A TRI
/// violation is recorded and the invariants are skipped (exit 3). Field
/// dumps go to config.dump_dir when set.
CommandResult cmd_analyze(const RunConfig& config, const AnalyzeOptions& options = {});

struct SuiteOptions {
  int count = 50;
  Manifold manifold = Manifold::Sphere;
  int n_a = 4;
  int cutoff = 2;
  std::uint64_t seed = 1;
  GridSpec grid;
  Tolerances tol;
  int controls = 2;  // TRI-broken controls run as expected failures
  bool timing = false;
};

/// Randomised theorem suite. Exit 3 when any gapped group violates a
/// theorem, any group stays unresolved, or a control fails to fail.
/// Throws ConfigError when count < 1 or N_A is not a positive even number.
CommandResult cmd_random_suite(const SuiteOptions& options);

/// Linear TRI path between two configs for the band group [first, last]
/// (default: the lowest gapped group of the first endpoint).
CommandResult cmd_deform(const RunConfig& a, const RunConfig& b, int steps,
                         std::optional<std::pair<int, int>> group = std::nullopt);

/// Gauge construction for gapped group `group_index` against the normal
/// form of `target_c` (default: measured c). A nonzero obstruction is an
/// expected failure (exit 0, flagged). Throws ConfigError when target_c has
/// the wrong parity.
CommandResult cmd_gauge_demo(const RunConfig& config, int group_index, std::optional<int> target_c = std::nullopt);

/// Structural check of a report document; returns one message per problem.
std::vector<std::string> validate_report(const Json& report);

/// Pretty-printed JSON plus trailing newline.
std::string render_report(const Json& report);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace phasetop
