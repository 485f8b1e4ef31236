// phasetop command-line entry point.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phasetop/app.hpp"
#include "phasetop/errors.hpp"

namespace {

using namespace phasetop;

void apply_grid(RunConfig& config, const std::string& grid) {
  if (grid.empty()) return;
  static const std::regex pattern(R"((\d+)[xX](\d+))");
  std::smatch m;
  if (!std::regex_match(grid, m, pattern)) throw ConfigError("--grid must look like LATxLON, e.g. 32x64");
  config.grid.n_lat = std::stoi(m[1]);
  config.grid.n_lon = std::stoi(m[2]);
  for (int n : {config.grid.n_lat, config.grid.n_lon}) {
    if (n < 8 || n % 2 != 0) throw ConfigError("--grid: both sizes must be even and >= 8");
  }
}

struct Common {
  std::string out;
  std::string dump;
  std::string grid;
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

RunConfig load_with_overrides(const std::string& path, const Common& common) {
  RunConfig config = load_config(path);
  if (common.seed) {
    // Re-read with the seed override so nested models pick it up.
    std::ifstream in(path);
    Json doc = Json::parse(in);
    doc["seed"] = *common.seed;
    config = parse_config(doc);
  }
  apply_grid(config, common.grid);
  if (!common.dump.empty()) config.dump_dir = common.dump;
  if (!common.out.empty()) config.report_path = common.out;
  return config;
}

int emit(const CommandResult& result, const std::optional<std::string>& path) {
  const std::string text = render_report(result.report);
  if (path) write_text_file(*path, text);
  else std::cout << text;
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chern and Kane-Mele invariants of time-reversal-invariant band bundles over phase space"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", common.out, "Report path (default: config outputs.report, else stdout)");
    sub->add_option("--grid", common.grid, "Grid size LATxLON, overrides the config");
    sub->add_option("--seed", common.seed, "Seed replacing every model seed");
    sub->add_flag("--timing", common.timing, "Include wall-clock timing (breaks byte determinism)");
  };

  std::string config_path;
  std::vector<std::string> deform_configs;
  int steps = 21;
  int count = 50;
  std::string manifold = "sphere";
  int n_a = 4;
  int cutoff = 2;
  int controls = 2;
  std::vector<int> band_range;
  int group_index = 0;
  std::optional<int> target_c;

  CLI::App* analyze = app.add_subcommand("analyze", "Invariants of every gapped band group of one model");
  analyze->add_option("--config", config_path, "Run config (JSON)")->required();
  analyze->add_option("--dump", common.dump, "Directory for CSV field dumps");
  add_common(analyze);

  CLI::App* suite = app.add_subcommand("random-suite", "Randomised TRI theorem suite with TRI-broken controls");
  suite->add_option("--count", count, "Number of random models");
  suite->add_option("--manifold", manifold, "sphere or torus")->check(CLI::IsMember({"sphere", "torus"}));
  suite->add_option("--na", n_a, "Band count N_A (even)");
  suite->add_option("--cutoff", cutoff, "Frequency cutoff of the random fields");
  suite->add_option("--controls", controls, "Number of TRI-broken controls");
  add_common(suite);

  CLI::App* deform = app.add_subcommand("deform", "Track a band group along a linear TRI path");
  deform->add_option("--config", deform_configs, "Endpoint configs (give twice)")->required()->expected(2);
  deform->add_option("--steps", steps, "Number of path samples");
  deform->add_option("--bands", band_range, "Band group FIRST LAST (default: lowest gapped group)")->expected(2);
  add_common(deform);

  CLI::App* gauge = app.add_subcommand("gauge-demo", "Gauge to the normal form of a target Chern number");
  gauge->add_option("--config", config_path, "Run config (JSON)")->required();
  gauge->add_option("--group", group_index, "Index of the gapped group");
  gauge->add_option("--target-c", target_c, "Target Chern number (default: measured)");
  add_common(gauge);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (analyze->parsed()) {
      const RunConfig config = load_with_overrides(config_path, common);
      return emit(cmd_analyze(config, {common.timing}), config.report_path);
    }
    if (suite->parsed()) {
      SuiteOptions o;
      o.count = count;
      o.manifold = manifold_from_string(manifold);
      o.n_a = n_a;
      o.cutoff = cutoff;
      o.controls = controls;
      o.seed = common.seed.value_or(1);
      o.grid.manifold = o.manifold;
      RunConfig grid_holder;
      apply_grid(grid_holder, common.grid);
      o.grid.n_lat = grid_holder.grid.n_lat;
      o.grid.n_lon = grid_holder.grid.n_lon;
      o.timing = common.timing;
      return emit(cmd_random_suite(o),
                  common.out.empty() ? std::nullopt : std::optional<std::string>(common.out));
    }
    if (deform->parsed()) {
      const RunConfig a = load_with_overrides(deform_configs[0], common);
      const RunConfig b = load_with_overrides(deform_configs[1], common);
      std::optional<std::pair<int, int>> group;
      if (band_range.size() == 2) group = std::make_pair(band_range[0], band_range[1]);
      return emit(cmd_deform(a, b, steps, group),
                  common.out.empty() ? std::nullopt : std::optional<std::string>(common.out));
    }
    if (gauge->parsed()) {
      const RunConfig config = load_with_overrides(config_path, common);
      return emit(cmd_gauge_demo(config, group_index, target_c), config.report_path);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
