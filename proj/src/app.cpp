#include "phasetop/app.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "phasetop/errors.hpp"
#include "phasetop/gauge.hpp"
#include "phasetop/parallel.hpp"

namespace phasetop {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// ---------------------------------------------------------------- parsing

void require_object(const Json& doc, const std::string& where) {
  if (!doc.is_object()) throw ConfigError(where + ": expected an object");
}

void allow_keys(const Json& doc, const std::string& where, std::initializer_list<const char*> keys) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double number_or(const Json& doc, const std::string& where, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  const Json& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + "." + key + ": must be finite");
  return x;
}

int int_or(const Json& doc, const std::string& where, const char* key, int fallback) {
  if (!doc.contains(key)) return fallback;
  const Json& v = doc.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

std::uint64_t seed_or(const Json& doc, const std::string& where, const char* key, std::uint64_t fallback) {
  if (!doc.contains(key)) return fallback;
  const Json& v = doc.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError(where + "." + key + ": expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string string_at(const Json& doc, const std::string& where, const char* key) {
  if (!doc.contains(key)) throw ConfigError(where + ": missing '" + std::string(key) + "'");
  const Json& v = doc.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

Manifold parse_manifold(const std::string& name, const std::string& where) {
  try {
    return manifold_from_string(name);
  } catch (const Error&) {
    throw ConfigError(where + ": manifold must be \"sphere\" or \"torus\", got \"" + name + "\"");
  }
}

ModelSpec parse_model_node(const Json& doc, const std::string& where, std::optional<std::uint64_t> seed) {
  require_object(doc, where);
  const std::string type = string_at(doc, where, "type");
  ModelSpec spec;
  if (type == "RotorSpin") {
    allow_keys(doc, where, {"type", "j", "epsilon", "seed"});
    if (!doc.contains("j")) throw ConfigError(where + ": RotorSpin needs 'j'");
    RotorSpinSpec s;
    s.j = number_or(doc, where, "j", 0.5);
    s.epsilon = number_or(doc, where, "epsilon", 0.0);
    s.seed = seed.value_or(seed_or(doc, where, "seed", s.seed));
    spec.variant = s;
  } else if (type == "KramersPairSphere") {
    allow_keys(doc, where, {"type", "epsilon", "seed"});
    KramersPairSphereSpec s;
    s.epsilon = number_or(doc, where, "epsilon", 0.0);
    s.seed = seed.value_or(seed_or(doc, where, "seed", s.seed));
    spec.variant = s;
  } else if (type == "TorusDoubledChern") {
    allow_keys(doc, where, {"type", "m", "epsilon", "seed"});
    TorusDoubledChernSpec s;
    s.m = number_or(doc, where, "m", 1.0);
    s.epsilon = number_or(doc, where, "epsilon", 0.0);
    s.seed = seed.value_or(seed_or(doc, where, "seed", s.seed));
    spec.variant = s;
  } else if (type == "RandomTRI") {
    allow_keys(doc, where, {"type", "manifold", "n_a", "cutoff", "seed"});
    RandomTriSpec s;
    s.manifold = parse_manifold(string_at(doc, where, "manifold"), where);
    s.n_a = int_or(doc, where, "n_a", s.n_a);
    s.cutoff = int_or(doc, where, "cutoff", s.cutoff);
    s.seed = seed.value_or(seed_or(doc, where, "seed", s.seed));
    spec.variant = s;
  } else if (type == "TRIBrokenControl") {
    allow_keys(doc, where, {"type", "base", "breaking_strength"});
    if (!doc.contains("base")) throw ConfigError(where + ": TRIBrokenControl needs 'base'");
    TriBrokenControlSpec s;
    s.base = std::make_shared<const ModelSpec>(parse_model_node(doc.at("base"), where + ".base", seed));
    s.breaking_strength = number_or(doc, where, "breaking_strength", s.breaking_strength);
    if (!(s.breaking_strength > 0.0)) throw ConfigError(where + ".breaking_strength: must be positive");
    spec.variant = s;
  } else {
    throw ConfigError(where + ": unknown model type \"" + type + "\"");
  }
  return spec;
}

// ---------------------------------------------------------------- output helpers

Json optional_int(const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); }
Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json loop_to_json(const TransitionLoop& loop) {
  Json out = Json::array();
  for (const auto& m : loop.samples) out.push_back(matrix_to_json(m));
  return out;
}

Json header(const char* command) {
  Json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["artifact"] = {{"name", "phasetop"}, {"version", kArtifactVersion}};
  doc["command"] = command;
  return doc;
}

Json error_json(const std::exception& e) {
  std::string type = "Error";
  if (dynamic_cast<const ResolutionError*>(&e)) type = "ResolutionError";
  else if (dynamic_cast<const DegenerateConfigurationError*>(&e)) type = "DegenerateConfigurationError";
  else if (dynamic_cast<const SingularityError*>(&e)) type = "SingularityError";
  else if (dynamic_cast<const BranchError*>(&e)) type = "BranchError";
  else if (dynamic_cast<const ExtensionError*>(&e)) type = "ExtensionError";
  else if (dynamic_cast<const TrackingError*>(&e)) type = "TrackingError";
  else if (dynamic_cast<const NumericalError*>(&e)) type = "NumericalError";
  else if (dynamic_cast<const DomainError*>(&e)) type = "DomainError";
  else if (dynamic_cast<const ConfigError*>(&e)) type = "ConfigError";
  return {{"type", type}, {"message", e.what()}};
}

bool curvature_even(const InvariantReport& r) {
  return r.residuals.curvature_evenness <= r.residuals.curvature_evenness_tol;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_dumps(const std::string& dir, const InvariantReport& r) {
  std::filesystem::create_directories(dir);
  const std::string stem = dir + "/group" + std::to_string(r.group_id) + "_";
  if (r.chern_grid) {
    std::ostringstream csv;
    csv << "lat_index,lon_index,flux\n";
    const auto& plaquettes = r.chern_grid->plaquettes();
    for (std::size_t p = 0; p < r.curvature.flux.size(); ++p) {
      csv << plaquettes[p].row << ',' << plaquettes[p].col << ',' << format_double(r.curvature.flux[p]) << '\n';
    }
    write_text_file(stem + "curvature.csv", csv.str());
  }
  if (r.km_grid) {
    std::ostringstream csv;
    csv << "lat_index,lon_index,pf_modulus\n";
    for (const auto& [v, modulus] : r.pf_modulus) {
      csv << r.km_grid->row_of(v) << ',' << r.km_grid->col_of(v) << ',' << format_double(modulus) << '\n';
    }
    write_text_file(stem + "pf_modulus.csv", csv.str());

    std::ostringstream census;
    census << "plaquette,index\n";
    for (const auto& z : r.census.zeros) census << z.plaquette << ',' << z.index << '\n';
    write_text_file(stem + "census.csv", census.str());
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

// ---------------------------------------------------------------- config

ModelSpec parse_model(const Json& doc, std::optional<std::uint64_t> seed_override) {
  ModelSpec spec = parse_model_node(doc, "model", seed_override);
  try {
    (void)build(spec);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  return spec;
}

RunConfig parse_config(const Json& doc) {
  require_object(doc, "config");
  // "manifold" and null groups/seed appear in the config echoed by reports.
  allow_keys(doc, "config", {"schema_version", "model", "manifold", "grid", "groups", "tolerances", "outputs", "seed"});
  if (doc.contains("schema_version")) {
    const Json& v = doc.at("schema_version");
    if (!v.is_number_integer() || v.get<int>() != kReportSchemaVersion) {
      throw ConfigError("config.schema_version: unsupported value (expected " +
                        std::to_string(kReportSchemaVersion) + ")");
    }
  }
  RunConfig config;
  if (doc.contains("seed") && !doc.at("seed").is_null()) config.seed = seed_or(doc, "config", "seed", 0);
  if (!doc.contains("model")) throw ConfigError("config: missing 'model'");
  config.model = parse_model(doc.at("model"), config.seed);
  config.grid.manifold = config.model.manifold();
  if (doc.contains("manifold")) {
    const Json& m = doc.at("manifold");
    if (!m.is_string() || m.get<std::string>() != to_string(config.grid.manifold)) {
      throw ConfigError("config.manifold: must be \"" + to_string(config.grid.manifold) + "\" for this model");
    }
  }

  if (doc.contains("grid")) {
    const Json& g = doc.at("grid");
    require_object(g, "grid");
    allow_keys(g, "grid", {"n_lat", "n_lon"});
    config.grid.n_lat = int_or(g, "grid", "n_lat", config.grid.n_lat);
    config.grid.n_lon = int_or(g, "grid", "n_lon", config.grid.n_lon);
  }
  for (int n : {config.grid.n_lat, config.grid.n_lon}) {
    if (n < 8 || n % 2 != 0) throw ConfigError("grid: n_lat and n_lon must be even and >= 8");
  }

  if (doc.contains("groups") && !doc.at("groups").is_null()) {
    const Json& g = doc.at("groups");
    if (!g.is_array()) throw ConfigError("groups: expected an array of [first, last] pairs");
    config.groups.emplace();
    for (const auto& pair : g) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number_integer()) {
        throw ConfigError("groups: every entry must be [first, last] with integer band indices");
      }
      config.groups->emplace_back(pair[0].get<int>(), pair[1].get<int>());
    }
  }

  if (doc.contains("tolerances")) {
    const Json& t = doc.at("tolerances");
    require_object(t, "tolerances");
    allow_keys(t, "tolerances",
               {"tri_tol", "gap_floor", "zero_floor", "evenness_tol", "evenness_rel", "max_refinements", "km_charts",
                "adaptive_passes"});
    Tolerances& tol = config.tol;
    tol.tri_tol = number_or(t, "tolerances", "tri_tol", tol.tri_tol);
    tol.gap_floor = number_or(t, "tolerances", "gap_floor", tol.gap_floor);
    tol.zero_floor = number_or(t, "tolerances", "zero_floor", tol.zero_floor);
    tol.evenness_abs = number_or(t, "tolerances", "evenness_tol", tol.evenness_abs);
    tol.evenness_rel = number_or(t, "tolerances", "evenness_rel", tol.evenness_rel);
    tol.max_refinements = int_or(t, "tolerances", "max_refinements", tol.max_refinements);
    tol.km_charts = int_or(t, "tolerances", "km_charts", tol.km_charts);
    tol.adaptive_passes = int_or(t, "tolerances", "adaptive_passes", tol.adaptive_passes);
    for (double x : {tol.tri_tol, tol.gap_floor, tol.zero_floor, tol.evenness_abs}) {
      if (!(x > 0.0)) throw ConfigError("tolerances: tri_tol, gap_floor, zero_floor and evenness_tol must be positive");
    }
    if (tol.evenness_rel < 0.0) throw ConfigError("tolerances.evenness_rel: must be non-negative");
    if (tol.max_refinements < 0 || tol.km_charts < 1 || tol.adaptive_passes < 0) {
      throw ConfigError("tolerances: max_refinements and adaptive_passes must be >= 0, km_charts >= 1");
    }
  }

  if (doc.contains("outputs")) {
    const Json& o = doc.at("outputs");
    require_object(o, "outputs");
    allow_keys(o, "outputs", {"report", "dump_dir"});
    if (o.contains("report")) config.report_path = string_at(o, "outputs", "report");
    if (o.contains("dump_dir")) config.dump_dir = string_at(o, "outputs", "dump_dir");
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

Json model_to_json(const ModelSpec& spec) {
  return std::visit(
      overloaded{
          [](const RotorSpinSpec& s) {
            return Json{{"type", "RotorSpin"}, {"j", s.j}, {"epsilon", s.epsilon}, {"seed", s.seed}};
          },
          [](const KramersPairSphereSpec& s) {
            return Json{{"type", "KramersPairSphere"}, {"epsilon", s.epsilon}, {"seed", s.seed}};
          },
          [](const TorusDoubledChernSpec& s) {
            return Json{{"type", "TorusDoubledChern"}, {"m", s.m}, {"epsilon", s.epsilon}, {"seed", s.seed}};
          },
          [](const RandomTriSpec& s) {
            return Json{{"type", "RandomTRI"},
                        {"manifold", to_string(s.manifold)},
                        {"n_a", s.n_a},
                        {"cutoff", s.cutoff},
                        {"seed", s.seed}};
          },
          [](const TriBrokenControlSpec& s) {
            return Json{{"type", "TRIBrokenControl"},
                        {"base", s.base ? model_to_json(*s.base) : Json(nullptr)},
                        {"breaking_strength", s.breaking_strength}};
          }},
      spec.variant);
}

Json config_to_json(const RunConfig& config) {
  Json doc;
  doc["model"] = model_to_json(config.model);
  doc["manifold"] = to_string(config.grid.manifold);
  doc["grid"] = {{"n_lat", config.grid.n_lat}, {"n_lon", config.grid.n_lon}};
  if (config.groups) {
    Json groups = Json::array();
    for (const auto& [first, last] : *config.groups) groups.push_back({first, last});
    doc["groups"] = std::move(groups);
  } else {
    doc["groups"] = nullptr;
  }
  doc["tolerances"] = {{"tri_tol", config.tol.tri_tol},
                       {"gap_floor", config.tol.gap_floor},
                       {"zero_floor", config.tol.zero_floor},
                       {"evenness_tol", config.tol.evenness_abs},
                       {"evenness_rel", config.tol.evenness_rel},
                       {"max_refinements", config.tol.max_refinements},
                       {"km_charts", config.tol.km_charts},
                       {"adaptive_passes", config.tol.adaptive_passes}};
  doc["seed"] = config.seed ? Json(*config.seed) : Json(nullptr);
  return doc;
}

Json report_to_json(const InvariantReport& r) {
  Json census = Json::array();
  for (const auto& z : r.census.zeros) census.push_back({{"plaquette", z.plaquette}, {"index", z.index}});
  const auto& res = r.residuals;
  const bool even = curvature_even(r);
  Json doc;
  doc["group_id"] = r.group_id;
  doc["bands"] = {r.first, r.last};
  doc["rank"] = r.rank;
  doc["min_gap"] = finite_or_null(r.min_gap);
  doc["chern"] = {{"plaquette", r.c_plaquette}, {"winding", r.c_winding}, {"consistent", r.consistent}};
  doc["kane_mele"] = {{"status", r.km_status},
                      {"k_boundary", optional_int(r.k_boundary)},
                      {"k_census", optional_int(r.k_census)},
                      {"census", census},
                      {"census_same_sign", r.census.same_sign()},
                      {"diagnostic", r.km_diagnostic}};
  doc["verdicts"] = {{"parity_ok", r.parity_ok},
                     {"km_relation_ok", r.km_relation_ok},
                     {"curvature_even", even},
                     {"theorems_ok", r.theorems_ok() && even}};
  doc["residuals"] = {{"tri", res.tri},
                      {"frame_orthonormality", res.frame_orthonormality},
                      {"frame_span", res.frame_span},
                      {"frame_continuity", res.frame_continuity},
                      {"frame_seam", res.frame_seam},
                      {"transition_unitarity", res.transition_unitarity},
                      {"transition_symmetry", res.transition_symmetry},
                      {"m_skew", res.m_skew},
                      {"pf_consistency", res.pf_consistency},
                      {"pfaffian_identity", optional_number(res.pfaffian_identity)},
                      {"curvature_evenness", res.curvature_evenness},
                      {"curvature_evenness_tol", res.curvature_evenness_tol},
                      {"kramers", optional_number(res.kramers)}};
  doc["grid"] = {{"n_lat", r.grid.n_lat},
                 {"n_lon", r.grid.n_lon},
                 {"refinements", r.grid.refinements},
                 {"adaptive_passes", r.grid.adaptive_passes},
                 {"km_chart", r.grid.km_chart}};
  return doc;
}

// ---------------------------------------------------------------- analyze

std::vector<BandGroup> select_groups(const RunConfig& config, const Spectrum& spectrum) {
  if (!config.groups) return find_gapped_groups(spectrum, config.tol.gap_floor);
  std::vector<BandGroup> out;
  for (const auto& [first, last] : *config.groups) {
    if (first < 0 || last < first || last >= spectrum.dim()) {
      throw ConfigError("groups: band range [" + std::to_string(first) + ", " + std::to_string(last) +
                        "] outside the spectrum");
    }
    out.push_back(band_group(spectrum, first, last));
  }
  return out;
}


CommandResult cmd_analyze(const RunConfig& config, const AnalyzeOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  CommandResult result;
  Json& doc = result.report;
  doc = header("analyze");
  doc["config"] = config_to_json(config);

  const HamiltonianField h = build(config.model);
  const Grid grid(config.grid.manifold, config.grid.n_lat, config.grid.n_lon);
  const TriCheck tri = check_tri(h, grid, config.tol.tri_tol);
  doc["tri"] = {{"residual", tri.max_residual}, {"tolerance", config.tol.tri_tol}, {"passed", tri.pass}};

  Json groups = Json::array();
  int sum_c = 0;
  bool all_ok = true;
  std::string status = "ok";
  std::string diagnostic;

  if (!tri.pass) {
    status = "tri_violation";
    diagnostic = "field is not time-reversal invariant (residual " + format_double(tri.max_residual) +
                 "); invariants skipped";
    all_ok = false;
    result.exit_code = kExitNumerical;
  } else {
    const Spectrum spectrum = spectrum_on_grid(h, grid);
    const auto found = select_groups(config, spectrum);
    if (found.empty()) {
      status = "ungapped";
      diagnostic = "no internal spectral gap above gap_floor";
    }
    for (std::size_t g = 0; g < found.size(); ++g) {
      try {
        InvariantReport r = verify_group(h, found[g].first, found[g].last, config.grid, config.tol);
        r.group_id = static_cast<int>(g);
        sum_c += r.c_plaquette;
        Json entry = report_to_json(r);
        all_ok = all_ok && entry["verdicts"]["theorems_ok"].get<bool>();
        if (!r.consistent) {
          status = "numerical_failure";
          diagnostic = "plaquette and winding Chern numbers disagree after refinement";
          result.exit_code = kExitNumerical;
        } else if (r.km_status == "degenerate") {
          status = "numerical_failure";
          diagnostic = "Kane-Mele index undefined for group " + std::to_string(g) + ": " + r.km_diagnostic;
          result.exit_code = kExitNumerical;
        }
        if (config.dump_dir) write_dumps(*config.dump_dir, r);
        groups.push_back(std::move(entry));
      } catch (const Error& e) {
        all_ok = false;
        status = "numerical_failure";
        diagnostic = e.what();
        result.exit_code = kExitNumerical;
        groups.push_back({{"group_id", static_cast<int>(g)},
                          {"bands", {found[g].first, found[g].last}},
                          {"rank", found[g].rank()},
                          {"error", error_json(e)}});
      }
    }
  }

  doc["status"] = status;
  doc["diagnostic"] = diagnostic;
  doc["groups"] = std::move(groups);
  doc["global"] = {{"sum_c", sum_c},
                   {"sum_c_zero", sum_c == 0},
                   {"tri_residual", tri.max_residual},
                   {"all_theorems_ok", all_ok && status == "ok"}};
  if (options.timing) doc["timing"] = {{"seconds", seconds_since(start)}, {"workers", worker_count()}};
  return result;
}

// ---------------------------------------------------------------- random suite

namespace {

struct SuiteModel {
  Json entry;
  std::vector<std::string> violations;
  int groups = 0;
  int combined = 0;  // unions of adjacent maximal groups
  int parity_checked = 0, parity_ok = 0;
  int even_rank = 0, even_c = 0;
  int km_checked = 0, km_ok = 0;
  int consistent = 0;
  int even_curvature = 0;
  int unresolved = 0;
  double max_symmetry = 0.0;
  double max_evenness_ratio = 0.0;
};

SuiteModel run_suite_model(const SuiteOptions& o, int index) {
  SuiteModel out;
  RandomTriSpec spec;
  spec.manifold = o.manifold;
  spec.n_a = o.n_a;
  spec.cutoff = o.cutoff;
  spec.seed = splitmix64(o.seed + static_cast<std::uint64_t>(index));
  const ModelSpec model{spec};
  const HamiltonianField h = build(model);
  const GridSpec gspec{o.manifold, o.grid.n_lat, o.grid.n_lon};
  const Grid grid(o.manifold, gspec.n_lat, gspec.n_lon);
  const TriCheck tri = check_tri(h, grid, o.tol.tri_tol);
  const auto label = "model " + std::to_string(index);

  out.entry = {{"index", index}, {"seed", spec.seed}, {"tri_residual", tri.max_residual}};
  if (!tri.pass) {
    out.violations.push_back(label + ": randomized field failed the TRI check");
    out.entry["groups"] = Json::array();
    return out;
  }
  const auto found = find_gapped_groups(spectrum_on_grid(h, grid), o.tol.gap_floor);
  // On the sphere generic bands are simple, so the maximal groups have odd
  // rank; adjacent pairs of them are gapped too and give the KM checks.
  std::vector<std::pair<BandGroup, bool>> checked;
  for (const auto& g : found) checked.emplace_back(g, false);
  if (o.manifold == Manifold::Sphere) {
    for (std::size_t i = 0; i + 1 < found.size(); i += 2) {
      BandGroup pair{found[i].first, found[i + 1].last};
      if (pair.rank() % 2 == 0) checked.emplace_back(pair, true);
    }
  }
  Json groups = Json::array();
  for (const auto& [g, combined] : checked) {
    ++out.groups;
    if (combined) ++out.combined;
    Json ge = {{"bands", {g.first, g.last}}, {"rank", g.rank()}, {"combined", combined}};
    try {
      const InvariantReport r = verify_group(h, g.first, g.last, gspec, o.tol);
      const std::string where = label + " bands [" + std::to_string(g.first) + "," + std::to_string(g.last) + "]";
      const bool even = curvature_even(r);
      ge["c_plaquette"] = r.c_plaquette;
      ge["c_winding"] = r.c_winding;
      ge["km_status"] = r.km_status;
      ge["k_boundary"] = optional_int(r.k_boundary);
      ge["k_census"] = optional_int(r.k_census);
      ge["parity_ok"] = r.parity_ok;
      ge["km_relation_ok"] = r.km_relation_ok;
      ge["curvature_even"] = even;
      ge["transition_symmetry"] = r.residuals.transition_symmetry;
      ge["refinements"] = r.grid.refinements;

      if (r.consistent) ++out.consistent;
      else out.violations.push_back(where + ": plaquette and winding Chern numbers differ");
      if (o.manifold == Manifold::Sphere) {
        ++out.parity_checked;
        if (r.parity_ok) ++out.parity_ok;
        else out.violations.push_back(where + ": parity of c differs from parity of rank");
      } else {
        if (r.rank % 2 == 0) ++out.even_rank;
        else out.violations.push_back(where + ": odd-rank gapped group on the torus");
        if (r.c_plaquette % 2 == 0) ++out.even_c;
        else out.violations.push_back(where + ": odd Chern number on the torus");
      }
      if (r.rank % 2 == 0) {
        ++out.km_checked;
        if (r.km_relation_ok) ++out.km_ok;
        else out.violations.push_back(where + ": k = c/2 not confirmed (" + r.km_status + ")");
      }
      if (even) ++out.even_curvature;
      else out.violations.push_back(where + ": curvature not TR-even within tolerance");
      out.max_symmetry = std::max(out.max_symmetry, r.residuals.transition_symmetry);
      out.max_evenness_ratio = std::max(
          out.max_evenness_ratio, r.residuals.curvature_evenness / r.residuals.curvature_evenness_tol);
    } catch (const Error& e) {
      ++out.unresolved;
      ge["error"] = error_json(e);
      out.violations.push_back(label + ": " + e.what());
    }
    groups.push_back(std::move(ge));
  }
  out.entry["groups"] = std::move(groups);
  return out;
}

Json run_control(const SuiteOptions& o, int index, bool& observed) {
  RandomTriSpec base;
  base.manifold = o.manifold;
  base.n_a = o.n_a;
  base.cutoff = o.cutoff;
  base.seed = splitmix64(o.seed + static_cast<std::uint64_t>(index));
  TriBrokenControlSpec control;
  control.base = std::make_shared<const ModelSpec>(ModelSpec{base});
  control.breaking_strength = 0.5;
  const ModelSpec model{control};
  const HamiltonianField h = build(model);
  const Grid grid(o.manifold, o.grid.n_lat, o.grid.n_lon);
  const TriCheck tri = check_tri(h, grid, o.tol.tri_tol);

  Json entry = {{"model", model_to_json(model)}, {"tri_residual", tri.max_residual}, {"tri_failed", !tri.pass}};
  bool evenness_failed = false;
  const Spectrum spectrum = spectrum_on_grid(h, grid);
  const auto found = find_gapped_groups(spectrum, o.tol.gap_floor);
  if (found.empty()) {
    entry["curvature_evenness"] = nullptr;
    entry["evenness_failed"] = nullptr;
  } else {
    try {
      const CurvatureField f = chern_plaquette(spectrum, found.front(), grid);
      const double evenness = curvature_tr_evenness(f, grid);
      evenness_failed = evenness > o.tol.evenness_tol(f);
      entry["curvature_evenness"] = evenness;
      entry["evenness_failed"] = evenness_failed;
    } catch (const Error& e) {
      entry["curvature_evenness"] = nullptr;
      entry["evenness_failed"] = nullptr;
      entry["error"] = error_json(e);
    }
  }
  observed = !tri.pass && (found.empty() || evenness_failed);
  entry["expected_failure_observed"] = observed;
  return entry;
}

}  // namespace

CommandResult cmd_random_suite(const SuiteOptions& o) {
  if (o.count < 1) throw ConfigError("random-suite: count must be at least 1");
  if (o.n_a < 2 || o.n_a % 2 != 0) throw ConfigError("random-suite: N_A must be a positive even number");
  if (o.cutoff < 0) throw ConfigError("random-suite: cutoff must be non-negative");
  if (o.controls < 0) throw ConfigError("random-suite: controls must be non-negative");
  const auto start = std::chrono::steady_clock::now();

  std::vector<SuiteModel> models(static_cast<std::size_t>(o.count));
  parallel_for(models.size(), [&](std::size_t i) { models[i] = run_suite_model(o, static_cast<int>(i)); });

  CommandResult result;
  Json& doc = result.report;
  doc = header("random-suite");
  doc["config"] = {{"count", o.count},
                   {"manifold", to_string(o.manifold)},
                   {"n_a", o.n_a},
                   {"cutoff", o.cutoff},
                   {"seed", o.seed},
                   {"grid", {{"n_lat", o.grid.n_lat}, {"n_lon", o.grid.n_lon}}},
                   {"controls", o.controls}};

  SuiteModel total;
  int gapped_models = 0;
  Json entries = Json::array();
  Json violations = Json::array();
  for (auto& m : models) {
    if (m.groups > 0) ++gapped_models;
    total.groups += m.groups;
    total.combined += m.combined;
    total.parity_checked += m.parity_checked;
    total.parity_ok += m.parity_ok;
    total.even_rank += m.even_rank;
    total.even_c += m.even_c;
    total.km_checked += m.km_checked;
    total.km_ok += m.km_ok;
    total.consistent += m.consistent;
    total.even_curvature += m.even_curvature;
    total.unresolved += m.unresolved;
    total.max_symmetry = std::max(total.max_symmetry, m.max_symmetry);
    total.max_evenness_ratio = std::max(total.max_evenness_ratio, m.max_evenness_ratio);
    for (auto& v : m.violations) violations.push_back(v);
    entries.push_back(std::move(m.entry));
  }

  Json controls = Json::array();
  int controls_observed = 0;
  for (int i = 0; i < o.controls; ++i) {
    bool observed = false;
    controls.push_back(run_control(o, i, observed));
    if (observed) ++controls_observed;
    else violations.push_back("control " + std::to_string(i) + ": TRI-broken control was not rejected");
  }

  doc["summary"] = {{"models", o.count},
                    {"gapped_models", gapped_models},
                    {"gapped_groups", total.groups},
                    {"combined_groups", total.combined},
                    {"cross_method_consistent", total.consistent},
                    {"parity_checked", total.parity_checked},
                    {"parity_ok", total.parity_ok},
                    {"even_rank", total.even_rank},
                    {"even_c", total.even_c},
                    {"km_checked", total.km_checked},
                    {"km_relation_ok", total.km_ok},
                    {"curvature_even", total.even_curvature},
                    {"unresolved", total.unresolved},
                    {"max_transition_symmetry_residual", total.max_symmetry},
                    {"max_curvature_evenness_ratio", total.max_evenness_ratio},
                    {"controls", o.controls},
                    {"controls_rejected", controls_observed}};
  const bool passed = violations.empty();
  doc["passed"] = passed;
  doc["violations"] = std::move(violations);
  doc["models"] = std::move(entries);
  doc["controls"] = std::move(controls);
  if (o.timing) doc["timing"] = {{"seconds", seconds_since(start)}, {"workers", worker_count()}};
  result.exit_code = passed ? kExitOk : kExitNumerical;
  return result;
}

// ---------------------------------------------------------------- deform

CommandResult cmd_deform(const RunConfig& a, const RunConfig& b, int steps, std::optional<std::pair<int, int>> group) {
  if (steps < 2) throw ConfigError("deform: steps must be at least 2");
  const HamiltonianField h0 = build(a.model);
  const HamiltonianField h1 = build(b.model);
  if (h0.dim != h1.dim || h0.manifold != h1.manifold || max_abs(h0.tr.matrix() - h1.tr.matrix()) > 1e-12) {
    throw ConfigError("deform: endpoints must share band count, manifold and time-reversal matrix");
  }

  CommandResult result;
  Json& doc = result.report;
  doc = header("deform");
  doc["endpoints"] = {config_to_json(a), config_to_json(b)};
  doc["steps"] = steps;

  if (!group) {
    const Grid grid(a.grid.manifold, a.grid.n_lat, a.grid.n_lon);
    const auto found = find_gapped_groups(spectrum_on_grid(h0, grid), a.tol.gap_floor);
    if (!found.empty()) group = std::make_pair(found.front().first, found.front().last);
  }
  if (!group) {
    doc["group"] = nullptr;
    doc["status"] = "tracking_error";
    doc["diagnostic"] = "first endpoint has no gapped band group";
    doc["verdict"] = nullptr;
    doc["samples"] = Json::array();
    result.exit_code = kExitNumerical;
    return result;
  }
  if (group->first < 0 || group->second < group->first || group->second >= h0.dim) {
    throw ConfigError("deform: band group outside the spectrum");
  }
  doc["group"] = {group->first, group->second};
  try {
    const TriPath path = tri_path(h0, h1, group->first, group->second, steps, a.grid, a.tol);
    Json samples = Json::array();
    for (const auto& s : path.samples) {
      samples.push_back({{"s", s.s}, {"gap", s.gap}, {"status", s.status}, {"chern", optional_int(s.chern)}});
    }
    doc["status"] = "ok";
    doc["diagnostic"] = "";
    doc["verdict"] = path.verdict;
    doc["bracket"] = path.bracket ? Json{path.bracket->first, path.bracket->second} : Json(nullptr);
    doc["endpoint_chern"] = {optional_int(path.samples.front().chern), optional_int(path.samples.back().chern)};
    doc["samples"] = std::move(samples);
    if (path.verdict == "UNRESOLVED") result.exit_code = kExitNumerical;
  } catch (const TrackingError& e) {
    doc["status"] = "tracking_error";
    doc["diagnostic"] = e.what();
    doc["verdict"] = nullptr;
    doc["samples"] = Json::array();
    result.exit_code = kExitNumerical;
  }
  return result;
}

// ---------------------------------------------------------------- gauge demo

namespace {

// One gauge-demo attempt on a fixed grid. Throws ResolutionError or
// ExtensionError when the grid is too coarse.
void gauge_attempt(Json& doc, int& exit_code, const HamiltonianField& h, const Grid& start, const BandGroup& wanted,
                   std::optional<int> target_c, const Tolerances& tol) {
  const AdaptedGrid adapted = adapt_grid(h, wanted.first, wanted.last, start, tol);
  const Grid& grid = adapted.grid;
  const Spectrum& spectrum = adapted.spectrum;
  const BandGroup group = band_group(spectrum, wanted.first, wanted.last);
  const int rank = group.rank();
  const Frame frame = smooth_frame(spectrum, group, grid);
  doc["grid"] = {{"n_lat", grid.n_lat()}, {"n_lon", grid.n_lon()}, {"adaptive_passes", adapted.passes}};

  if (grid.manifold() == Manifold::Sphere) {
    const TransitionLoop u = transition_loop_sphere(frame, grid, h.tr);
    const int measured = chern_winding_sphere(u);
    const int target = target_c.value_or(measured);
    if (((target - rank) % 2) != 0) {
      throw ConfigError("gauge-demo: target c = " + std::to_string(target) + " has the wrong parity for rank " +
                        std::to_string(rank));
    }
    const TransitionLoop v = normal_form_loop({target, rank, grid.n_lon(), grid.lon_nodes()});
    const GaugeLoop w = solve_equator_gauge(u, v);
    const int obstruction = winding_obstruction(w);
    doc["measured_c"] = measured;
    doc["target_c"] = target;
    doc["w_residuals"] = {{"at_pi", w.residual_at_pi},
                          {"at_2pi", w.residual_at_2pi},
                          {"relation", w.relation_residual},
                          {"waypoints", w.waypoints}};
    doc["obstruction"] = obstruction;
    doc["expected_failure"] = obstruction != 0;
    Json ext = {{"attempted", obstruction == 0}, {"success", false}};
    if (obstruction == 0) {
      const DiskExtension disk = extend_to_disk(w, grid);
      const Frame regauged = apply_gauge(frame, disk.values);
      const TransitionLoop fixed = transition_loop_sphere(regauged, grid, h.tr);
      double mismatch = 0.0;
      for (std::size_t j = 0; j < fixed.size(); ++j) {
        mismatch = std::max(mismatch, max_abs(fixed.samples[j] - v.samples[j]));
      }
      ext["sweeps"] = disk.sweeps;
      ext["max_step"] = disk.max_step;
      ext["unitarity"] = disk.unitarity;
      ext["boundary_mismatch"] = disk.boundary_mismatch;
      ext["jitter_retries"] = disk.jitter_retries;
      ext["regauged_mismatch"] = mismatch;
      ext["success"] = mismatch <= 1e-6;
    }
    const bool extended = ext["success"].get<bool>();
    doc["extension"] = std::move(ext);
    if (obstruction != 0 && target == measured) {
      doc["status"] = "numerical_failure";
      doc["diagnostic"] = "nonzero obstruction for the measured Chern number";
      exit_code = kExitNumerical;
    } else if (obstruction == 0 && !extended) {
      doc["status"] = "extension_failure";
      doc["diagnostic"] = "regauged transition loop does not match the normal form";
      exit_code = kExitNumerical;
    } else {
      doc["status"] = "ok";
      doc["diagnostic"] = obstruction != 0 ? "requested c differs from measured c; no extension exists" : "";
    }
    doc["loops"] = {{"u", loop_to_json(u)}, {"v", loop_to_json(v)}};
    return;
  }

  const auto [plus, minus] = transition_loops_torus(frame, grid, h.tr);
  const int measured = chern_winding_torus(plus, minus);
  const int target = target_c.value_or(measured);
  if (target % 2 != 0) throw ConfigError("gauge-demo: torus target c must be even");
  const SkewNormalForm snf = skew_normal_form(plus, minus, target);
  const int obstruction = snf.extension_obstruction();
  doc["measured_c"] = measured;
  doc["target_c"] = target;
  doc["skew_normal_form"] = {{"congruence_residual", snf.congruence_residual},
                             {"wn_det_u", {snf.wn_det_u_plus, snf.wn_det_u_minus}},
                             {"wn_det_v", {snf.wn_det_v_plus, snf.wn_det_v_minus}},
                             {"wn_det_w", {snf.wn_det_w_plus, snf.wn_det_w_minus}},
                             {"bookkeeping_ok", snf.bookkeeping_ok}};
  doc["obstruction"] = obstruction;
  doc["expected_failure"] = obstruction != 0;
  const bool sound = snf.congruence_residual <= 1e-8 && snf.bookkeeping_ok;
  if (!sound || (obstruction != 0 && target == measured)) {
    doc["status"] = "numerical_failure";
    doc["diagnostic"] = "skew normal form residual or winding bookkeeping failed";
    exit_code = kExitNumerical;
  } else {
    doc["status"] = "ok";
    doc["diagnostic"] = obstruction != 0 ? "requested c differs from measured c; no extension exists" : "";
  }
  doc["loops"] = {{"u_plus", loop_to_json(plus)},
                  {"u_minus", loop_to_json(minus)},
                  {"v_plus", loop_to_json(snf.target_plus)},
                  {"v_minus", loop_to_json(snf.target_minus)}};
}

}  // namespace

CommandResult cmd_gauge_demo(const RunConfig& config, int group_index, std::optional<int> target_c) {
  CommandResult result;
  Json& doc = result.report;
  doc = header("gauge-demo");
  doc["config"] = config_to_json(config);

  const HamiltonianField h = build(config.model);
  Grid grid(config.grid.manifold, config.grid.n_lat, config.grid.n_lon);
  const TriCheck tri = check_tri(h, grid, config.tol.tri_tol);
  doc["tri"] = {{"residual", tri.max_residual}, {"tolerance", config.tol.tri_tol}, {"passed", tri.pass}};
  if (!tri.pass) {
    doc["status"] = "tri_violation";
    doc["diagnostic"] = "field is not time-reversal invariant; no transition loop exists";
    result.exit_code = kExitNumerical;
    return result;
  }
  const auto groups = select_groups(config, spectrum_on_grid(h, grid));
  if (group_index < 0 || group_index >= static_cast<int>(groups.size())) {
    throw ConfigError("gauge-demo: group " + std::to_string(group_index) + " does not exist (" +
                      std::to_string(groups.size()) + " gapped groups)");
  }
  const BandGroup& group = groups[group_index];
  doc["group"] = {{"index", group_index}, {"bands", {group.first, group.last}}, {"rank", group.rank()}};

  for (int level = 0;; ++level) {
    Json attempt = doc;
    int exit_code = kExitOk;
    try {
      gauge_attempt(attempt, exit_code, h, grid, group, target_c, config.tol);
      attempt["refinements"] = level;
      doc = std::move(attempt);
      result.exit_code = exit_code;
      return result;
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      const bool refinable = dynamic_cast<const ResolutionError*>(&e) || dynamic_cast<const ExtensionError*>(&e);
      if (refinable && level < config.tol.max_refinements) {
        grid = grid.refined();
        continue;
      }
      doc["status"] = dynamic_cast<const ExtensionError*>(&e) ? "extension_failure" : "numerical_failure";
      doc["diagnostic"] = e.what();
      doc["error"] = error_json(e);
      doc["refinements"] = level;
      result.exit_code = kExitNumerical;
      return result;
    }
  }
}

// ---------------------------------------------------------------- validation

namespace {

enum class Kind { Int, Number, Bool, String, Object, Array, IntOrNull, NumberOrNull, BoolOrNull };

bool has_kind(const Json& v, Kind k) {
  switch (k) {
    case Kind::Int: return v.is_number_integer();
    case Kind::Number: return v.is_number();
    case Kind::Bool: return v.is_boolean();
    case Kind::String: return v.is_string();
    case Kind::Object: return v.is_object();
    case Kind::Array: return v.is_array();
    case Kind::IntOrNull: return v.is_null() || v.is_number_integer();
    case Kind::NumberOrNull: return v.is_null() || v.is_number();
    case Kind::BoolOrNull: return v.is_null() || v.is_boolean();
  }
  return false;
}

struct Checker {
  std::vector<std::string> problems;

  bool field(const Json& obj, const std::string& path, const char* key, Kind kind) {
    if (!obj.is_object() || !obj.contains(key)) {
      problems.push_back(path + "." + key + ": missing");
      return false;
    }
    if (!has_kind(obj.at(key), kind)) {
      problems.push_back(path + "." + key + ": wrong type");
      return false;
    }
    return true;
  }

  void group(const Json& g, const std::string& path) {
    field(g, path, "group_id", Kind::Int);
    field(g, path, "bands", Kind::Array);
    field(g, path, "rank", Kind::Int);
    if (g.contains("error")) {
      if (field(g, path, "error", Kind::Object)) {
        field(g["error"], path + ".error", "type", Kind::String);
        field(g["error"], path + ".error", "message", Kind::String);
      }
      return;
    }
    field(g, path, "min_gap", Kind::NumberOrNull);
    if (field(g, path, "chern", Kind::Object)) {
      const std::string p = path + ".chern";
      field(g["chern"], p, "plaquette", Kind::Int);
      field(g["chern"], p, "winding", Kind::Int);
      field(g["chern"], p, "consistent", Kind::Bool);
    }
    if (field(g, path, "kane_mele", Kind::Object)) {
      const Json& km = g["kane_mele"];
      const std::string p = path + ".kane_mele";
      field(km, p, "status", Kind::String);
      field(km, p, "k_boundary", Kind::IntOrNull);
      field(km, p, "k_census", Kind::IntOrNull);
      if (field(km, p, "census", Kind::Array)) {
        for (std::size_t i = 0; i < km["census"].size(); ++i) {
          const std::string q = p + ".census[" + std::to_string(i) + "]";
          field(km["census"][i], q, "plaquette", Kind::Int);
          field(km["census"][i], q, "index", Kind::Int);
        }
      }
      field(km, p, "census_same_sign", Kind::Bool);
      field(km, p, "diagnostic", Kind::String);
    }
    if (field(g, path, "verdicts", Kind::Object)) {
      for (const char* k : {"parity_ok", "km_relation_ok", "curvature_even", "theorems_ok"}) {
        field(g["verdicts"], path + ".verdicts", k, Kind::Bool);
      }
    }
    if (field(g, path, "residuals", Kind::Object)) {
      for (const char* k : {"tri", "frame_orthonormality", "frame_span", "frame_continuity", "frame_seam",
                            "transition_unitarity", "transition_symmetry", "m_skew", "pf_consistency",
                            "curvature_evenness", "curvature_evenness_tol"}) {
        field(g["residuals"], path + ".residuals", k, Kind::Number);
      }
      field(g["residuals"], path + ".residuals", "pfaffian_identity", Kind::NumberOrNull);
      field(g["residuals"], path + ".residuals", "kramers", Kind::NumberOrNull);
    }
    if (field(g, path, "grid", Kind::Object)) {
      for (const char* k : {"n_lat", "n_lon", "refinements", "adaptive_passes", "km_chart"}) field(g["grid"], path + ".grid", k, Kind::Int);
    }
  }
};

}  // namespace

std::vector<std::string> validate_report(const Json& report) {
  Checker c;
  if (!report.is_object()) return {"report: not an object"};
  if (c.field(report, "report", "schema_version", Kind::Int) && report["schema_version"] != kReportSchemaVersion) {
    c.problems.push_back("report.schema_version: unsupported value");
  }
  if (c.field(report, "report", "artifact", Kind::Object)) {
    c.field(report["artifact"], "report.artifact", "name", Kind::String);
    c.field(report["artifact"], "report.artifact", "version", Kind::String);
  }
  if (!c.field(report, "report", "command", Kind::String)) return c.problems;
  const std::string command = report["command"];
  if (command == "analyze") {
    c.field(report, "report", "config", Kind::Object);
    c.field(report, "report", "status", Kind::String);
    c.field(report, "report", "diagnostic", Kind::String);
    if (c.field(report, "report", "tri", Kind::Object)) {
      c.field(report["tri"], "report.tri", "residual", Kind::Number);
      c.field(report["tri"], "report.tri", "passed", Kind::Bool);
    }
    if (c.field(report, "report", "groups", Kind::Array)) {
      for (std::size_t i = 0; i < report["groups"].size(); ++i) {
        c.group(report["groups"][i], "report.groups[" + std::to_string(i) + "]");
      }
    }
    if (c.field(report, "report", "global", Kind::Object)) {
      c.field(report["global"], "report.global", "sum_c", Kind::Int);
      c.field(report["global"], "report.global", "sum_c_zero", Kind::Bool);
      c.field(report["global"], "report.global", "tri_residual", Kind::Number);
      c.field(report["global"], "report.global", "all_theorems_ok", Kind::Bool);
    }
  } else if (command == "random-suite") {
    c.field(report, "report", "config", Kind::Object);
    c.field(report, "report", "passed", Kind::Bool);
    c.field(report, "report", "violations", Kind::Array);
    c.field(report, "report", "models", Kind::Array);
    c.field(report, "report", "controls", Kind::Array);
    if (c.field(report, "report", "summary", Kind::Object)) {
      for (const char* k : {"models", "gapped_models", "gapped_groups", "combined_groups", "cross_method_consistent",
                            "parity_checked", "parity_ok", "even_rank", "even_c", "km_checked", "km_relation_ok", "curvature_even",
                            "unresolved", "controls", "controls_rejected"}) {
        c.field(report["summary"], "report.summary", k, Kind::Int);
      }
      c.field(report["summary"], "report.summary", "max_transition_symmetry_residual", Kind::Number);
      c.field(report["summary"], "report.summary", "max_curvature_evenness_ratio", Kind::Number);
    }
  } else if (command == "deform") {
    c.field(report, "report", "endpoints", Kind::Array);
    c.field(report, "report", "steps", Kind::Int);
    c.field(report, "report", "status", Kind::String);
    c.field(report, "report", "samples", Kind::Array);
    if (report.contains("verdict") && !report["verdict"].is_null() && !report["verdict"].is_string()) {
      c.problems.push_back("report.verdict: wrong type");
    }
    if (report.contains("samples") && report["samples"].is_array()) {
      for (std::size_t i = 0; i < report["samples"].size(); ++i) {
        const std::string p = "report.samples[" + std::to_string(i) + "]";
        c.field(report["samples"][i], p, "s", Kind::Number);
        c.field(report["samples"][i], p, "gap", Kind::Number);
        c.field(report["samples"][i], p, "status", Kind::String);
        c.field(report["samples"][i], p, "chern", Kind::IntOrNull);
      }
    }
  } else if (command == "gauge-demo") {
    c.field(report, "report", "config", Kind::Object);
    c.field(report, "report", "status", Kind::String);
    if (report.value("status", "") != "tri_violation") {
      c.field(report, "report", "group", Kind::Object);
      if (!report.contains("error")) {
        c.field(report, "report", "measured_c", Kind::Int);
        c.field(report, "report", "target_c", Kind::Int);
        c.field(report, "report", "obstruction", Kind::Int);
        c.field(report, "report", "expected_failure", Kind::Bool);
        c.field(report, "report", "loops", Kind::Object);
      }
    }
  } else {
    c.problems.push_back("report.command: unknown command '" + command + "'");
  }
  return c.problems;
}

std::string render_report(const Json& report) { return report.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace phasetop
