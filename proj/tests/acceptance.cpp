// Acceptance checks. `phasetop_acceptance N` runs criterion N, no argument
// runs all of them. One line per criterion: "criterion N PASS|FAIL: detail".

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "phasetop/app.hpp"
#include "phasetop/errors.hpp"

using namespace phasetop;

namespace {

std::string config_path(const std::string& name) { return std::string(PHASETOP_CONFIG_DIR) + "/" + name; }

struct Timed {
  CommandResult result;
  double seconds = 0.0;
};

template <class F>
Timed timed(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  CommandResult r = f();
  const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
  return {std::move(r), d.count()};
}

// Collects failed checks of one criterion.
class Verdict {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool passed() const { return failures_.empty(); }
  std::string detail() const {
    std::ostringstream out;
    const auto& items = passed() ? notes_ : failures_;
    for (std::size_t i = 0; i < items.size(); ++i) out << (i ? "; " : "") << items[i];
    return out.str();
  }

 private:
  std::vector<std::string> failures_, notes_;
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(3);
  s << x;
  return s.str();
}

std::vector<int> chern_values(const Json& report) {
  std::vector<int> cs;
  for (const auto& g : report["groups"]) {
    if (g.contains("chern")) cs.push_back(g["chern"]["plaquette"].get<int>());
  }
  return cs;
}

std::string list(const std::vector<int>& v) {
  std::ostringstream s;
  s << "{";
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  s << "}";
  return s.str();
}

// Plaquette Chern numbers of each group on grids scaled by 1/2, 1 and 2.
std::vector<std::vector<int>> plaquette_at_three_resolutions(const RunConfig& config, const Json& report) {
  const HamiltonianField h = build(config.model);
  std::vector<std::vector<int>> out;
  for (int scale : {1, 2, 4}) {
    const Grid grid(config.grid.manifold, config.grid.n_lat * scale / 2, config.grid.n_lon * scale / 2);
    const Spectrum s = spectrum_on_grid(h, grid);
    std::vector<int> cs;
    for (const auto& g : report["groups"]) {
      const BandGroup group = band_group(s, g["bands"][0].get<int>(), g["bands"][1].get<int>());
      cs.push_back(chern_plaquette(s, group, grid).chern);
    }
    out.push_back(cs);
  }
  return out;
}

// Reports shared by several criteria, computed once.
struct Cache {
  std::map<std::string, Timed> analyze;
  std::map<std::string, Timed> suite;

  const Timed& analyzed(const std::string& key, const std::function<RunConfig()>& config) {
    auto it = analyze.find(key);
    if (it == analyze.end()) {
      const RunConfig c = config();
      it = analyze.emplace(key, timed([&] { return cmd_analyze(c); })).first;
    }
    return it->second;
  }

  const Timed& suite_run(Manifold m) {
    const std::string key = to_string(m);
    auto it = suite.find(key);
    if (it == suite.end()) {
      SuiteOptions o;
      o.count = 50;
      o.manifold = m;
      o.n_a = 4;
      o.grid.manifold = m;
      it = suite.emplace(key, timed([&] { return cmd_random_suite(o); })).first;
    }
    return it->second;
  }
};

Cache cache;

RunConfig kramers_config(double epsilon) {
  std::ifstream in(config_path("kramers_pair.json"));
  Json doc = Json::parse(in);
  doc["model"]["epsilon"] = epsilon;
  return parse_config(doc);
}

const Timed& rotor_half() { return cache.analyzed("rotor_half", [] { return load_config(config_path("rotor_half.json")); }); }
const Timed& rotor_three_halves() {
  return cache.analyzed("rotor_three_halves", [] { return load_config(config_path("rotor_three_halves.json")); });
}
const Timed& kramers(double epsilon) {
  return cache.analyzed("kramers_" + fmt(epsilon), [epsilon] { return kramers_config(epsilon); });
}
const Timed& torus_doubled() {
  return cache.analyzed("torus_doubled", [] { return load_config(config_path("torus_doubled.json")); });
}

void rotor_checks(Verdict& v, const Timed& t, const RunConfig& config, int bands, const std::vector<int>& frozen) {
  const Json& r = t.result.report;
  v.check(t.result.exit_code == kExitOk, "analyze exit code " + std::to_string(t.result.exit_code));
  v.check(r["groups"].size() == static_cast<std::size_t>(bands),
          "expected " + std::to_string(bands) + " gapped groups, got " + std::to_string(r["groups"].size()));
  const std::vector<int> cs = chern_values(r);
  int sum = 0;
  for (const auto& g : r["groups"]) {
    v.check(g["rank"].get<int>() == 1, "group of rank " + std::to_string(g["rank"].get<int>()));
    const int c = g["chern"]["plaquette"].get<int>();
    sum += c;
    v.check(std::abs(c) % 2 == 1, "even c = " + std::to_string(c));
    v.check(g["chern"]["winding"].get<int>() == c, "c_plaquette != c_winding");
  }
  v.check(sum == 0, "sum of c = " + std::to_string(sum));
  // Frozen values up to the global orientation convention.
  std::vector<int> sorted = cs, flipped = cs;
  std::sort(sorted.begin(), sorted.end());
  for (int& c : flipped) c = -c;
  std::sort(flipped.begin(), flipped.end());
  std::vector<int> want = frozen;
  std::sort(want.begin(), want.end());
  v.check(sorted == want || flipped == want, "c values " + list(cs) + " differ from " + list(frozen));
  const auto oracle = plaquette_at_three_resolutions(config, r);
  for (const auto& level : oracle) {
    v.check(level == cs, "plaquette oracle " + list(level) + " differs from reported " + list(cs));
  }
  v.note("c = " + list(cs) + ", stable at 3 resolutions, " + fmt(t.seconds) + " s");
}

bool criterion1(Verdict& v) {
  const Timed& t = rotor_half();
  rotor_checks(v, t, load_config(config_path("rotor_half.json")), 2, {1, -1});
  v.check(t.seconds < 10.0, "runtime " + fmt(t.seconds) + " s >= 10 s");
  return v.passed();
}

bool criterion2(Verdict& v) {
  const Timed& t = rotor_three_halves();
  rotor_checks(v, t, load_config(config_path("rotor_three_halves.json")), 4, {3, 1, -1, -3});
  return v.passed();
}

void km_checks(Verdict& v, const Timed& t, const std::string& label) {
  const Json& r = t.result.report;
  v.check(t.result.exit_code == kExitOk, label + ": analyze exit code " + std::to_string(t.result.exit_code));
  std::vector<int> ks;
  for (const auto& g : r["groups"]) {
    if (g.contains("error")) {
      v.check(false, label + ": group error: " + g["error"]["message"].get<std::string>());
      continue;
    }
    const int c = g["chern"]["plaquette"].get<int>();
    const Json& km = g["kane_mele"];
    if (km["status"] != "ok") {
      v.check(false, label + ": Kane-Mele status " + km["status"].get<std::string>() + " (" +
                         km["diagnostic"].get<std::string>() + ")");
      continue;
    }
    const int kb = km["k_boundary"].get<int>();
    const int kc = km["k_census"].get<int>();
    ks.push_back(kb);
    v.check(2 * kb == c, label + ": k_boundary = " + std::to_string(kb) + " but c = " + std::to_string(c));
    v.check(kc == kb, label + ": k_census = " + std::to_string(kc) + " != k_boundary");
    v.check(km["census_same_sign"].get<bool>(), label + ": census zeros of mixed sign");
  }
  v.note(label + ": c = " + list(chern_values(r)) + ", k = " + list(ks) + ", " + fmt(t.seconds) + " s");
}

bool criterion3(Verdict& v) {
  for (double eps : {0.0, 0.1}) {
    const Timed& t = kramers(eps);
    const std::string label = "epsilon " + fmt(eps);
    const Json& r = t.result.report;
    v.check(r["groups"].size() == 2, label + ": expected 2 groups");
    for (const auto& g : r["groups"]) {
      v.check(g["rank"].get<int>() == 2, label + ": group rank " + std::to_string(g["rank"].get<int>()));
      if (g.contains("chern")) {
        v.check(std::abs(g["chern"]["plaquette"].get<int>()) == 2, label + ": |c| != 2");
        v.check(g["chern"]["consistent"].get<bool>(), label + ": c_plaquette != c_winding");
      }
    }
    km_checks(v, t, label);
    v.check(t.seconds < 20.0, label + ": runtime " + fmt(t.seconds) + " s >= 20 s");
  }
  return v.passed();
}

bool criterion4(Verdict& v) {
  const Timed& t = torus_doubled();
  const Json& r = t.result.report;
  v.check(!r["groups"].empty(), "no gapped groups");
  for (const auto& g : r["groups"]) {
    v.check(g["rank"].get<int>() % 2 == 0, "odd-rank group");
    if (!g.contains("chern")) continue;
    const int c = g["chern"]["plaquette"].get<int>();
    v.check(std::abs(c) == 2, "|c| = " + std::to_string(std::abs(c)));
    v.check(g["chern"]["consistent"].get<bool>(), "c_plaquette != c_winding");
    const Json& kr = g["residuals"]["kramers"];
    v.check(kr.is_number() && kr.get<double>() <= 1e-10, "Kramers pairing residual above 1e-10");
  }
  km_checks(v, t, "m = 1");
  v.check(t.seconds < 20.0, "runtime " + fmt(t.seconds) + " s >= 20 s");
  return v.passed();
}

bool criterion5(Verdict& v) {
  double seconds = 0.0;
  for (Manifold m : {Manifold::Sphere, Manifold::Torus}) {
    const Timed& t = cache.suite_run(m);
    seconds += t.seconds;
    const Json& r = t.result.report;
    const Json& s = r["summary"];
    const std::string label = to_string(m);
    const int groups = s["gapped_groups"].get<int>();
    v.check(s["models"].get<int>() >= 50, label + ": fewer than 50 models");
    v.check(groups > 0, label + ": no gapped groups");
    v.check(s["unresolved"].get<int>() == 0, label + ": " + std::to_string(s["unresolved"].get<int>()) + " unresolved");
    if (m == Manifold::Sphere) {
      v.check(s["parity_checked"].get<int>() == groups && s["parity_ok"].get<int>() == groups,
              label + ": parity(c) = parity(N_B) fails");
      v.check(s["max_transition_symmetry_residual"].get<double>() <= 1e-8,
              label + ": U(phi + pi)^t = -U(phi) residual " + fmt(s["max_transition_symmetry_residual"].get<double>()));
    } else {
      v.check(s["even_rank"].get<int>() == groups, label + ": odd-rank group");
      v.check(s["even_c"].get<int>() == groups, label + ": odd c");
    }
    v.check(s["km_relation_ok"].get<int>() == s["km_checked"].get<int>(), label + ": k != c/2");
    v.check(s["curvature_even"].get<int>() == groups, label + ": curvature evenness fails");
    v.check(r["passed"].get<bool>(), label + ": suite reports violations");
    v.note(label + ": " + std::to_string(groups) + " groups, km " + std::to_string(s["km_relation_ok"].get<int>()) +
           "/" + std::to_string(s["km_checked"].get<int>()) + ", " + fmt(t.seconds) + " s");
  }
  v.check(seconds < 600.0, "suite runtime " + fmt(seconds) + " s >= 600 s");
  return v.passed();
}

bool criterion6(Verdict& v) {
  int groups = 0;
  auto single = [&](const std::string& label, const Timed& t) {
    for (const auto& g : t.result.report["groups"]) {
      ++groups;
      v.check(g.contains("chern") && g["chern"]["consistent"].get<bool>(), label + ": group without c_plaquette = c_winding");
    }
  };
  single("rotor 1/2", rotor_half());
  single("rotor 3/2", rotor_three_halves());
  single("kramers 0", kramers(0.0));
  single("kramers 0.1", kramers(0.1));
  single("torus doubled", torus_doubled());
  for (Manifold m : {Manifold::Sphere, Manifold::Torus}) {
    const Json& s = cache.suite_run(m).result.report["summary"];
    groups += s["gapped_groups"].get<int>();
    v.check(s["cross_method_consistent"].get<int>() == s["gapped_groups"].get<int>(),
            to_string(m) + " suite: cross-method disagreement");
  }
  v.note(std::to_string(groups) + " gapped groups, all with c_plaquette = c_winding");
  return v.passed();
}

bool criterion7(Verdict& v) {
  const std::vector<std::pair<std::string, RunConfig>> zoo = {
      {"rotor 1/2", load_config(config_path("rotor_half.json"))},
      {"rotor 3/2", load_config(config_path("rotor_three_halves.json"))},
      {"kramers 0", kramers_config(0.0)},
      {"kramers 0.1", kramers_config(0.1)},
      {"torus doubled", load_config(config_path("torus_doubled.json"))}};
  int runs = 0;
  for (const auto& [label, config] : zoo) {
    const int count = static_cast<int>(select_groups(config, spectrum_on_grid(build(config.model),
                                                                              Grid(config.grid.manifold,
                                                                                   config.grid.n_lat,
                                                                                   config.grid.n_lon)))
                                           .size());
    for (int g = 0; g < count; ++g) {
      ++runs;
      const std::string tag = label + " group " + std::to_string(g);
      const CommandResult r = cmd_gauge_demo(config, g);
      const Json& d = r.report;
      v.check(r.exit_code == kExitOk && d["status"] == "ok",
              tag + ": status " + d.value("status", std::string("?")) + " " + d.value("diagnostic", std::string()));
      if (!d.contains("obstruction")) continue;
      v.check(d["obstruction"].get<int>() == 0, tag + ": obstruction " + std::to_string(d["obstruction"].get<int>()));
      if (config.grid.manifold == Manifold::Sphere) {
        v.check(d["w_residuals"]["at_pi"].get<double>() <= 1e-8, tag + ": W residual at pi");
        v.check(d["w_residuals"]["at_2pi"].get<double>() <= 1e-8, tag + ": W residual at 2 pi");
        const Json& e = d["extension"];
        v.check(e["success"].get<bool>() && e["regauged_mismatch"].get<double>() <= 1e-6,
                tag + ": regauged loop mismatch");
      } else {
        v.check(d["skew_normal_form"]["congruence_residual"].get<double>() <= 1e-8, tag + ": congruence residual");
        v.check(d["skew_normal_form"]["bookkeeping_ok"].get<bool>(), tag + ": winding bookkeeping");
      }
    }
  }
  // Mismatched requests.
  for (const auto& [label, name] : {std::pair<std::string, std::string>{"rotor 1/2", "rotor_half.json"},
                                    {"torus doubled", "torus_doubled.json"}}) {
    const RunConfig config = load_config(config_path(name));
    const CommandResult base = cmd_gauge_demo(config, 0);
    const int c = base.report["measured_c"].get<int>();
    const CommandResult wrong = cmd_gauge_demo(config, 0, c + 2);
    const int obstruction = wrong.report["obstruction"].get<int>();
    v.check(std::abs(obstruction) == 1 && wrong.report["expected_failure"].get<bool>(),
            label + ": mismatched target c + 2 gave obstruction " + std::to_string(obstruction));
    v.note(label + ": target " + std::to_string(c + 2) + " obstruction " + std::to_string(obstruction));
  }
  v.note(std::to_string(runs) + " gauge constructions extended");
  return v.passed();
}

bool criterion8(Verdict& v) {
  const CommandResult same =
      cmd_deform(load_config(config_path("rotor_half.json")), load_config(config_path("rotor_half_perturbed.json")), 21);
  const Json& s = same.report;
  v.check(s["verdict"] == "GAPPED-CONSTANT-C", "same-c path verdict " + s["verdict"].dump());
  for (const auto& sample : s["samples"]) {
    v.check(sample["status"] == "gapped" && sample["chern"] == s["samples"][0]["chern"],
            "same-c path sample at s = " + sample["s"].dump() + " not gapped with constant c");
  }
  const CommandResult flip = cmd_deform(load_config(config_path("random_sphere_up.json")),
                                        load_config(config_path("random_sphere_down.json")), 21);
  const Json& f = flip.report;
  v.check(f["status"] == "ok", "opposite-c path status " + f["status"].dump());
  if (f["status"] == "ok") {
    const int c0 = f["endpoint_chern"][0].get<int>(), c1 = f["endpoint_chern"][1].get<int>();
    v.check(c0 == -c1 && std::abs(c0) == 1, "endpoints c = " + std::to_string(c0) + ", " + std::to_string(c1));
    v.check(f["verdict"] == "GAP-CLOSES" && f["bracket"].is_array(), "opposite-c path verdict " + f["verdict"].dump());
    v.note("same c: " + s["verdict"].get<std::string>() + " at c = " + s["samples"][0]["chern"].dump() +
           "; c = " + std::to_string(c0) + " to " + std::to_string(c1) + ": " + f["verdict"].get<std::string>() +
           " in s " + f["bracket"].dump());
  }
  return v.passed();
}

bool criterion9(Verdict& v) {
  const RunConfig config = load_config(config_path("tri_broken.json"));
  const CommandResult r = cmd_analyze(config);
  v.check(!r.report["tri"]["passed"].get<bool>(), "TRI-broken model passes check_tri");
  v.check(r.exit_code == kExitNumerical && r.report["status"] == "tri_violation", "analyze does not flag the violation");
  const HamiltonianField h = build(config.model);
  const Grid grid(config.grid.manifold, config.grid.n_lat, config.grid.n_lon);
  const Spectrum s = spectrum_on_grid(h, grid);
  const auto groups = find_gapped_groups(s, config.tol.gap_floor);
  double evenness = 0.0, tol = 0.0;
  if (!groups.empty()) {
    const CurvatureField f = chern_plaquette(s, groups.front(), grid);
    evenness = curvature_tr_evenness(f, grid);
    tol = config.tol.evenness_tol(f);
  }
  v.check(groups.empty() || evenness > tol, "TRI-broken model passes curvature evenness");
  for (Manifold m : {Manifold::Sphere, Manifold::Torus}) {
    const Json& suite = cache.suite_run(m).result.report;
    int observed = 0;
    for (const auto& c : suite["controls"]) {
      v.check(c["tri_failed"].get<bool>(), to_string(m) + " control passes check_tri");
      if (c["evenness_failed"].is_boolean()) {
        v.check(c["evenness_failed"].get<bool>(), to_string(m) + " control passes curvature evenness");
      }
      if (c["expected_failure_observed"].get<bool>()) ++observed;
    }
    v.check(observed == suite["summary"]["controls"].get<int>() && observed > 0,
            to_string(m) + " suite: control not reported as expected failure");
  }
  v.note("tri residual " + fmt(r.report["tri"]["residual"].get<double>()) + ", evenness " + fmt(evenness) +
         " > tol " + fmt(tol) + "; suite controls rejected as expected failures");
  return v.passed();
}

bool criterion10(Verdict& v) {
  const RunConfig rotor = load_config(config_path("rotor_three_halves.json"));
  const RunConfig up = load_config(config_path("random_sphere_up.json"));
  const RunConfig down = load_config(config_path("random_sphere_down.json"));
  SuiteOptions o;
  o.count = 8;
  o.seed = 42;
  o.controls = 2;
  const std::vector<std::pair<std::string, std::function<CommandResult()>>> runs = {
      {"analyze", [&] { return cmd_analyze(up); }},
      {"analyze kramers", [&] { return cmd_analyze(kramers_config(0.1)); }},
      {"random-suite", [&] { return cmd_random_suite(o); }},
      {"deform", [&] { return cmd_deform(up, down, 11); }},
      {"gauge-demo", [&] { return cmd_gauge_demo(rotor, 1); }}};
  for (const auto& [label, run] : runs) {
    const std::string a = render_report(run().report);
    const std::string b = render_report(run().report);
    v.check(a == b, label + ": reports differ between runs");
  }
  // Through the command-line tool, byte for byte.
  const std::string out1 = std::string(PHASETOP_BINARY_DIR) + "/determinism_1.json";
  const std::string out2 = std::string(PHASETOP_BINARY_DIR) + "/determinism_2.json";
  for (const auto& out : {out1, out2}) {
    const std::string cmd = std::string(PHASETOP_CLI) + " analyze --config " + config_path("random_sphere_up.json") +
                            " --seed 9 --out " + out;
    v.check(std::system(cmd.c_str()) == 0, "command-line run failed");
  }
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string a = slurp(out1), b = slurp(out2);
  v.check(!a.empty() && a == b, "command-line reports differ");
  v.note(std::to_string(runs.size()) + " commands and the command-line tool repeat byte for byte");
  return v.passed();
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<bool(Verdict&)>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                               criterion5, criterion6, criterion7, criterion8,
                                                               criterion9, criterion10};
  std::vector<int> selected;
  if (argc > 1) {
    const int n = std::atoi(argv[1]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::cerr << "usage: phasetop_acceptance [1-" << criteria.size() << "]\n";
      return 2;
    }
    selected.push_back(n);
  } else {
    for (int n = 1; n <= static_cast<int>(criteria.size()); ++n) selected.push_back(n);
  }
  bool all = true;
  for (int n : selected) {
    Verdict v;
    bool ok = false;
    try {
      ok = criteria[n - 1](v);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    ok = ok && v.passed();
    all = all && ok;
    std::cout << "criterion " << n << (ok ? " PASS: " : " FAIL: ") << v.detail() << std::endl;
  }
  return all ? 0 : 1;
}
