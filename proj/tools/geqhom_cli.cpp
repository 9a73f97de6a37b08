// Command-line front end. Flags become a JSON merge patch over the --config
// document (or an empty one); the library does all validation and work.
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "geqhom/geqhom.h"

namespace {

using Json = nlohmann::json;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::string out;
  std::string run_path;

  std::string spec;
  std::vector<double> source, target, center, x0, control, eps, radii;
  std::optional<double> h, half_width, T, dt, cfl, R, bound;
  std::optional<int> stencil, drift_sign, directions, snapshots;
  std::string u0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> ids;
  std::vector<int> criteria;
  bool no_table = false;
  bool tau_field = false;
};

Json pair(const std::vector<double>& v) { return Json::array({v[0], v[1]}); }

template <class T>
void put(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

CLI::Option* point(CLI::App* app, const char* name, std::vector<double>& v, const char* what) {
  return app->add_option(name, v, what)->delimiter(',')->expected(2);
}

// Builds the override patch for the selected subcommand.
Json patch_for(const std::string& name, const Flags& f) {
  Json p = Json::object();
  if (name != "run") p["experiment"] = name;
  if (f.seed) p["seed"] = *f.seed;
  if (f.jobs) p["jobs"] = *f.jobs;
  if (!f.out.empty()) p["out"] = f.out;
  if (!f.spec.empty()) p["field"] = f.spec[0] == '{' ? Json::parse(f.spec) : Json(f.spec);

  Json s = Json::object();
  if (name == "field") {
    if (!f.center.empty()) s["center"] = pair(f.center);
    put(s, "half_width", f.half_width);
    put(s, "h", f.h);
    if (!s.empty()) p["dump"] = s;
    return p;
  }
  if (name == "trajectory") {
    if (!f.x0.empty()) s["x0"] = pair(f.x0);
    if (!f.control.empty()) {
      s["starts"] = {0.0};
      s["values"] = Json::array({pair(f.control)});
    }
    put(s, "T", f.T);
    put(s, "dt", f.dt);
    put(s, "bound", f.bound);
    put(s, "drift_sign", f.drift_sign);
  } else if (name == "tau") {
    if (!f.source.empty()) s["source"] = pair(f.source);
    if (!f.target.empty()) s["target"] = pair(f.target);
    put(s, "h", f.h);
    put(s, "stencil", f.stencil);
    put(s, "drift_sign", f.drift_sign);
    put(s, "half_width", f.half_width);
    if (f.tau_field) s["field_csv"] = true;
  } else if (name == "wulff") {
    if (!f.seeds.empty()) s["seeds"] = f.seeds;
    if (!f.radii.empty()) s["radii"] = f.radii;
    put(s, "directions", f.directions);
    put(s, "h", f.h);
    put(s, "stencil", f.stencil);
  } else if (name == "geq") {
    if (!f.eps.empty()) s["eps"] = f.eps;
    if (!f.u0.empty()) s["u0"] = f.u0[0] == '{' ? Json::parse(f.u0) : Json(f.u0);
    put(s, "T", f.T);
    put(s, "h", f.h);
    put(s, "cfl", f.cfl);
    put(s, "R", f.R);
    put(s, "snapshots", f.snapshots);
    put(s, "half_width", f.half_width);
    if (f.no_table) s["error_table"] = false;
  } else if (name == "conditions") {
    if (!f.ids.empty()) s["run"] = f.ids;
  } else if (name == "acceptance") {
    if (!f.criteria.empty()) s["criteria"] = f.criteria;
  }
  if (!s.empty()) p[name] = s;
  return p;
}

int report(geqhom_status s, const char* summary) {
  if (summary) std::puts(summary);
  if (s != GEQHOM_OK) std::fprintf(stderr, "geqhom: %s\n", geqhom_last_error());
  return static_cast<int>(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Travel times, effective Hamiltonians and homogenization of the G-equation in random drift fields"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON configuration file (see docs/config.md)");
  app.add_option("--seed", f.seed, "Realization seed");
  app.add_option("--jobs", f.jobs, "Worker threads (0: all cores)");
  app.add_option("--out", f.out, "Output directory");
  app.add_flag_callback("--version", [] {
    std::printf("geqhom %s\n", geqhom_version());
    throw CLI::Success();
  }, "Print the library version");

  auto* run = app.add_subcommand("run", "Run the experiment named in a configuration file");
  run->add_option("config", f.run_path, "Configuration file")->required();

  auto spec_opt = [&](CLI::App* a) {
    a->add_option("--spec", f.spec, "Field spec: JSON object or compact form such as shear:A=2");
  };

  auto* field = app.add_subcommand("field", "Sample Psi and V on a grid (CSV x1,x2,psi,v1,v2)");
  field->add_subcommand("dump", "Same as field")->fallthrough();
  spec_opt(field);
  point(field, "--center", f.center, "Grid centre x,y");
  field->add_option("--half-width", f.half_width, "Grid half-width");
  field->add_option("--h", f.h, "Grid spacing");

  auto* traj = app.add_subcommand("trajectory", "Integrate the controlled ODE (CSV t,x1,x2)");
  spec_opt(traj);
  point(traj, "--x0", f.x0, "Start point x,y");
  point(traj, "--control", f.control, "Constant control a1,a2");
  traj->add_option("--T", f.T, "Final time");
  traj->add_option("--dt", f.dt, "RK4 step");
  traj->add_option("--bound", f.bound, "Control bound");
  traj->add_option("--drift-sign", f.drift_sign, "-1 or +1");

  auto* tau = app.add_subcommand("tau", "First-arrival time between two points (JSON)");
  auto* tau_field = tau->add_subcommand("field", "Also write every node value as CSV");
  tau_field->fallthrough();
  spec_opt(tau);
  point(tau, "--source", f.source, "Source x,y");
  point(tau, "--target", f.target, "Target x,y");
  tau->add_option("--h", f.h, "Lattice spacing");
  tau->add_option("--stencil", f.stencil, "Stencil radius k (1, 2 or 3)");
  tau->add_option("--drift-sign", f.drift_sign, "-1 or +1");
  tau->add_option("--half-width", f.half_width, "Fixed box half-width (default: grown until certified)");

  auto* wulff = app.add_subcommand("wulff", "Wulff set and effective Hamiltonian (JSON + polygon CSV)");
  spec_opt(wulff);
  wulff->add_option("--seeds", f.seeds, "Seeds to average")->delimiter(',');
  wulff->add_option("--radii", f.radii, "Radii for q_r")->delimiter(',');
  wulff->add_option("--directions", f.directions, "Number of directions K");
  wulff->add_option("--h", f.h, "Lattice spacing");
  wulff->add_option("--stencil", f.stencil, "Stencil radius k");

  auto* geq = app.add_subcommand("geq", "Monotone scheme snapshots and the homogenization error table");
  spec_opt(geq);
  geq->add_option("--eps", f.eps, "Decreasing eps values")->delimiter(',');
  geq->add_option("--u0", f.u0, "Initial data: JSON object or compact form such as cosine:k1=0.25,k2=0");
  geq->add_option("--T", f.T, "Final time");
  geq->add_option("--h", f.h, "PDE grid spacing");
  geq->add_option("--cfl", f.cfl, "CFL number in (0, 1]");
  geq->add_option("--R", f.R, "Error ball radius");
  geq->add_option("--snapshots", f.snapshots, "Snapshots in (0, T]");
  geq->add_option("--half-width", f.half_width, "PDE box half-width");
  geq->add_flag("--no-table", f.no_table, "Skip the error table");

  auto* cond = app.add_subcommand("conditions", "Empirical checks of the structural conditions");
  spec_opt(cond);
  cond->add_option("ids", f.ids, "Condition ids (default: all)");

  auto* acc = app.add_subcommand("acceptance", "Acceptance suite");
  acc->add_option("--criteria", f.criteria, "Criterion numbers (default: 1-13)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return GEQHOM_INVALID_CONFIG;
  }

  CLI::App* chosen = app.get_subcommands().front();
  f.tau_field = tau_field->parsed();
  const std::string name = chosen->get_name();
  const std::string path = name == "run" ? f.run_path : f.config;
  if (name == "run" && !f.config.empty()) {
    std::fprintf(stderr, "geqhom: give the configuration either to run or to --config, not both\n");
    return GEQHOM_INVALID_CONFIG;
  }

  Json patch;
  try {
    patch = patch_for(name, f);
  } catch (const Json::parse_error& e) {
    std::fprintf(stderr, "geqhom: --spec/--u0: %s\n", e.what());
    return GEQHOM_INVALID_CONFIG;
  }

  geqhom_config* cfg = nullptr;
  geqhom_status s = path.empty() ? geqhom_config_parse("{}", &cfg) : geqhom_config_load(path.c_str(), &cfg);
  if (s != GEQHOM_OK) return report(s, nullptr);
  s = geqhom_config_merge(cfg, patch.dump().c_str());
  if (s != GEQHOM_OK) {
    geqhom_config_free(cfg);
    return report(s, nullptr);
  }
  char* summary = nullptr;
  s = geqhom_run(cfg, nullptr, &summary);
  const int code = report(s, summary);
  geqhom_string_free(summary);
  geqhom_config_free(cfg);
  return code;
}
