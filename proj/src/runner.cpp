#include "geqhom/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "geqhom/control.hpp"
#include "geqhom/errors.hpp"
#include "geqhom/gequation.hpp"
#include "geqhom/homogenize.hpp"
#include "geqhom/parallel.hpp"
#include "geqhom/traveltime.hpp"

#ifndef GEQHOM_VERSION
#define GEQHOM_VERSION "0.0.0"
#endif

namespace geqhom {

namespace fs = std::filesystem;

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json json_real(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

namespace {

Json vec_json(Vec2 v) { return Json::array({json_real(v.x), json_real(v.y)}); }

Json reals_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(json_real(x));
  return a;
}

std::string csv_cell(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Records per-job wall time for the manifest.
class Jobs {
 public:
  template <class Fn>
  auto run(const std::string& name, Fn&& fn) {
    const auto t0 = Clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        timings_.push_back({name, since(t0), "ok"});
      } else {
        auto r = fn();
        timings_.push_back({name, since(t0), "ok"});
        return r;
      }
    } catch (...) {
      timings_.push_back({name, since(t0), "failed"});
      throw;
    }
  }
  void record(std::string name, double seconds, std::string status) {
    timings_.push_back({std::move(name), seconds, std::move(status)});
  }
  const std::vector<JobTiming>& timings() const { return timings_; }

 private:
  std::vector<JobTiming> timings_;
};

// tau(x, y) on a box around x that grows until the value is certified.
struct CertifiedTau {
  TravelTimeField field;
  double value;
};

CertifiedTau certified_tau(const FieldRealization& field, Vec2 x, Vec2 y, double h, int stencil, int sign,
                           double b, double half_width) {
  double half = half_width > 0 ? half_width : std::max(2.0, 1.5 * norm(y - x) + 4 * h * stencil);
  const bool fixed = half_width > 0;
  for (int attempt = 0;; ++attempt) {
    const Grid2 grid = Grid2::covering(x, half, h, stencil);
    if (!grid.contains(y)) {
      if (fixed) throw InvalidArgument("tau: target lies outside the box of the given half_width");
      half *= 1.5;
      continue;
    }
    const Vec2 src[] = {x};
    TravelTimeField t = solve_travel_time(field, src, grid, sign, b);
    const double v = t.nearest_value(y);
    if (t.certified(y)) return {std::move(t), v};
    if (fixed || attempt >= 6) {
      std::ostringstream msg;
      msg << "tau: box of half-width " << half << " cannot certify tau((" << x.x << ", " << x.y << "), (" << y.x
          << ", " << y.y << "))";
      throw GridTooSmall(msg.str());
    }
    half *= 1.5;
  }
}

Json grid_json(const Grid2& g) {
  return {{"center", vec_json(g.center)}, {"half_width", g.cells() * g.h}, {"h", g.h},
          {"stencil", g.stencil}, {"side", g.side()}};
}

Json run_field(const ExperimentConfig& c, ArtifactWriter& out, Jobs& jobs) {
  const FieldRealization field = sample_field(c.field, c.seed);
  const Grid2 grid = Grid2::covering(c.dump.center, c.dump.half_width, c.dump.h);
  std::vector<std::vector<double>> rows(grid.node_count());
  jobs.run("sample", [&] {
    parallel_for(static_cast<std::size_t>(grid.side()), [&](std::size_t j) {
      for (int i = 0; i < grid.side(); ++i) {
        const Vec2 x = grid.node(i, static_cast<int>(j));
        const Vec2 v = field.velocity(x);
        rows[grid.index(i, static_cast<int>(j))] = {x.x, x.y, field.psi(x), v.x, v.y};
      }
    });
  });
  out.csv("field.csv", {"x1", "x2", "psi", "v1", "v2"}, rows);
  Json waves = Json::array();
  for (Vec2 k : field.wavevectors()) waves.push_back(vec_json(k));
  Json result = {{"kind", std::string(to_string(c.field.kind))}, {"v_inf", field.v_inf()},
                 {"psi_bound", json_real(c.field.psi_bound())}, {"phases", reals_json(field.phases())},
                 {"wavevectors", waves}, {"grid", grid_json(grid)}, {"divergence_free", c.field.divergence_free()}};
  out.json("field.json", result);
  return result;
}

Json run_trajectory(const ExperimentConfig& c, ArtifactWriter& out, Jobs& jobs) {
  const auto& t = c.trajectory;
  const FieldRealization field = sample_field(c.field, c.seed);
  const ControlSignal control(t.starts, t.values, t.bound);
  const Trajectory path = jobs.run("integrate", [&] { return integrate(field, t.x0, control, t.T, t.dt, t.drift_sign); });
  std::vector<std::vector<double>> rows;
  rows.reserve(path.times.size());
  for (std::size_t k = 0; k < path.times.size(); ++k)
    rows.push_back({path.times[k], path.positions[k].x, path.positions[k].y});
  out.csv("trajectory.csv", {"t", "x1", "x2"}, rows);
  const Vec2 end = path.positions.back();
  if (!std::isfinite(end.x) || !std::isfinite(end.y)) throw NumericalFailure("trajectory: non-finite state");
  Json result = {{"steps", static_cast<long long>(path.times.size()) - 1}, {"endpoint", vec_json(end)},
                 {"displacement", norm(end - t.x0)}};
  out.json("trajectory.json", result);
  return result;
}

Json run_tau(const ExperimentConfig& c, ArtifactWriter& out, Jobs& jobs) {
  const auto& t = c.tau;
  const FieldRealization field = sample_field(c.field, c.seed);
  CertifiedTau ct = jobs.run("solve", [&] {
    return certified_tau(field, t.source, t.target, t.h, t.stencil, t.drift_sign, t.bound, t.half_width);
  });
  Json result = {{"tau", json_real(ct.value)}, {"reachable", std::isfinite(ct.value)}, {"grid", grid_json(ct.field.grid())},
                 {"source", vec_json(t.source)}, {"target", vec_json(t.target)},
                 {"lower_bound", norm(t.target - t.source) / ct.field.speed_bound()}};
  if (std::isfinite(ct.value)) {
    const DescentPath dp = jobs.run("descend", [&] { return descend_path(ct.field, t.target); });
    result["witness_path_time"] = dp.path_time;
    result["witness_replay_error"] = dp.replay_error;
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < dp.path.times.size(); ++k)
      rows.push_back({dp.path.times[k], dp.path.positions[k].x, dp.path.positions[k].y});
    out.csv("tau_path.csv", {"t", "x1", "x2"}, rows);
  } else {
    result["witness_path_time"] = json_real(kInf);
  }
  if (t.field_csv) {
    const Grid2& g = ct.field.grid();
    std::vector<std::vector<double>> rows(g.node_count());
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
      const Vec2 x = g.node(idx);
      rows[idx] = {x.x, x.y, ct.field.values()[idx]};
    }
    out.csv("tau_field.csv", {"x1", "x2", "tau"}, rows);
  }
  out.json("tau.json", result);
  return result;
}

Json run_wulff(const ExperimentConfig& c, ArtifactWriter& out, Jobs& jobs) {
  const auto& w = c.wulff;
  const WulffSet set = jobs.run("build_wulff", [&] { return build_wulff(c.field, w.seeds, w.directions, w.radii, w.policy); });
  Json dirs = Json::array(), verts = Json::array(), hbar = Json::array();
  for (Vec2 d : set.directions) dirs.push_back(vec_json(d));
  for (Vec2 v : set.vertices) verts.push_back(vec_json(v));
  for (int k = 0; k < 64; ++k) hbar.push_back(support(set, unit_direction(2 * kPi * k / 64)));
  Json per_seed = Json::array();
  for (const auto& q : set.per_seed_qbar) per_seed.push_back(reals_json(q));
  Json diag = {{"convexification_change", set.convexification_change}, {"estimator_noise", set.estimator_noise},
               {"v_inf", set.v_inf}, {"qbar_se", reals_json(set.qbar_se)}, {"per_seed_qbar", per_seed},
               {"lower_bound", 1.0 / (1.0 + set.v_inf)}};
  if (w.diagnostics && w.seeds.size() < 5) {
    diag["shape"] = "skipped: dispersion needs at least 5 seeds";
  } else if (w.diagnostics) {
    const Vec2 p = w.diagnostic_direction / norm(w.diagnostic_direction);
    const ShapeDiagnostics sd = jobs.run("shape_diagnostics", [&] {
      return shape_diagnostics(c.field, w.seeds, p, w.radii, w.diagnostic_base, w.policy);
    });
    diag["shape"] = {{"direction", vec_json(sd.direction)}, {"base", vec_json(sd.base)},
                     {"radii", reals_json(sd.radii)}, {"mean", reals_json(sd.mean)},
                     {"spread", reals_json(sd.spread)}, {"base_mean", reals_json(sd.base_mean)},
                     {"base_gap", reals_json(sd.base_gap)}, {"base_slack", reals_json(sd.base_slack)},
                     {"contracting", sd.contracting}, {"base_agrees", sd.base_agrees}};
  }
  Json result = {{"directions", dirs}, {"qbar", reals_json(set.qbar)}, {"vertices", verts},
                 {"Hbar_on_unit_circle", hbar}, {"diagnostics", diag}};
  out.json("wulff.json", result);
  std::vector<std::vector<double>> rows;
  for (Vec2 v : set.vertices) rows.push_back({v.x, v.y});
  out.csv("wulff_polygon.csv", {"x1", "x2"}, rows);
  return {{"vertices", set.vertices.size()}, {"Hbar_min", *std::min_element(hbar.begin(), hbar.end())},
          {"Hbar_max", *std::max_element(hbar.begin(), hbar.end())}};
}

Json run_geq(const ExperimentConfig& c, ArtifactWriter& out, Jobs& jobs) {
  const auto& g = c.geq;
  const FieldRealization field = sample_field(c.field, c.seed);
  const double half = g.half_width > 0 ? g.half_width : g.R + (1.0 + field.v_inf()) * g.T + 1.0;
  const Grid2 grid = Grid2::covering({0, 0}, half, g.h);
  std::vector<double> times;
  for (int k = 1; k <= g.snapshots; ++k) times.push_back(g.T * k / g.snapshots);

  Json schemes = Json::array();
  std::vector<std::vector<ScalarField2>> snaps;
  for (std::size_t e = 0; e < g.eps.size(); ++e) {
    SchemeReport rep;
    snaps.push_back(jobs.run("solve_geq eps=" + format_real(g.eps[e]),
                             [&] { return solve_geq(field, g.eps[e], g.u0, times, grid, g.cfl, &rep); }));
    schemes.push_back({{"eps", g.eps[e]}, {"dt", rep.dt}, {"sigma", rep.sigma}, {"steps", rep.steps},
                       {"cone_radius", rep.cone_radius}});
    for (std::size_t k = 0; k < times.size(); ++k) {
      const ScalarField2& s = snaps.back()[k];
      std::vector<std::vector<double>> rows(grid.node_count());
      for (std::size_t idx = 0; idx < grid.node_count(); ++idx) {
        const Vec2 x = grid.node(idx);
        rows[idx] = {x.x, x.y, s.values[idx]};
      }
      out.csv("geq_e" + std::to_string(e) + "_t" + std::to_string(k + 1) + ".csv", {"x1", "x2", "u"}, rows);
    }
  }
  Json result = {{"eps", g.eps}, {"times", times}, {"grid", grid_json(grid)}, {"schemes", schemes}};
  if (g.error_table) {
    const HomogenizationTable table = jobs.run("homogenization_error", [&] {
      return homogenization_error(c.field, c.seed, g.u0, g.T, g.eps, g.R, g.table);
    });
    // The PDE snapshots against the effective solution on the nodes of B_R.
    const Grid2 eval = Grid2::covering({0, 0}, g.R, g.h);
    const int off = grid.cells() - eval.cells();
    Json rows = Json::array();
    std::vector<double> pde_err(g.eps.size(), 0.0);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const ScalarField2 ubar = solve_effective(table.wulff, g.u0, times[k], eval);
      for (std::size_t e = 0; e < g.eps.size(); ++e) {
        for (int j = 0; j < eval.side(); ++j)
          for (int i = 0; i < eval.side(); ++i) {
            if (norm(eval.node(i, j)) > g.R) continue;
            const double d = std::abs(snaps[e][k].at(i + off, j + off) - ubar.at(i, j));
            pde_err[e] = std::max(pde_err[e], d);
          }
      }
    }
    for (std::size_t e = 0; e < table.rows.size(); ++e) {
      const auto& r = table.rows[e];
      rows.push_back({{"eps", r.eps}, {"error", r.error}, {"where", vec_json(r.where)}, {"when", r.when},
                      {"noise_floor", r.noise_floor}, {"pde_error", pde_err[e]}});
    }
    const double ratio = table.rows.back().error / table.rows.front().error;
    Json verts = Json::array();
    for (Vec2 v : table.wulff.vertices) verts.push_back(vec_json(v));
    Json errors = {{"rows", rows}, {"times", table.times}, {"decreasing", table.decreasing},
                   {"last_over_first", json_real(ratio)}, {"wulff_vertices", verts}};
    out.json("geq_errors.json", errors);
    result["errors"] = rows;
    result["decreasing"] = table.decreasing;
    result["last_over_first"] = json_real(ratio);
  }
  return result;
}

ConditionReport not_applicable(const std::string& id, const std::string& why) {
  ConditionReport r;
  r.id = id;
  r.passed = false;
  r.verdict = "not applicable: " + why;
  return r;
}

ConditionReport run_condition(const std::string& id, const ExperimentConfig& c) {
  const auto& k = c.conditions;
  try {
    if (id == "modified_stream") {
      const FieldRealization field = sample_field(c.field, c.seed);
      const double K = k.K > 0 ? k.K : hypothesis_K(field, k.z, k.M, k.lemma51.spacing);
      return check_modified_stream(modify_stream(field, k.z, k.M), K, k.lemma51.spacing);
    }
    if (id == "lemma51") return check_lemma51(c.field, c.seed, k.z, k.M, k.pairs, k.lemma51);
    if (id == "taubound") return check_taubound(c.field, k.seeds, k.radii, k.gamma);
    if (id == "gammaexp") return check_gammaexp(c.field, k.gamma_samples, k.gamma_R, c.seed, k.gamma);
    if (id == "streamgrowth") {
      std::vector<double> r;
      for (int i = 0; i * k.stream_dr <= k.stream_r_max * (1 + 1e-12); ++i) r.push_back(i * k.stream_dr);
      return stream_growth_integral(c.field, r, k.stream_samples, c.seed, k.stream_spacing);
    }
    if (id == "moment3") return check_moment3(c.field, k.moment_samples, c.seed);
    if (id == "sublinear") return check_sublinear(c.field, c.seed, k.sublinear_radii, k.sublinear_spacing);
    if (id == "volume") return check_volume_bound(c.field, c.seed, k.volume_x, k.volume_times, k.volume_h, k.volume_tol);
  } catch (const InvalidArgument& e) {
    return not_applicable(id, e.what());
  }
  throw InvalidArgument("unknown condition " + id);
}

Json run_conditions(const ExperimentConfig& c, ArtifactWriter& out, Jobs& jobs) {
  std::vector<std::vector<std::string>> rows;
  Json result = Json::array();
  for (const std::string& id : c.conditions.run) {
    const ConditionReport rep = jobs.run("condition " + id, [&] { return run_condition(id, c); });
    out.json("condition_" + id + ".json", to_json(rep));
    rows.push_back({id, rep.passed ? "1" : "0", std::to_string(rep.estimates.size()),
                    std::to_string(rep.witnesses.size()), rep.verdict});
    result.push_back({{"id", id}, {"passed", rep.passed}, {"verdict", rep.verdict}});
  }
  out.csv_text("conditions_summary.csv", {"id", "passed", "estimates", "witnesses", "verdict"}, rows);
  return result;
}

Json run_acceptance_experiment(const ExperimentConfig& c, ArtifactWriter& out, Jobs& jobs, bool& all_green) {
  const auto results = run_acceptance(c.acceptance, c.seed, [&](const CriterionResult& r) {
    jobs.record("criterion " + std::to_string(r.id), r.seconds, r.passed ? "pass" : "fail");
  });
  Json summary = acceptance_summary(results);
  all_green = summary["passed"].get<bool>();
  out.json("acceptance.json", summary);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : results) rows.push_back({std::to_string(r.id), r.name, r.passed ? "pass" : "fail", r.detail});
  out.csv_text("acceptance.csv", {"criterion", "name", "result", "detail"}, rows);
  return summary;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json versions() {
  return {{"geqhom", GEQHOM_VERSION},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", __VERSION__},
          {"cplusplus", __cplusplus}};
}

}  // namespace

ArtifactWriter::ArtifactWriter(fs::path dir, const ExperimentConfig& config) : dir_(std::move(dir)), config_(config) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw std::ios_base::failure("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void ArtifactWriter::json(const std::string& name, Json body) {
  Json doc = Json::object();
  doc["config_hash"] = config_.hash;
  doc["config"] = config_.echo;
  doc["result"] = std::move(body);
  std::ofstream f(dir_ / name, std::ios::binary);
  f << doc.dump(2) << '\n';
  if (!f) throw std::ios_base::failure("cannot write " + (dir_ / name).string());
  files_.push_back(name);
}

void ArtifactWriter::csv(const std::string& name, const std::vector<std::string>& columns,
                         const std::vector<std::vector<double>>& rows) {
  std::vector<std::vector<std::string>> text;
  text.reserve(rows.size());
  for (const auto& r : rows) {
    std::vector<std::string> cells;
    cells.reserve(r.size());
    for (double v : r) cells.push_back(format_real(v));
    text.push_back(std::move(cells));
  }
  csv_text(name, columns, text);
}

void ArtifactWriter::csv_text(const std::string& name, const std::vector<std::string>& columns,
                              const std::vector<std::vector<std::string>>& rows) {
  std::ofstream f(dir_ / name, std::ios::binary);
  f << "# config_hash=" << config_.hash << " config=" << config_.echo.dump() << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) f << (i ? "," : "") << columns[i];
  f << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << csv_cell(r[i]);
    f << '\n';
  }
  if (!f) throw std::ios_base::failure("cannot write " + (dir_ / name).string());
  files_.push_back(name);
}

Json to_json(const ConditionReport& r) {
  Json est = Json::array(), wit = Json::array(), par = Json::object(), rows = Json::array();
  for (const auto& e : r.estimates)
    est.push_back({{"name", e.name}, {"value", json_real(e.value)}, {"uncertainty", json_real(e.uncertainty)}});
  for (const auto& w : r.witnesses)
    wit.push_back({{"what", w.what}, {"seed", w.seed}, {"point", vec_json(w.point)}, {"other", vec_json(w.other)},
                   {"value", json_real(w.value)}});
  for (const auto& [k, v] : r.parameters) par[k] = v;
  for (const auto& row : r.table.rows) rows.push_back(reals_json(row));
  return {{"id", r.id}, {"passed", r.passed}, {"verdict", r.verdict}, {"estimates", est}, {"witnesses", wit},
          {"parameters", par}, {"table", {{"columns", r.table.columns}, {"rows", rows}}}};
}

RunOutcome run_experiment(const Json& doc, const std::string& out_override) {
  RunOutcome outcome;
  ExperimentConfig config;
  try {
    config = load_config(doc);
  } catch (const ConfigError& e) {
    outcome.status = RunStatus::invalid_config;
    outcome.message = e.what();
    outcome.summary = Json{{"status", static_cast<int>(outcome.status)}, {"error", outcome.message},
                           {"where", e.where()}}.dump(2);
    return outcome;
  }
  outcome.out_dir = out_override.empty() ? fs::path(config.out) : fs::path(out_override);
  const unsigned previous_jobs = default_jobs();
  set_default_jobs(config.jobs);
  const unsigned workers = default_jobs();

  const std::string started = utc_now();
  const auto t0 = Clock::now();
  Jobs jobs;
  Json result;
  std::string error;
  std::unique_ptr<ArtifactWriter> writer;
  try {
    writer = std::make_unique<ArtifactWriter>(outcome.out_dir, config);
    bool green = true;
    switch (config.experiment) {
      case ExperimentKind::field: result = run_field(config, *writer, jobs); break;
      case ExperimentKind::trajectory: result = run_trajectory(config, *writer, jobs); break;
      case ExperimentKind::tau: result = run_tau(config, *writer, jobs); break;
      case ExperimentKind::wulff: result = run_wulff(config, *writer, jobs); break;
      case ExperimentKind::geq: result = run_geq(config, *writer, jobs); break;
      case ExperimentKind::conditions: result = run_conditions(config, *writer, jobs); break;
      case ExperimentKind::acceptance: result = run_acceptance_experiment(config, *writer, jobs, green); break;
    }
    if (!green) {
      outcome.status = RunStatus::acceptance_failed;
      outcome.message = "acceptance: at least one criterion failed";
    }
  } catch (const ConfigError& e) {
    outcome.status = RunStatus::invalid_config;
    outcome.message = e.what();
  } catch (const InvalidArgument& e) {
    outcome.status = RunStatus::invalid_config;
    outcome.message = e.what();
  } catch (const GridTooSmall& e) {
    outcome.status = RunStatus::numerical_failure;
    outcome.message = e.what();
  } catch (const NumericalFailure& e) {
    outcome.status = RunStatus::numerical_failure;
    outcome.message = e.what();
  } catch (const std::ios_base::failure& e) {
    outcome.status = RunStatus::io_error;
    outcome.message = e.what();
  } catch (const std::exception& e) {
    outcome.status = RunStatus::internal_error;
    outcome.message = e.what();
  }
  set_default_jobs(previous_jobs);

  Json summary = {{"experiment", std::string(to_string(config.experiment))},
                  {"status", static_cast<int>(outcome.status)},
                  {"result", result}};
  if (!outcome.message.empty()) summary["error"] = outcome.message;
  if (writer) {
    try {
      summary["artifacts"] = writer->files();
      writer->json("summary.json", summary);
      Json timings = Json::array();
      for (const auto& t : jobs.timings()) timings.push_back({{"name", t.name}, {"seconds", t.seconds}, {"status", t.status}});
      Json manifest = {{"config_hash", config.hash},
                       {"config", config.echo},
                       {"experiment", std::string(to_string(config.experiment))},
                       {"status", static_cast<int>(outcome.status)},
                       {"versions", versions()},
                       {"started_utc", started},
                       {"wall_seconds", since(t0)},
                       {"jobs_flag", config.jobs},
                       {"workers", workers},
                       {"jobs", timings},
                       {"artifacts", writer->files()}};
      if (!outcome.message.empty()) manifest["error"] = outcome.message;
      std::ofstream f(outcome.out_dir / "manifest.json", std::ios::binary);
      f << manifest.dump(2) << '\n';
      if (!f) throw std::ios_base::failure("cannot write manifest.json");
    } catch (const std::exception& e) {
      if (outcome.status == RunStatus::ok) {
        outcome.status = RunStatus::io_error;
        outcome.message = e.what();
      }
    }
  }
  summary["config_hash"] = config.hash;
  outcome.summary = summary.dump(2);
  return outcome;
}

}  // namespace geqhom
