#include "geqhom/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "geqhom/errors.hpp"

namespace geqhom {

namespace {

std::string join_ptr(const std::string& base, std::string_view key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~') escaped += "~0";
    else if (c == '/') escaped += "~1";
    else escaped += c;
  }
  return base + "/" + escaped;
}

// Reads one JSON object, records every key it consumes into `echo`, and
// rejects keys nobody asked for. An absent object reads as all defaults.
class Section {
 public:
  Section(const Json* in, std::string ptr) : in_(in), ptr_(std::move(ptr)), echo_(Json::object()) {
    if (in_ && !in_->is_object()) throw ConfigError(where(), "expected an object");
  }

  const std::string& where() const { return ptr_; }
  std::string where(std::string_view key) const { return join_ptr(ptr_, key); }

  bool has(std::string_view key) const { return in_ && in_->contains(std::string(key)); }
  const Json* raw(std::string_view key) {
    seen_.insert(std::string(key));
    if (!has(key)) return nullptr;
    return &in_->at(std::string(key));
  }

  double real(std::string_view key, double def) {
    const Json* j = raw(key);
    double v = def;
    if (j) v = as_real(*j, where(key));
    echo_[std::string(key)] = v;
    return v;
  }
  double positive(std::string_view key, double def) {
    const double v = real(key, def);
    if (!(v > 0.0)) throw ConfigError(where(key), "must be > 0");
    return v;
  }
  double nonnegative(std::string_view key, double def) {
    const double v = real(key, def);
    if (!(v >= 0.0)) throw ConfigError(where(key), "must be >= 0");
    return v;
  }
  long long integer(std::string_view key, long long def, long long lo, long long hi) {
    const Json* j = raw(key);
    long long v = def;
    if (j) {
      if (!j->is_number_integer()) throw ConfigError(where(key), "expected an integer");
      v = j->get<long long>();
    }
    if (v < lo || v > hi)
      throw ConfigError(where(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    echo_[std::string(key)] = v;
    return v;
  }
  std::uint64_t seed(std::string_view key, std::uint64_t def) {
    const Json* j = raw(key);
    std::uint64_t v = def;
    if (j) v = as_seed(*j, where(key));
    echo_[std::string(key)] = v;
    return v;
  }
  int sign(std::string_view key, int def) {
    const int v = static_cast<int>(integer(key, def, -1, 1));
    if (v == 0) throw ConfigError(where(key), "must be -1 or +1");
    return v;
  }
  bool boolean(std::string_view key, bool def) {
    const Json* j = raw(key);
    bool v = def;
    if (j) {
      if (!j->is_boolean()) throw ConfigError(where(key), "expected true or false");
      v = j->get<bool>();
    }
    echo_[std::string(key)] = v;
    return v;
  }
  std::string text(std::string_view key, std::string def) {
    const Json* j = raw(key);
    std::string v = std::move(def);
    if (j) {
      if (!j->is_string()) throw ConfigError(where(key), "expected a string");
      v = j->get<std::string>();
    }
    echo_[std::string(key)] = v;
    return v;
  }
  Vec2 vec2(std::string_view key, Vec2 def) {
    const Json* j = raw(key);
    Vec2 v = def;
    if (j) v = as_vec2(*j, where(key));
    echo_[std::string(key)] = Json::array({v.x, v.y});
    return v;
  }
  std::vector<double> reals(std::string_view key, std::vector<double> def, std::size_t min_size = 1) {
    const Json* j = raw(key);
    std::vector<double> v = std::move(def);
    if (j) {
      if (!j->is_array()) throw ConfigError(where(key), "expected an array of numbers");
      v.clear();
      for (std::size_t i = 0; i < j->size(); ++i) v.push_back(as_real((*j)[i], where(key) + "/" + std::to_string(i)));
    }
    if (v.size() < min_size)
      throw ConfigError(where(key), "needs at least " + std::to_string(min_size) + " entries");
    echo_[std::string(key)] = v;
    return v;
  }
  std::vector<double> increasing(std::string_view key, std::vector<double> def, std::size_t min_size) {
    auto v = reals(key, std::move(def), min_size);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0.0)) throw ConfigError(where(key) + "/" + std::to_string(i), "must be > 0");
      if (i > 0 && !(v[i] > v[i - 1])) throw ConfigError(where(key) + "/" + std::to_string(i), "must be strictly increasing");
    }
    return v;
  }
  std::vector<std::uint64_t> seeds(std::string_view key, std::vector<std::uint64_t> def) {
    const Json* j = raw(key);
    std::vector<std::uint64_t> v = std::move(def);
    if (j) {
      if (!j->is_array()) throw ConfigError(where(key), "expected an array of seeds");
      v.clear();
      for (std::size_t i = 0; i < j->size(); ++i) v.push_back(as_seed((*j)[i], where(key) + "/" + std::to_string(i)));
    }
    echo_[std::string(key)] = v;
    return v;
  }
  std::vector<Vec2> points(std::string_view key, std::vector<Vec2> def) {
    const Json* j = raw(key);
    std::vector<Vec2> v = std::move(def);
    if (j) {
      if (!j->is_array()) throw ConfigError(where(key), "expected an array of [x, y] pairs");
      v.clear();
      for (std::size_t i = 0; i < j->size(); ++i) v.push_back(as_vec2((*j)[i], where(key) + "/" + std::to_string(i)));
    }
    Json e = Json::array();
    for (Vec2 p : v) e.push_back(Json::array({p.x, p.y}));
    echo_[std::string(key)] = std::move(e);
    return v;
  }
  /// Nested section; its echo is stored under `key` by `close`.
  Section child(std::string_view key) {
    const Json* j = raw(key);
    return Section(j, where(key));
  }
  void put(std::string_view key, Json value) { echo_[std::string(key)] = std::move(value); }

  /// Rejects unknown keys and returns the echo.
  Json close() {
    if (in_) {
      for (const auto& item : in_->items())
        if (!seen_.count(item.key())) throw ConfigError(where(item.key()), "unknown key");
    }
    return std::move(echo_);
  }

 private:
  static double as_real(const Json& j, const std::string& at) {
    if (!j.is_number()) throw ConfigError(at, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(at, "must be finite");
    return v;
  }
  static std::uint64_t as_seed(const Json& j, const std::string& at) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
      throw ConfigError(at, "expected a non-negative integer seed");
    return j.get<std::uint64_t>();
  }
  static Vec2 as_vec2(const Json& j, const std::string& at) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(at, "expected [x, y]");
    return {as_real(j[0], at + "/0"), as_real(j[1], at + "/1")};
  }

  const Json* in_;
  std::string ptr_;
  Json echo_;
  std::set<std::string> seen_;
};

template <class Fn>
auto guarded(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const InvalidArgument& e) {
    throw ConfigError(where, e.what());
  }
}

// "kind:key=value,key=value" into (kind, ordered key/value pairs).
std::pair<std::string, std::vector<std::pair<std::string, double>>> split_compact(std::string_view text,
                                                                                const std::string& where) {
  const auto colon = text.find(':');
  std::string kind(text.substr(0, colon));
  std::vector<std::pair<std::string, double>> kv;
  if (colon == std::string_view::npos) return {kind, kv};
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw ConfigError(where, "expected key=value in '" + std::string(item) + "'");
    const std::string_view val = item.substr(eq + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc() || ptr != val.data() + val.size() || !std::isfinite(v))
      throw ConfigError(where, "bad number '" + std::string(val) + "'");
    kv.emplace_back(std::string(item.substr(0, eq)), v);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  return {kind, kv};
}

double take(std::vector<std::pair<std::string, double>>& kv, const std::string& key, double def) {
  for (auto it = kv.begin(); it != kv.end(); ++it) {
    if (it->first == key) {
      const double v = it->second;
      kv.erase(it);
      return v;
    }
  }
  return def;
}

void no_leftovers(const std::vector<std::pair<std::string, double>>& kv, const std::string& where) {
  if (!kv.empty()) throw ConfigError(where, "unknown key '" + kv.front().first + "'");
}

FieldSpec read_field(const Json* j, const std::string& ptr, Json& echo) {
  Json compact;
  if (j && j->is_string()) {
    compact = field_from_compact(j->get<std::string>(), ptr);
    j = &compact;
  }
  Section s(j, ptr);
  const std::string kind_name = s.text("kind", "constant");
  FieldSpec spec;
  spec.kind = guarded(s.where("kind"), [&] { return field_kind_from_string(kind_name); });
  switch (spec.kind) {
    case FieldKind::shear:
    case FieldKind::cellular:
      spec.amplitude = s.nonnegative("amplitude", 1.0);
      break;
    case FieldKind::constant:
      spec.constant_velocity = s.vec2("velocity", {0.0, 0.0});
      break;
    case FieldKind::gradient_trap:
      spec.trap_cutoff = s.real("trap_cutoff", 2.0);
      break;
    case FieldKind::random_fourier: {
      spec.isotropic = s.boolean("isotropic", false);
      if (s.has("modes")) {
        const Json* m = s.raw("modes");
        if (!m->is_array() || m->empty()) throw ConfigError(s.where("modes"), "expected a non-empty array of modes");
        Json em = Json::array();
        for (std::size_t i = 0; i < m->size(); ++i) {
          Section ms(&(*m)[i], s.where("modes") + "/" + std::to_string(i));
          FourierMode mode;
          mode.wavevector = ms.vec2("wavevector", {1.0, 0.0});
          mode.coefficient = ms.real("coefficient", 0.0);
          spec.modes.push_back(mode);
          em.push_back(ms.close());
        }
        s.put("modes", std::move(em));
      } else {
        const int count = static_cast<int>(s.integer("count", 8, 1, 4096));
        const double k = s.positive("wavenumber", 1.0);
        const double a = s.real("coefficient", 0.125);
        const bool iso = spec.isotropic;
        spec = FieldSpec::isotropic_fourier(count, k, a);
        spec.isotropic = iso;
      }
      break;
    }
  }
  spec.fixed_phases = s.reals("fixed_phases", {}, 0);
  echo = s.close();
  guarded(ptr, [&] { spec.validate(); return 0; });
  return spec;
}

InitialData read_initial(const Json* j, const std::string& ptr, Json& echo, const InitialData& def) {
  Json compact;
  if (j && j->is_string()) {
    compact = initial_from_compact(j->get<std::string>(), ptr);
    j = &compact;
  }
  Section s(j, ptr);
  InitialData u = def;
  u.kind = guarded(s.where("kind"), [&] { return initial_kind_from_string(s.text("kind", std::string(to_string(def.kind)))); });
  u.amplitude = s.real("amplitude", def.amplitude);
  switch (u.kind) {
    case InitialKind::cosine:
      u.wavevector = s.vec2("wavevector", def.wavevector);
      break;
    case InitialKind::bump:
      u.center = s.vec2("center", def.center);
      u.radius = s.positive("radius", def.radius);
      break;
    case InitialKind::disk:
      u.center = s.vec2("center", def.center);
      u.radius = s.positive("radius", def.radius);
      u.width = s.positive("width", def.width);
      break;
    case InitialKind::constant:
      break;
  }
  echo = s.close();
  guarded(ptr, [&] { u.validate(); return 0; });
  return u;
}

GridPolicy read_policy(Section& s, GridPolicy p) {
  p.h = s.positive("h", p.h);
  p.stencil = static_cast<int>(s.integer("stencil", p.stencil, 1, 3));
  p.margin = s.nonnegative("margin", p.margin);
  p.growth = s.real("growth", p.growth);
  if (!(p.growth > 1.0)) throw ConfigError(s.where("growth"), "must be > 1");
  p.max_growths = static_cast<int>(s.integer("max_growths", p.max_growths, 0, 20));
  return p;
}

const std::vector<std::string>& condition_ids() {
  static const std::vector<std::string> ids{"modified_stream", "lemma51", "taubound", "gammaexp",
                                            "streamgrowth", "moment3", "sublinear", "volume"};
  return ids;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::field: return "field";
    case ExperimentKind::trajectory: return "trajectory";
    case ExperimentKind::tau: return "tau";
    case ExperimentKind::wulff: return "wulff";
    case ExperimentKind::geq: return "geq";
    case ExperimentKind::conditions: return "conditions";
    case ExperimentKind::acceptance: return "acceptance";
  }
  return "unknown";
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json parse_config_text(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (const auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col), msg);
  }
}

Json field_from_compact(std::string_view text, const std::string& where) {
  auto [kind, kv] = split_compact(text, where);
  Json j;
  if (kind == "zero") {
    j = {{"kind", "constant"}, {"velocity", {0.0, 0.0}}};
  } else if (kind == "shear" || kind == "cellular") {
    j = {{"kind", kind}, {"amplitude", take(kv, "A", 1.0)}};
    const double nan = std::nan("");
    if (kind == "shear") {
      if (const double u = take(kv, "U", nan); !std::isnan(u)) j["fixed_phases"] = {u};
    } else {
      const double u1 = take(kv, "U1", nan), u2 = take(kv, "U2", nan);
      if (std::isnan(u1) != std::isnan(u2)) throw ConfigError(where, "give both U1 and U2 or neither");
      if (!std::isnan(u1)) j["fixed_phases"] = {u1, u2};
    }
  } else if (kind == "constant") {
    const double v1 = take(kv, "v1", 0.0);
    j = {{"kind", "constant"}, {"velocity", {v1, take(kv, "v2", 0.0)}}};
  } else if (kind == "fourier" || kind == "random-fourier") {
    const double n = take(kv, "n", 8.0);
    if (n != std::floor(n) || n < 1) throw ConfigError(where, "n must be a positive integer");
    j = {{"kind", "random-fourier"}, {"count", static_cast<long long>(n)}, {"wavenumber", take(kv, "k", 1.0)},
         {"coefficient", take(kv, "a", 0.125)}, {"isotropic", take(kv, "isotropic", 1.0) != 0.0}};
  } else if (kind == "trap" || kind == "gradient-trap") {
    j = {{"kind", "gradient-trap"}, {"trap_cutoff", take(kv, "cutoff", 2.0)}};
  } else {
    throw ConfigError(where, "unknown field kind '" + kind + "'");
  }
  no_leftovers(kv, where);
  return j;
}

Json initial_from_compact(std::string_view text, const std::string& where) {
  auto [kind, kv] = split_compact(text, where);
  Json j = {{"kind", kind}, {"amplitude", take(kv, "a", 1.0)}};
  if (kind == "cosine") {
    const double k1 = take(kv, "k1", 1.0);
    j["wavevector"] = {k1, take(kv, "k2", 0.0)};
  } else if (kind == "bump" || kind == "disk") {
    const double c1 = take(kv, "c1", 0.0);
    j["center"] = {c1, take(kv, "c2", 0.0)};
    j["radius"] = take(kv, "r", 1.0);
    if (kind == "disk") j["width"] = take(kv, "w", 0.25);
  } else if (kind != "constant") {
    throw ConfigError(where, "unknown initial data kind '" + kind + "'");
  }
  no_leftovers(kv, where);
  return j;
}

ExperimentConfig load_config(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("", "the configuration must be a JSON object");
  Section root(&doc, "");
  ExperimentConfig c;

  const std::string exp = root.text("experiment", "");
  if (exp.empty()) throw ConfigError("/experiment", "required (field, trajectory, tau, wulff, geq, conditions, acceptance)");
  bool known = false;
  for (auto k : {ExperimentKind::field, ExperimentKind::trajectory, ExperimentKind::tau, ExperimentKind::wulff,
                 ExperimentKind::geq, ExperimentKind::conditions, ExperimentKind::acceptance}) {
    if (to_string(k) == exp) {
      c.experiment = k;
      known = true;
    }
  }
  if (!known) throw ConfigError("/experiment", "unknown experiment '" + exp + "'");
  c.seed = root.seed("seed", 0);
  c.jobs = static_cast<unsigned>(root.integer("jobs", 0, 0, 1024));
  c.out = root.text("out", "out");
  if (c.out.empty()) throw ConfigError("/out", "must not be empty");

  // Every section present is validated; the echo keeps the ones this
  // experiment reads.
  std::map<std::string, Json> sections;
  Json field_echo;
  const bool wants_field = c.experiment != ExperimentKind::acceptance;
  if (root.has("field") || wants_field) c.field = read_field(root.raw("field"), "/field", field_echo);
  else root.raw("field");
  if (wants_field) sections["field"] = field_echo;

  auto section = [&](const char* key, ExperimentKind owner, auto&& body) {
    const bool used = c.experiment == owner;
    if (!used && !root.has(key)) {
      root.raw(key);
      return;
    }
    Section s = root.child(key);
    body(s);
    Json e = s.close();
    if (used) sections[key] = std::move(e);
  };

  section("dump", ExperimentKind::field, [&](Section& s) {
    c.dump.center = s.vec2("center", c.dump.center);
    c.dump.half_width = s.positive("half_width", c.dump.half_width);
    c.dump.h = s.positive("h", c.dump.h);
    if (c.dump.half_width / c.dump.h > 4096) throw ConfigError(s.where("h"), "more than 8193 nodes per side");
  });

  section("trajectory", ExperimentKind::trajectory, [&](Section& s) {
    auto& t = c.trajectory;
    t.x0 = s.vec2("x0", t.x0);
    t.T = s.positive("T", t.T);
    t.dt = s.positive("dt", t.dt);
    t.drift_sign = s.sign("drift_sign", t.drift_sign);
    t.bound = s.positive("bound", t.bound);
    t.starts = s.reals("starts", t.starts);
    t.values = s.points("values", t.values);
    if (t.starts.size() != t.values.size()) throw ConfigError(s.where("values"), "needs one value per entry of starts");
    if (t.starts.front() != 0.0) throw ConfigError(s.where("starts") + "/0", "must be 0");
    for (std::size_t i = 1; i < t.starts.size(); ++i)
      if (!(t.starts[i] > t.starts[i - 1])) throw ConfigError(s.where("starts") + "/" + std::to_string(i), "must be strictly increasing");
    for (std::size_t i = 0; i < t.values.size(); ++i)
      if (norm(t.values[i]) > t.bound * (1 + 1e-12))
        throw ConfigError(s.where("values") + "/" + std::to_string(i), "control exceeds the bound");
  });

  section("tau", ExperimentKind::tau, [&](Section& s) {
    auto& t = c.tau;
    t.source = s.vec2("source", t.source);
    t.target = s.vec2("target", t.target);
    t.h = s.positive("h", t.h);
    t.stencil = static_cast<int>(s.integer("stencil", t.stencil, 1, 3));
    t.drift_sign = s.sign("drift_sign", t.drift_sign);
    t.bound = s.positive("bound", t.bound);
    t.half_width = s.nonnegative("half_width", t.half_width);
    t.field_csv = s.boolean("field_csv", t.field_csv);
  });

  section("wulff", ExperimentKind::wulff, [&](Section& s) {
    auto& w = c.wulff;
    w.seeds = s.seeds("seeds", w.seeds);
    w.directions = static_cast<int>(s.integer("directions", w.directions, 3, 4096));
    w.radii = s.increasing("radii", w.radii, 3);
    w.policy = read_policy(s, w.policy);
    w.diagnostics = s.boolean("diagnostics", w.diagnostics);
    w.diagnostic_direction = s.vec2("diagnostic_direction", w.diagnostic_direction);
    if (!(norm(w.diagnostic_direction) > 0.0)) throw ConfigError(s.where("diagnostic_direction"), "must be nonzero");
    w.diagnostic_base = s.vec2("diagnostic_base", w.diagnostic_base);
  });
  if (c.experiment == ExperimentKind::wulff && c.wulff.seeds.empty()) {
    c.wulff.seeds = {c.seed};
    sections["wulff"]["seeds"] = c.wulff.seeds;
  }

  section("geq", ExperimentKind::geq, [&](Section& s) {
    auto& g = c.geq;
    g.eps = s.reals("eps", g.eps);
    for (std::size_t i = 0; i < g.eps.size(); ++i) {
      if (!(g.eps[i] > 0.0 && g.eps[i] <= 1.0)) throw ConfigError(s.where("eps") + "/" + std::to_string(i), "must lie in (0, 1]");
      if (i > 0 && !(g.eps[i] < g.eps[i - 1]))
        throw ConfigError(s.where("eps") + "/" + std::to_string(i), "must be strictly decreasing");
    }
    Json u_echo;
    g.u0 = read_initial(s.raw("u0"), s.where("u0"), u_echo, g.u0);
    s.put("u0", std::move(u_echo));
    g.T = s.positive("T", g.T);
    g.snapshots = static_cast<int>(s.integer("snapshots", g.snapshots, 1, 1000));
    g.h = s.positive("h", g.h);
    g.cfl = s.positive("cfl", g.cfl);
    if (g.cfl > 1.0) throw ConfigError(s.where("cfl"), "CFL number must be <= 1");
    g.half_width = s.nonnegative("half_width", g.half_width);
    g.error_table = s.boolean("error_table", g.error_table);
    g.R = s.positive("R", g.R);
    Section t = s.child("table");
    auto& o = g.table;
    o.h = t.positive("h", o.h);
    o.stencil = static_cast<int>(t.integer("stencil", o.stencil, 1, 3));
    o.eval_spacing = t.positive("eval_spacing", o.eval_spacing);
    o.time_samples = static_cast<int>(t.integer("time_samples", o.time_samples, 1, 1000));
    o.wulff_radii = t.increasing("wulff_radii", o.wulff_radii, 3);
    o.wulff_seeds = t.seeds("wulff_seeds", o.wulff_seeds);
    o.wulff_directions = static_cast<int>(t.integer("wulff_directions", o.wulff_directions, 3, 4096));
    s.put("table", t.close());
  });

  section("conditions", ExperimentKind::conditions, [&](Section& s) {
    auto& k = c.conditions;
    const Json* run = s.raw("run");
    if (run) {
      if (!run->is_array()) throw ConfigError(s.where("run"), "expected an array of condition ids");
      for (std::size_t i = 0; i < run->size(); ++i) {
        const std::string at = s.where("run") + "/" + std::to_string(i);
        if (!(*run)[i].is_string()) throw ConfigError(at, "expected a condition id");
        const std::string id = (*run)[i].get<std::string>();
        if (std::find(condition_ids().begin(), condition_ids().end(), id) == condition_ids().end())
          throw ConfigError(at, "unknown condition '" + id + "'");
        if (std::find(k.run.begin(), k.run.end(), id) != k.run.end()) throw ConfigError(at, "listed twice");
        k.run.push_back(id);
      }
      if (k.run.empty()) throw ConfigError(s.where("run"), "must name at least one condition");
    } else {
      k.run = condition_ids();
    }
    s.put("run", k.run);
    k.z = s.vec2("z", k.z);
    k.M = s.positive("M", k.M);
    k.K = s.nonnegative("K", k.K);
    k.lemma51.h = s.positive("lemma_h", k.lemma51.h);
    k.lemma51.slack = s.positive("slack", k.lemma51.slack);
    k.lemma51.spacing = s.positive("spacing", k.lemma51.spacing);
    k.pairs = static_cast<int>(s.integer("pairs", k.pairs, 1, 100000));
    k.seeds = s.seeds("seeds", k.seeds);
    k.radii = s.increasing("radii", k.radii, 4);
    k.gamma.h = s.positive("gamma_h", k.gamma.h);
    k.gamma.sources = static_cast<int>(s.integer("gamma_sources", k.gamma.sources, 1, 100000));
    k.gamma.margin = s.nonnegative("gamma_margin", k.gamma.margin);
    k.gamma.drift_tol = s.positive("drift_tol", k.gamma.drift_tol);
    k.gamma_samples = static_cast<int>(s.integer("gamma_samples", k.gamma_samples, 10, 1000000));
    k.gamma_R = s.positive("gamma_R", k.gamma_R);
    k.stream_samples = static_cast<int>(s.integer("stream_samples", k.stream_samples, 1, 10000000));
    k.stream_r_max = s.positive("stream_r_max", k.stream_r_max);
    k.stream_dr = s.positive("stream_dr", k.stream_dr);
    if (k.stream_r_max / k.stream_dr < 2) throw ConfigError(s.where("stream_dr"), "r grid needs at least 3 points");
    k.stream_spacing = s.positive("stream_spacing", k.stream_spacing);
    k.moment_samples = static_cast<int>(s.integer("moment_samples", k.moment_samples, 2, 100000000));
    k.sublinear_radii = s.increasing("sublinear_radii", k.sublinear_radii, 4);
    k.sublinear_spacing = s.positive("sublinear_spacing", k.sublinear_spacing);
    k.volume_x = s.vec2("volume_x", k.volume_x);
    k.volume_times = s.increasing("volume_times", k.volume_times, 1);
    k.volume_h = s.positive("volume_h", k.volume_h);
    k.volume_tol = s.nonnegative("volume_tol", k.volume_tol);
  });
  if (c.experiment == ExperimentKind::conditions && c.conditions.seeds.empty()) {
    c.conditions.seeds = {c.seed};
    sections["conditions"]["seeds"] = c.conditions.seeds;
  }

  section("acceptance", ExperimentKind::acceptance, [&](Section& s) {
    auto& a = c.acceptance;
    const Json* crit = s.raw("criteria");
    if (crit) {
      if (!crit->is_array() || crit->empty()) throw ConfigError(s.where("criteria"), "expected a non-empty array of criterion numbers");
      a.criteria.clear();
      for (std::size_t i = 0; i < crit->size(); ++i) {
        const std::string at = s.where("criteria") + "/" + std::to_string(i);
        if (!(*crit)[i].is_number_integer()) throw ConfigError(at, "expected an integer in [1, 13]");
        const int n = (*crit)[i].get<int>();
        if (n < 1 || n > 13) throw ConfigError(at, "expected an integer in [1, 13]");
        if (std::find(a.criteria.begin(), a.criteria.end(), n) != a.criteria.end()) throw ConfigError(at, "listed twice");
        a.criteria.push_back(n);
      }
      std::sort(a.criteria.begin(), a.criteria.end());
    }
    s.put("criteria", a.criteria);
    Section t = s.child("tolerances");
    auto& o = a.tol;
    o.metric_rel = t.positive("metric_rel", o.metric_rel);
    o.metric_seconds = t.positive("metric_seconds", o.metric_seconds);
    o.drift_rel = t.positive("drift_rel", o.drift_rel);
    o.trap_inner = t.positive("trap_inner", o.trap_inner);
    o.trap_outer = t.positive("trap_outer", o.trap_outer);
    if (!(o.trap_inner < o.trap_outer)) throw ConfigError(t.where("trap_outer"), "must exceed trap_inner");
    o.shape_rel = t.positive("shape_rel", o.shape_rel);
    o.shape_spread = t.positive("shape_spread", o.shape_spread);
    o.disk_rel = t.positive("disk_rel", o.disk_rel);
    o.algebra_rel = t.nonnegative("algebra_rel", o.algebra_rel);
    o.isotropy = t.positive("isotropy", o.isotropy);
    o.volume = t.nonnegative("volume", o.volume);
    o.homogenization_ratio = t.positive("homogenization_ratio", o.homogenization_ratio);
    o.homogenization_seconds = t.positive("homogenization_seconds", o.homogenization_seconds);
    o.cross_solver = t.positive("cross_solver", o.cross_solver);
    o.taubound_flat = t.positive("taubound_flat", o.taubound_flat);
    o.stream_integral = t.positive("stream_integral", o.stream_integral);
    o.moment_sigmas = t.positive("moment_sigmas", o.moment_sigmas);
    o.halving = t.positive("halving", o.halving);
    o.lemma_slack = t.positive("lemma_slack", o.lemma_slack);
    s.put("tolerances", t.close());
  });

  root.close();

  c.echo = Json::object();
  c.echo["experiment"] = exp;
  c.echo["seed"] = c.seed;
  for (auto& [k, v] : sections) c.echo[k] = std::move(v);
  c.hash = fnv1a_hex(c.echo.dump());
  return c;
}

}  // namespace geqhom
