#include "geqhom/geqhom.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "geqhom/config.hpp"
#include "geqhom/errors.hpp"
#include "geqhom/parallel.hpp"
#include "geqhom/runner.hpp"
#include "geqhom/traveltime.hpp"

#ifndef GEQHOM_VERSION
#define GEQHOM_VERSION "0.0.0"
#endif

struct geqhom_config {
  geqhom::Json doc;
};

struct geqhom_field {
  std::shared_ptr<const geqhom::FieldRealization> field;
};

namespace {

thread_local std::string last_error;

geqhom_status fail(geqhom_status s, std::string msg) {
  last_error = std::move(msg);
  return s;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class Fn>
geqhom_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const geqhom::ConfigError& e) {
    return fail(GEQHOM_INVALID_CONFIG, e.what());
  } catch (const geqhom::InvalidArgument& e) {
    return fail(GEQHOM_INVALID_CONFIG, e.what());
  } catch (const geqhom::GridTooSmall& e) {
    return fail(GEQHOM_NUMERICAL_FAILURE, e.what());
  } catch (const geqhom::NumericalFailure& e) {
    return fail(GEQHOM_NUMERICAL_FAILURE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(GEQHOM_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(GEQHOM_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(GEQHOM_INTERNAL_ERROR, "unknown error");
  }
}

}  // namespace

extern "C" {

const char* geqhom_version(void) { return GEQHOM_VERSION; }

const char* geqhom_last_error(void) { return last_error.c_str(); }

void geqhom_string_free(char* s) { std::free(s); }

geqhom_status geqhom_config_parse(const char* json_text, geqhom_config** out) {
  if (!json_text || !out) return fail(GEQHOM_INVALID_CONFIG, "geqhom_config_parse: null argument");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<geqhom_config>();
    c->doc = geqhom::parse_config_text(json_text);
    *out = c.release();
    return GEQHOM_OK;
  });
}

geqhom_status geqhom_config_load(const char* path, geqhom_config** out) {
  if (!path || !out) return fail(GEQHOM_INVALID_CONFIG, "geqhom_config_load: null argument");
  *out = nullptr;
  std::ifstream f(path, std::ios::binary);
  if (!f) return fail(GEQHOM_INVALID_CONFIG, std::string(path) + ": cannot open");
  std::ostringstream text;
  text << f.rdbuf();
  const geqhom_status s = geqhom_config_parse(text.str().c_str(), out);
  if (s != GEQHOM_OK) last_error = std::string(path) + ": " + last_error;
  return s;
}

geqhom_status geqhom_config_merge(geqhom_config* config, const char* patch_json) {
  if (!config || !patch_json) return fail(GEQHOM_INVALID_CONFIG, "geqhom_config_merge: null argument");
  return guarded([&] {
    config->doc.merge_patch(geqhom::parse_config_text(patch_json));
    return GEQHOM_OK;
  });
}

geqhom_status geqhom_config_check(const geqhom_config* config, char** effective_json, char hash[17]) {
  if (!config) return fail(GEQHOM_INVALID_CONFIG, "geqhom_config_check: null config");
  return guarded([&] {
    const geqhom::ExperimentConfig c = geqhom::load_config(config->doc);
    if (effective_json) *effective_json = dup(c.echo.dump(2));
    if (hash) std::memcpy(hash, c.hash.c_str(), 17);
    return GEQHOM_OK;
  });
}

void geqhom_config_free(geqhom_config* config) { delete config; }

geqhom_status geqhom_run(const geqhom_config* config, const char* out_dir, char** summary_json) {
  if (summary_json) *summary_json = nullptr;
  if (!config) return fail(GEQHOM_INVALID_CONFIG, "geqhom_run: null config");
  return guarded([&] {
    const geqhom::RunOutcome o = geqhom::run_experiment(config->doc, out_dir ? out_dir : "");
    if (summary_json) *summary_json = dup(o.summary);
    const auto s = static_cast<geqhom_status>(o.status);
    if (s != GEQHOM_OK) last_error = o.message;
    return s;
  });
}

geqhom_status geqhom_field_create(const char* spec, uint64_t seed, geqhom_field** out) {
  if (!spec || !out) return fail(GEQHOM_INVALID_CONFIG, "geqhom_field_create: null argument");
  *out = nullptr;
  return guarded([&] {
    geqhom::Json field = spec[0] == '{' ? geqhom::parse_config_text(spec) : geqhom::Json(spec);
    const geqhom::Json doc = {{"experiment", "field"}, {"field", field}};
    const geqhom::ExperimentConfig c = geqhom::load_config(doc);
    auto h = std::make_unique<geqhom_field>();
    h->field = std::make_shared<const geqhom::FieldRealization>(geqhom::sample_field(c.field, seed));
    *out = h.release();
    return GEQHOM_OK;
  });
}

void geqhom_field_free(geqhom_field* field) { delete field; }

geqhom_status geqhom_field_eval(const geqhom_field* field, const double x[2], double* psi, double v[2]) {
  if (!field || !x) return fail(GEQHOM_INVALID_CONFIG, "geqhom_field_eval: null argument");
  return guarded([&] {
    const geqhom::Vec2 p{x[0], x[1]};
    if (psi) *psi = field->field->psi(p);
    if (v) {
      const geqhom::Vec2 w = field->field->velocity(p);
      v[0] = w.x;
      v[1] = w.y;
    }
    return GEQHOM_OK;
  });
}

geqhom_status geqhom_field_vinf(const geqhom_field* field, double* v_inf) {
  if (!field || !v_inf) return fail(GEQHOM_INVALID_CONFIG, "geqhom_field_vinf: null argument");
  *v_inf = field->field->v_inf();
  return GEQHOM_OK;
}

geqhom_status geqhom_tau(const geqhom_field* field, const double source[2], const double target[2], double h,
                         int stencil, int drift_sign, double* tau) {
  if (!field || !source || !target || !tau) return fail(GEQHOM_INVALID_CONFIG, "geqhom_tau: null argument");
  return guarded([&] {
    const geqhom::Vec2 x{source[0], source[1]}, y{target[0], target[1]};
    double half = std::max(2.0, 1.5 * geqhom::norm(y - x) + 4 * h * stencil);
    for (int attempt = 0;; ++attempt) {
      try {
        *tau = geqhom::tau(*field->field, x, y, geqhom::Grid2::covering(x, half, h, stencil), drift_sign, 1.0);
        return GEQHOM_OK;
      } catch (const geqhom::GridTooSmall&) {
        if (attempt >= 6) throw;
        half *= 1.5;
      }
    }
  });
}

void geqhom_set_jobs(unsigned jobs) { geqhom::set_default_jobs(jobs); }

}  // extern "C"
