#include "fimform.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>

#include "fimform/error.hpp"
#include "fimform/pipeline.hpp"
#include "fimform/scenario.hpp"

struct ff_scenario {
  fimform::Scenario scenario;
  fimform::RunOptions options;
};

struct ff_report {
  fimform::RunOutput output;
};

namespace {

thread_local std::string last_error;

ff_status set_error(ff_status status, const std::string& what) {
  last_error = what;
  return status;
}

ff_status status_of(fimform::ErrorKind kind) {
  switch (kind) {
    case fimform::ErrorKind::InvalidArgument:
    case fimform::ErrorKind::Config: return FF_ERR_CONFIG;
    case fimform::ErrorKind::DegenerateGeometry: return FF_ERR_DEGENERATE;
    case fimform::ErrorKind::Numeric: return FF_ERR_NUMERIC;
  }
  return FF_ERR_INTERNAL;
}

template <class Fn>
ff_status guarded(Fn&& fn) {
  last_error.clear();
  try {
    fn();
    return FF_OK;
  } catch (const fimform::Error& e) {
    return set_error(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(FF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(FF_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(FF_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define FF_REQUIRE(cond, msg) \
  if (!(cond)) return set_error(FF_ERR_INVALID_ARGUMENT, msg)

}  // namespace

extern "C" {

const char* ff_version(void) { return "1.0.0"; }

const char* ff_last_error(void) { return last_error.c_str(); }

const char* ff_status_name(ff_status status) {
  switch (status) {
    case FF_OK: return "ok";
    case FF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FF_ERR_CONFIG: return "configuration error";
    case FF_ERR_IO: return "i/o error";
    case FF_ERR_DEGENERATE: return "degenerate geometry";
    case FF_ERR_NUMERIC: return "numeric error";
    case FF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void ff_string_free(char* s) { std::free(s); }

ff_status ff_scenario_load(const char* path, ff_scenario** out) {
  FF_REQUIRE(path && out, "ff_scenario_load: null argument");
  *out = nullptr;
  return guarded([&] { *out = new ff_scenario{fimform::parse_scenario(path), {}}; });
}

ff_status ff_scenario_parse(const char* json_text, ff_scenario** out) {
  FF_REQUIRE(json_text && out, "ff_scenario_parse: null argument");
  *out = nullptr;
  return guarded([&] { *out = new ff_scenario{fimform::parse_scenario_text(json_text), {}}; });
}

ff_status ff_scenario_to_json(const ff_scenario* s, char** out) {
  FF_REQUIRE(s && out, "ff_scenario_to_json: null argument");
  return guarded([&] { *out = dup_string(fimform::serialize_scenario(s->scenario)); });
}

void ff_scenario_free(ff_scenario* s) { delete s; }

ff_status ff_scenario_set_seed(ff_scenario* s, uint64_t seed) {
  FF_REQUIRE(s, "ff_scenario_set_seed: null handle");
  s->options.seed_override = seed;
  return FF_OK;
}

ff_status ff_scenario_set_controller(ff_scenario* s, const char* controller) {
  FF_REQUIRE(s, "ff_scenario_set_controller: null handle");
  if (!controller) {
    s->options.controller.reset();
    return FF_OK;
  }
  const ff_status st =
      guarded([&] { s->options.controller = fimform::controller_from_string(controller); });
  return st == FF_OK ? st : set_error(FF_ERR_INVALID_ARGUMENT, last_error);
}

ff_status ff_run(const ff_scenario* s, ff_stage stage, ff_report** out) {
  FF_REQUIRE(s && out, "ff_run: null argument");
  FF_REQUIRE(stage >= FF_STAGE_ALLOCATE && stage <= FF_STAGE_FLY, "ff_run: unknown stage");
  *out = nullptr;
  return guarded([&] {
    fimform::RunOptions opts = s->options;
    opts.stage = static_cast<fimform::Stage>(stage);
    *out = new ff_report{fimform::run_pipeline(s->scenario, opts)};
  });
}

ff_status ff_report_json(const ff_report* r, char** out) {
  FF_REQUIRE(r && out, "ff_report_json: null argument");
  return guarded([&] { *out = dup_string(r->output.report()); });
}

ff_status ff_report_file_count(const ff_report* r, size_t* out) {
  FF_REQUIRE(r && out, "ff_report_file_count: null argument");
  *out = r->output.files.size();
  return FF_OK;
}

ff_status ff_report_file_name(const ff_report* r, size_t index, const char** out) {
  FF_REQUIRE(r && out, "ff_report_file_name: null argument");
  FF_REQUIRE(index < r->output.files.size(), "ff_report_file_name: index out of range");
  *out = r->output.files[index].name.c_str();
  return FF_OK;
}

ff_status ff_report_write(const ff_report* r, const char* dir) {
  FF_REQUIRE(r && dir, "ff_report_write: null argument");
  const ff_status st = guarded([&] { fimform::write_outputs(r->output, dir); });
  return st == FF_ERR_CONFIG ? set_error(FF_ERR_IO, last_error) : st;
}

void ff_report_free(ff_report* r) { delete r; }

ff_status ff_eval_fim(const char* formation_path, double* log_det, char** report) {
  FF_REQUIRE(formation_path && log_det, "ff_eval_fim: null argument");
  return guarded([&] {
    const fimform::FimEvaluation ev = fimform::eval_fim(fimform::parse_formation(formation_path));
    *log_det = ev.log_det;
    if (report) *report = dup_string(ev.report);
  });
}

ff_status ff_write_text(const char* dir, const char* name, const char* content) {
  FF_REQUIRE(dir && name && content, "ff_write_text: null argument");
  const ff_status st = guarded([&] {
    fimform::write_outputs(fimform::RunOutput{{{name, content}}}, dir);
  });
  return st == FF_ERR_CONFIG ? set_error(FF_ERR_IO, last_error) : st;
}

}  // extern "C"
