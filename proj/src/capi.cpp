#include "lrsdcut/lrsdcut.h"

#include "generators.hpp"
#include "instance_io.hpp"
#include "parallel.hpp"
#include "report.hpp"

#include <cstdlib>
#include <cstring>
#include <new>

using namespace lrsdcut;

struct lrsdcut_problem {
  Instance instance;
  std::string hash;
};

struct lrsdcut_report {
  RunResult result;
  std::string hash;
};

namespace {

thread_local std::string g_last_error;

lrsdcut_status status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return LRSDCUT_INVALID_ARGUMENT;
    case ErrorCode::InvalidState: return LRSDCUT_INVALID_STATE;
    case ErrorCode::TooLarge: return LRSDCUT_TOO_LARGE;
    case ErrorCode::Parse: return LRSDCUT_PARSE_ERROR;
    case ErrorCode::Io: return LRSDCUT_IO_ERROR;
    case ErrorCode::NotConverged: return LRSDCUT_NOT_CONVERGED;
    case ErrorCode::NonPsd: return LRSDCUT_NON_PSD;
  }
  return LRSDCUT_INTERNAL_ERROR;
}

template <class F>
lrsdcut_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return LRSDCUT_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LRSDCUT_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LRSDCUT_INTERNAL_ERROR;
  }
}

lrsdcut_status null_arg(const char* what) {
  g_last_error = std::string(what) + " must not be NULL";
  return LRSDCUT_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

GenParams gen_params(const lrsdcut_gen_params* p) {
  GenParams g;
  require(p->kind != nullptr, "generator kind must not be NULL");
  g.kind = p->kind;
  g.n = p->n;
  g.width = p->width;
  g.height = p->height;
  g.labels = p->labels;
  g.seed = p->seed;
  g.noise = p->noise;
  g.theta_pos = p->theta_pos;
  g.theta_col = p->theta_col;
  g.weight = p->weight;
  g.landmarks = p->landmarks;
  g.rank = p->rank;
  g.general_mu = p->general_mu != 0;
  return g;
}

}  // namespace

extern "C" {

const char* lrsdcut_version(void) { return "1.0.0"; }

const char* lrsdcut_last_error(void) { return g_last_error.c_str(); }

const char* lrsdcut_status_string(lrsdcut_status s) {
  switch (s) {
    case LRSDCUT_OK: return "ok";
    case LRSDCUT_INVALID_ARGUMENT: return "invalid argument";
    case LRSDCUT_INVALID_STATE: return "invalid state";
    case LRSDCUT_TOO_LARGE: return "instance too large";
    case LRSDCUT_PARSE_ERROR: return "parse error";
    case LRSDCUT_IO_ERROR: return "i/o error";
    case LRSDCUT_NOT_CONVERGED: return "not converged";
    case LRSDCUT_NON_PSD: return "kernel not positive semidefinite";
    case LRSDCUT_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

void lrsdcut_set_threads(unsigned threads) { set_thread_cap(threads); }

void lrsdcut_params_default(lrsdcut_params* p) {
  if (!p) return;
  const RunParams d;
  p->gamma = d.sdp.gamma;
  p->kmax = d.sdp.kmax;
  p->rank_init = static_cast<int>(d.sdp.rank_init);
  p->tau = d.sdp.tau;
  p->memory = d.sdp.memory;
  p->samples = static_cast<int>(d.sdp.samples);
  p->seed = d.sdp.seed;
  p->restarts = d.restarts;
  p->mf_iters = d.mf_iters;
}

void lrsdcut_gen_params_default(lrsdcut_gen_params* p) {
  if (!p) return;
  static const GenParams d;
  p->kind = "random";
  p->n = d.n;
  p->width = d.width;
  p->height = d.height;
  p->labels = d.labels;
  p->seed = d.seed;
  p->noise = d.noise;
  p->theta_pos = d.theta_pos;
  p->theta_col = d.theta_col;
  p->weight = d.weight;
  p->landmarks = d.landmarks;
  p->rank = d.rank;
  p->general_mu = 0;
}

lrsdcut_status lrsdcut_problem_load(const char* path, lrsdcut_problem** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto p = std::make_unique<lrsdcut_problem>(lrsdcut_problem{load_instance(path), {}});
    p->hash = p->instance.hash_hex();
    *out = p.release();
  });
}

lrsdcut_status lrsdcut_problem_parse(const char* json, const char* base_dir, lrsdcut_problem** out) {
  if (!json) return null_arg("json");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto p = std::make_unique<lrsdcut_problem>(
        lrsdcut_problem{parse_instance(json, base_dir ? base_dir : "."), {}});
    p->hash = p->instance.hash_hex();
    *out = p.release();
  });
}

void lrsdcut_problem_free(lrsdcut_problem* p) { delete p; }

size_t lrsdcut_problem_n_vars(const lrsdcut_problem* p) {
  return p ? static_cast<size_t>(p->instance.problem->n_vars()) : 0;
}

size_t lrsdcut_problem_n_labels(const lrsdcut_problem* p) {
  return p ? static_cast<size_t>(p->instance.problem->n_labels()) : 0;
}

const char* lrsdcut_problem_hash(const lrsdcut_problem* p) { return p ? p->hash.c_str() : ""; }

lrsdcut_status lrsdcut_problem_energy(const lrsdcut_problem* p, const int* labels, size_t n,
                                      double* e) {
  if (!p) return null_arg("problem");
  if (!labels) return null_arg("labels");
  if (!e) return null_arg("energy");
  return guarded([&] {
    Labeling x;
    x.labels.assign(labels, labels + n);
    *e = energy(*p->instance.problem, x);
  });
}

lrsdcut_status lrsdcut_solve(const lrsdcut_problem* p, lrsdcut_method method,
                             const lrsdcut_params* params, lrsdcut_report** out) {
  if (!p) return null_arg("problem");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    RunParams rp;
    if (params) {
      rp.sdp.gamma = params->gamma;
      rp.sdp.kmax = params->kmax;
      rp.sdp.rank_init = params->rank_init;
      rp.sdp.tau = params->tau;
      rp.sdp.memory = params->memory;
      rp.sdp.samples = params->samples;
      rp.sdp.seed = params->seed;
      rp.restarts = params->restarts;
      rp.mf_iters = params->mf_iters;
    }
    Method m;
    switch (method) {
      case LRSDCUT_METHOD_LRSDCUT: m = Method::LrSdcut; break;
      case LRSDCUT_METHOD_MEANFIELD: m = Method::MeanField; break;
      case LRSDCUT_METHOD_BRUTE: m = Method::Brute; break;
      default: throw Error(ErrorCode::InvalidArgument, "unknown method");
    }
    auto r = std::make_unique<lrsdcut_report>();
    r->result = run_method(*p->instance.problem, m, rp);
    r->hash = p->hash;
    *out = r.release();
  });
}

void lrsdcut_report_free(lrsdcut_report* r) { delete r; }

double lrsdcut_report_best_energy(const lrsdcut_report* r) { return r ? r->result.best_energy : 0.0; }

int lrsdcut_report_lower_bound(const lrsdcut_report* r, double* bound) {
  if (!r || !r->result.lower_bound) return 0;
  if (bound) *bound = *r->result.lower_bound;
  return 1;
}

double lrsdcut_report_wall_ms(const lrsdcut_report* r) { return r ? r->result.wall_ms : 0.0; }

size_t lrsdcut_report_labels(const lrsdcut_report* r, int* out, size_t cap) {
  if (!r) return 0;
  const auto& v = r->result.labels.labels;
  if (out)
    for (size_t i = 0; i < v.size() && i < cap; ++i) out[i] = v[i];
  return v.size();
}

size_t lrsdcut_report_iterations(const lrsdcut_report* r) {
  if (!r || r->result.method != Method::LrSdcut) return 0;
  return r->result.trajectory.size();
}

lrsdcut_status lrsdcut_report_iteration(const lrsdcut_report* r, size_t k, lrsdcut_iteration* out) {
  if (!r) return null_arg("report");
  if (!out) return null_arg("out");
  if (k >= lrsdcut_report_iterations(r)) {
    g_last_error = "iteration index out of range";
    return LRSDCUT_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const auto& t = r->result.trajectory[k];
    out->iter = t["iter"].get<int>();
    out->dual = t["dual"].get<double>();
    out->rounded_energy = t["rounded_energy"].get<double>();
    out->best_energy = t["best_energy"].get<double>();
    out->rank = t["rank"].get<long>();
    out->truncated = t["truncated"].get<bool>() ? 1 : 0;
    out->ms = t["ms"].get<double>();
  });
}

size_t lrsdcut_report_warning_count(const lrsdcut_report* r) { return r ? r->result.warnings.size() : 0; }

const char* lrsdcut_report_warning(const lrsdcut_report* r, size_t k) {
  if (!r || k >= r->result.warnings.size()) return nullptr;
  return r->result.warnings[k].c_str();
}

lrsdcut_status lrsdcut_report_json(const lrsdcut_report* r, char** json) {
  if (!r) return null_arg("report");
  if (!json) return null_arg("json");
  *json = nullptr;
  return guarded([&] { *json = copy_string(report_json(r->result, r->hash).dump(2) + "\n"); });
}

lrsdcut_status lrsdcut_generate(const lrsdcut_gen_params* params, char** json) {
  if (!params) return null_arg("params");
  if (!json) return null_arg("json");
  *json = nullptr;
  return guarded([&] { *json = copy_string(dump_instance(generate_instance(gen_params(params)))); });
}

lrsdcut_status lrsdcut_generate_file(const lrsdcut_gen_params* params, const char* path) {
  if (!params) return null_arg("params");
  if (!path) return null_arg("path");
  return guarded([&] { save_text(path, dump_instance(generate_instance(gen_params(params)))); });
}

void lrsdcut_string_free(char* s) { std::free(s); }

}  // extern "C"
