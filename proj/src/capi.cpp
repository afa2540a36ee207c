#include "usm/usm.h"

#include <cstring>
#include <iostream>
#include <new>
#include <string>

#include "usm/airy.hpp"
#include "usm/diagnostics.hpp"
#include "usm/error.hpp"
#include "usm/series.hpp"

struct usm_problem {
  usm::ProblemSpec spec;
};

struct usm_records {
  std::vector<usm::DiagnosticsRecord> rows;
};

namespace {

thread_local std::string g_last_error;

usm_status status_of(usm::ErrorCode code) {
  switch (code) {
    case usm::ErrorCode::InvalidArgument: return USM_ERR_INVALID_ARGUMENT;
    case usm::ErrorCode::DimensionMismatch: return USM_ERR_DIMENSION;
    case usm::ErrorCode::SingularMatrix: return USM_ERR_SINGULAR;
    case usm::ErrorCode::Unsupported: return USM_ERR_UNSUPPORTED;
    case usm::ErrorCode::OutOfRange: return USM_ERR_OUT_OF_RANGE;
    case usm::ErrorCode::BoundInapplicable: return USM_ERR_BOUND_INAPPLICABLE;
    case usm::ErrorCode::DenseCutoff: return USM_ERR_DENSE_CUTOFF;
    case usm::ErrorCode::ParseError: return USM_ERR_PARSE;
    case usm::ErrorCode::IoError: return USM_ERR_IO;
  }
  return USM_ERR_INTERNAL;
}

template <class F>
usm_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return USM_OK;
  } catch (const usm::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return USM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return USM_ERR_INTERNAL;
  }
}

usm_status null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return USM_ERR_INVALID_ARGUMENT;
}

usm::ExperimentConfig make_config(const usm::ProblemSpec& spec, const usm_study_options& o) {
  usm::ExperimentConfig cfg;
  cfg.problem = spec;
  if (spec.mu) cfg.mu_label = *spec.mu;
  if (o.n_values) {
    cfg.n_values.assign(o.n_values, o.n_values + o.n_count);
  } else {
    cfg.n_values = usm::geometric_grid(o.n_min, o.n_max, o.n_factor);
  }
  if (o.cauchy_factor) usm::parse_ratio(o.cauchy_factor, cfg.cauchy_num, cfg.cauchy_den);
  if (o.reference_bits != 0) cfg.reference_bits = o.reference_bits;
  return cfg;
}

}  // namespace

extern "C" {

const char* usm_last_error(void) { return g_last_error.c_str(); }

const char* usm_status_name(usm_status status) {
  switch (status) {
    case USM_OK: return "ok";
    case USM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case USM_ERR_PARSE: return "parse error";
    case USM_ERR_SINGULAR: return "singular matrix";
    case USM_ERR_IO: return "i/o error";
    case USM_ERR_DIMENSION: return "dimension mismatch";
    case USM_ERR_UNSUPPORTED: return "unsupported";
    case USM_ERR_OUT_OF_RANGE: return "out of range";
    case USM_ERR_BOUND_INAPPLICABLE: return "bound inapplicable";
    case USM_ERR_DENSE_CUTOFF: return "dense cutoff exceeded";
    case USM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void usm_study_options_init(usm_study_options* opts) {
  if (!opts) return;
  std::memset(opts, 0, sizeof *opts);
  opts->n_min = 10;
  opts->n_max = 1000;
  opts->n_factor = 1.2;
}

usm_status usm_problem_from_file(const char* path, usm_problem** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto spec = usm::parse_problem_file(path);
    usm::materialize<double>(spec);
    *out = new usm_problem{std::move(spec)};
  });
}

usm_status usm_problem_from_string(const char* text, usm_problem** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto spec = usm::parse_problem_string(text);
    usm::materialize<double>(spec);
    *out = new usm_problem{std::move(spec)};
  });
}

usm_status usm_problem_airy(const char* mu, usm_problem** out) {
  if (!mu) return null_arg("mu");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto spec = usm::airy_problem(mu);
    usm::materialize<double>(spec);
    *out = new usm_problem{std::move(spec)};
  });
}

void usm_problem_destroy(usm_problem* problem) { delete problem; }

usm_status usm_problem_shape(const usm_problem* problem, size_t* order, size_t* m) {
  if (!problem) return null_arg("problem");
  return guarded([&] {
    const auto p = usm::materialize<double>(problem->spec);
    if (order) *order = static_cast<size_t>(p.order);
    if (m) *m = usm::hessenberg_index(p);
  });
}

usm_status usm_solve(const usm_problem* problem, size_t n, double* coeffs) {
  if (!problem) return null_arg("problem");
  if (!coeffs) return null_arg("coeffs");
  return guarded([&] {
    const auto u = usm::solve_problem(usm::materialize<double>(problem->spec), n);
    std::copy(u.begin(), u.end(), coeffs);
  });
}

usm_status usm_eval_chebyshev(const double* coeffs, size_t len, double x, double* out) {
  if (!coeffs && len > 0) return null_arg("coeffs");
  if (!out) return null_arg("out");
  return guarded([&] {
    usm::UltrasphericalSeries<double> s{0, std::vector<double>(coeffs, coeffs + len)};
    *out = usm::clenshaw_eval(s, x);
  });
}

usm_status usm_airy_ai(double x, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = usm::airy_ai(x); });
}

usm_status usm_run_study(const usm_problem* problem, usm_study study,
                         const usm_study_options* opts, usm_records** out) {
  if (!problem) return null_arg("problem");
  if (!out) return null_arg("out");
  usm_study_options defaults;
  usm_study_options_init(&defaults);
  const usm_study_options& o = opts ? *opts : defaults;
  return guarded([&] {
    const auto cfg = make_config(problem->spec, o);
    auto* rec = new usm_records;
    try {
      switch (study) {
        case USM_STUDY_TOTAL: rec->rows = usm::total_error_study(cfg); break;
        case USM_STUDY_ROUNDING: rec->rows = usm::rounding_error_study(cfg); break;
        case USM_STUDY_CAUCHY: rec->rows = usm::cauchy_error_study(cfg); break;
        case USM_STUDY_QTAIL: rec->rows = usm::q_tail_study(cfg); break;
        case USM_STUDY_COND: rec->rows = usm::conditioning_study(cfg); break;
        default: usm::fail(usm::ErrorCode::InvalidArgument, "unknown study");
      }
    } catch (...) {
      delete rec;
      throw;
    }
    *out = rec;
  });
}

size_t usm_records_count(const usm_records* records) {
  return records ? records->rows.size() : 0;
}

usm_status usm_records_get(const usm_records* records, size_t i, usm_record* out) {
  if (!records) return null_arg("records");
  if (!out) return null_arg("out");
  if (i >= records->rows.size()) {
    g_last_error = "record index out of range";
    return USM_ERR_OUT_OF_RANGE;
  }
  const auto& r = records->rows[i];
  std::memset(out, 0, sizeof *out);
  out->n = r.n;
  out->k = r.k;
  out->m = r.m;
  auto put = [](const std::optional<double>& v, double& dst, int& has) {
    has = v.has_value();
    dst = v.value_or(0.0);
  };
  put(r.total_error, out->total_error, out->has_total_error);
  put(r.rounding_error, out->rounding_error, out->has_rounding_error);
  put(r.cauchy_error, out->cauchy_error, out->has_cauchy_error);
  put(r.q_tail_sum, out->q_tail_sum, out->has_q_tail_sum);
  put(r.kappa_inf, out->kappa_inf, out->has_kappa_inf);
  put(r.kappa_2, out->kappa_2, out->has_kappa_2);
  put(r.cond_Eb, out->cond_Eb, out->has_cond_Eb);
  put(r.rule_of_thumb, out->rule_of_thumb, out->has_rule_of_thumb);
  g_last_error.clear();
  return USM_OK;
}

usm_status usm_records_write_csv(const usm_records* records, const char* path) {
  if (!records) return null_arg("records");
  return guarded([&] {
    if (!path || std::strcmp(path, "-") == 0) {
      usm::write_csv(records->rows, std::cout);
      std::cout.flush();
    } else {
      usm::write_csv(records->rows, std::string(path));
    }
  });
}

void usm_records_destroy(usm_records* records) { delete records; }

}  // extern "C"
