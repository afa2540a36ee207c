#ifndef USM_USM_H
#define USM_USM_H

#include <stddef.h>

#if defined(__GNUC__)
#define USM_API __attribute__((visibility("default")))
#else
#define USM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct usm_problem usm_problem;
typedef struct usm_records usm_records;

typedef enum {
  USM_OK = 0,
  USM_ERR_INVALID_ARGUMENT = 1,
  USM_ERR_PARSE = 2,
  USM_ERR_SINGULAR = 3,
  USM_ERR_IO = 4,
  USM_ERR_DIMENSION = 5,
  USM_ERR_UNSUPPORTED = 6,
  USM_ERR_OUT_OF_RANGE = 7,
  USM_ERR_BOUND_INAPPLICABLE = 8,
  USM_ERR_DENSE_CUTOFF = 9,
  USM_ERR_INTERNAL = 10
} usm_status;

typedef enum {
  USM_STUDY_TOTAL = 0,
  USM_STUDY_ROUNDING = 1,
  USM_STUDY_CAUCHY = 2,
  USM_STUDY_QTAIL = 3,
  USM_STUDY_COND = 4
} usm_study;

/* n grid: explicit values when n_values != NULL, otherwise the geometric
   grid ceil(n_min * n_factor^i) up to n_max. */
typedef struct {
  const size_t* n_values;
  size_t n_count;
  size_t n_min;
  size_t n_max;
  double n_factor;
  const char* cauchy_factor; /* decimal text, e.g. "1.01"; NULL for the default */
  long reference_bits;       /* 0 for 256 */
} usm_study_options;

/* Field presence is reported through the has_* flags. */
typedef struct {
  size_t n;
  double total_error, rounding_error, cauchy_error, q_tail_sum;
  double kappa_inf, kappa_2, cond_Eb, rule_of_thumb;
  int has_total_error, has_rounding_error, has_cauchy_error, has_q_tail_sum;
  int has_kappa_inf, has_kappa_2, has_cond_Eb, has_rule_of_thumb;
  size_t k, m;
} usm_record;

/* Message for the last failing call on this thread; never NULL. */
USM_API const char* usm_last_error(void);
USM_API const char* usm_status_name(usm_status status);

USM_API void usm_study_options_init(usm_study_options* opts);

USM_API usm_status usm_problem_from_file(const char* path, usm_problem** out);
USM_API usm_status usm_problem_from_string(const char* text, usm_problem** out);
USM_API usm_status usm_problem_airy(const char* mu, usm_problem** out);
USM_API void usm_problem_destroy(usm_problem* problem);

/* Hessenberg index m and order N of the problem. */
USM_API usm_status usm_problem_shape(const usm_problem* problem, size_t* order, size_t* m);

/* Binary64 solve at size n; writes n Chebyshev coefficients. */
USM_API usm_status usm_solve(const usm_problem* problem, size_t n, double* coeffs);

/* sum_k c[k] T_k(x) */
USM_API usm_status usm_eval_chebyshev(const double* coeffs, size_t len, double x, double* out);

/* Ai(x) correctly rounded to binary64, |x| <= 64. */
USM_API usm_status usm_airy_ai(double x, double* out);

USM_API usm_status usm_run_study(const usm_problem* problem, usm_study study,
                         const usm_study_options* opts, usm_records** out);
USM_API size_t usm_records_count(const usm_records* records);
USM_API usm_status usm_records_get(const usm_records* records, size_t i, usm_record* out);
/* path "-" or NULL writes to stdout. */
USM_API usm_status usm_records_write_csv(const usm_records* records, const char* path);
USM_API void usm_records_destroy(usm_records* records);

#ifdef __cplusplus
}
#endif

#endif
