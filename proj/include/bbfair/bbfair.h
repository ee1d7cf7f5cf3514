/* C interface to the bottleneck-fair allocation solver. */
#ifndef BBFAIR_H
#define BBFAIR_H

#include <stddef.h>

#if defined(_WIN32)
#define BBF_API __declspec(dllexport)
#else
#define BBF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct bbf_instance bbf_instance;
typedef struct bbf_solve_result bbf_solve_result;

typedef enum bbf_status {
  BBF_OK = 0,
  BBF_ERR_NULL_ARGUMENT = 1,
  BBF_ERR_INPUT = 2,
  BBF_ERR_DOMAIN = 3,
  BBF_ERR_INFEASIBLE = 4,
  BBF_ERR_NUMERICAL = 5,
  BBF_ERR_SIZE_GUARD = 6,
  BBF_ERR_CONSISTENCY = 7,
  BBF_ERR_BUFFER_TOO_SMALL = 8,
  BBF_ERR_INTERNAL = 9
} bbf_status;

/* Message for the last failing call on this thread; "" if none. */
BBF_API const char* bbf_last_error(void);
BBF_API const char* bbf_status_name(bbf_status status);

/* Strings returned through char** are owned by the caller. */
BBF_API void bbf_string_free(char* s);

/* Instances. Constructors validate the instance unless stated otherwise. */
BBF_API bbf_status bbf_instance_from_json(const char* text, bbf_instance** out);
BBF_API bbf_status bbf_instance_from_file(const char* path, bbf_instance** out);
BBF_API bbf_status bbf_instance_from_fixture(const char* name, bbf_instance** out);
/* Two users, `middles` middle resources. */
BBF_API bbf_status bbf_instance_utilization(size_t middles, bbf_instance** out);
/* requirements is row-major, users x resources. */
BBF_API bbf_status bbf_instance_create(size_t users, size_t resources, const double* entitlements,
                                       const double* requirements, bbf_instance** out);
/* Same as the constructors above but scales entitlements to sum 1 first. */
BBF_API bbf_status bbf_instance_from_json_renormalized(const char* text, bbf_instance** out);
BBF_API bbf_status bbf_instance_from_file_renormalized(const char* path, bbf_instance** out);
BBF_API void bbf_instance_free(bbf_instance* inst);
BBF_API size_t bbf_instance_users(const bbf_instance* inst);
BBF_API size_t bbf_instance_resources(const bbf_instance* inst);
BBF_API bbf_status bbf_instance_to_json(const bbf_instance* inst, char** out);

BBF_API size_t bbf_fixture_count(void);
/* NULL when index is out of range. */
BBF_API const char* bbf_fixture_name(size_t index);

typedef struct bbf_options {
  double eps_feasible;
  double eps_bottleneck;
  double eps_njc;
  double t_max;
  int remove_dominated;
} bbf_options;

BBF_API void bbf_options_default(bbf_options* opts);

/* Solving. A solve that fails verification still returns BBF_OK; check
   bbf_solve_result_verified. */
BBF_API bbf_status bbf_solve(const bbf_instance* inst, const bbf_options* opts, bbf_solve_result** out);
BBF_API void bbf_solve_result_free(bbf_solve_result* res);
BBF_API int bbf_solve_result_verified(const bbf_solve_result* res);
BBF_API int bbf_solve_result_polished(const bbf_solve_result* res);
BBF_API const char* bbf_solve_result_termination(const bbf_solve_result* res);
/* Copies N values into out; BBF_ERR_BUFFER_TOO_SMALL if len < N. */
BBF_API bbf_status bbf_solve_result_allocation(const bbf_solve_result* res, double* out, size_t len);

enum { BBF_RENDER_EXACT = 1, BBF_RENDER_TRACE = 2 };
BBF_API bbf_status bbf_solve_result_text(const bbf_solve_result* res, int flags, char** out);
BBF_API bbf_status bbf_solve_result_json(const bbf_solve_result* res, int flags, char** out);
/* t,x_1..x_N,f,min_slack; every stride-th point plus the last. */
BBF_API bbf_status bbf_solve_result_trajectory_csv(const bbf_solve_result* res, size_t stride, char** out);

/* Parses a JSON array, an object with key "x", or a comma list into out. */
BBF_API bbf_status bbf_parse_allocation(const char* text, double* out, size_t capacity, size_t* len);

/* Verification report for x. passed receives 1 or 0. */
BBF_API bbf_status bbf_verify(const bbf_instance* inst, const double* x, size_t len, const bbf_options* opts,
                              int json, char** report, int* passed);

/* Enumeration of fair allocations for small instances (at most 6 x 6). */
BBF_API bbf_status bbf_enumerate(const bbf_instance* inst, int json, char** out, size_t* witnesses);

/* Bottleneck-fair versus DRF. middles > 0 is echoed as the middle-resource
   count of a utilization instance. */
BBF_API bbf_status bbf_compare(const bbf_instance* inst, const bbf_options* opts, size_t middles, int json,
                               char** out);

#ifdef __cplusplus
}
#endif

#endif
