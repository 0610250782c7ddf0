#ifndef DEGENWAVE_C_H
#define DEGENWAVE_C_H

#include <stddef.h>

#if defined(_WIN32)
#define DW_API __declspec(dllexport)
#else
#define DW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; the values match degenwave::ErrorCode. */
enum dw_status {
    DW_OK = 0,
    DW_E_INPUT_DOMAIN = 1,
    DW_E_CAPABILITY = 2,
    DW_E_DOMAIN = 3,
    DW_E_PARAMETER = 4,
    DW_E_HORIZON = 5,
    DW_E_INTEGRATION = 6,
    DW_E_SINGULARITY = 7,
    DW_E_FOCAL_POINT = 8,
    DW_E_PERIODIZATION = 9,
    DW_E_RESOLUTION = 10,
    DW_E_CONFIGURATION = 11,
    DW_E_CADENCE = 12,
    DW_E_PARSE = 13,
    DW_E_IO = 14,
    DW_E_INTERNAL = 15
};

typedef struct dw_config dw_config;
typedef struct dw_report dw_report;

/* Message of the last failing call on this thread ("" after success). */
DW_API const char* dw_last_error(void);
DW_API const char* dw_status_name(int status);

/* Strings returned through char** are owned by the caller and released with dw_string_free. */
DW_API void dw_string_free(char* s);

DW_API int dw_config_new(dw_config** out);
DW_API int dw_config_parse(const char* text, dw_config** out);
DW_API int dw_config_load(const char* path, dw_config** out);
/* Restores the config echoed by dw_plan_json. */
DW_API int dw_config_from_plan(const char* plan_json, dw_config** out);
/* One assignment in config syntax, e.g. ("lambda0", "[32, 64]"). */
DW_API int dw_config_set(dw_config* config, const char* key, const char* value);
DW_API int dw_config_validate(const dw_config* config);
DW_API int dw_config_to_string(const dw_config* config, char** out);
DW_API void dw_config_free(dw_config* config);

/* Full pipeline over every lambda0 of the config. */
DW_API int dw_run(const dw_config* config, dw_report** out);
DW_API int dw_report_pass(const dw_report* report, int* pass);
DW_API int dw_report_points(const dw_report* report, size_t* count);
DW_API int dw_report_json(const dw_report* report, char** out);
DW_API int dw_report_timing_json(const dw_report* report, char** out);
DW_API int dw_report_series_csv(const dw_report* report, size_t point, char** out);
DW_API void dw_report_free(dw_report* report);

/* Single-stage JSON documents. */
DW_API int dw_plan_json(const dw_config* config, char** out);
DW_API int dw_toy_json(const dw_config* config, char** out);
DW_API int dw_toy_csv(const dw_config* config, char** out);
DW_API int dw_phase_json(const dw_config* config, char** out);
DW_API int dw_packet_json(const dw_config* config, char** out);
DW_API int dw_validate_symbol_json(const char* spec, char** out);
/* Queries one per line: "<gamma> <upsilon|-> <s> <s'>". */
DW_API int dw_table_check_json(const char* queries, char** out);

/* L psi for samples psi(x_j), x_j = 2 pi j / n, stored as n interleaved (re, im) pairs.
   upsilon may be NULL or "" for the non-dissipative operator; out holds 2 n doubles. */
DW_API int dw_apply_L(const char* gamma, const char* shear, const char* upsilon, double kappa, double lambda0,
                      double t, const double* psi, size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif
