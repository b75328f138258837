/* C interface to the converter fault-location simulator.
 *
 * All entry points are thread-safe as long as each handle is used from one
 * thread at a time. Strings returned for a handle stay valid until the next
 * call on that handle or until it is freed; mmcsim_last_error() is
 * thread-local.
 */
#ifndef MMCSIM_H
#define MMCSIM_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mmcsim_status {
  MMCSIM_OK = 0,
  MMCSIM_ERR_INTERNAL = 1,
  MMCSIM_ERR_CONFIG = 2,   /* malformed or out-of-range configuration */
  MMCSIM_ERR_DIVERGED = 3, /* simulation left the sane numeric range */
  MMCSIM_ERR_WRONG_SM = 4, /* a module was flagged but not the seeded one */
  MMCSIM_ERR_INVALID_ARG = 5,
  MMCSIM_ERR_IO = 6
} mmcsim_status;

typedef struct mmcsim_scenario mmcsim_scenario;

const char* mmcsim_version(void);

/* Message for the most recent failure on this thread (creation errors etc). */
const char* mmcsim_last_error(void);

/* Comma-separated list of built-in scenario names. */
const char* mmcsim_builtin_scenarios(void);

/* Builds a scenario. builtin_name selects a built-in base (NULL for the
 * defaults); config_json, when non-NULL, is applied on top of it. */
mmcsim_status mmcsim_scenario_create(const char* builtin_name,
                                     const char* config_json,
                                     mmcsim_scenario** out);

void mmcsim_scenario_free(mmcsim_scenario* s);

const char* mmcsim_scenario_name(const mmcsim_scenario* s);

/* Runs the scenario. When out_dir is non-NULL the time series CSV and the
 * summary JSON are written there (the directory is created if missing).
 * Returns MMCSIM_ERR_WRONG_SM when a fault was seeded and a different module
 * was flagged; the summary is still available in that case. */
mmcsim_status mmcsim_scenario_run(mmcsim_scenario* s, const char* out_dir);

/* JSON summary of the last run (NULL before the first run). */
const char* mmcsim_scenario_summary(const mmcsim_scenario* s);

/* Message for the most recent failure on this handle. */
const char* mmcsim_scenario_error(const mmcsim_scenario* s);

/* Writes the threshold-sweep CSVs. case_ids is a comma-separated list such
 * as "1,2,5" or NULL for all cases. */
mmcsim_status mmcsim_sweep(const char* case_ids, const char* out_dir);

/* Largest ac current amplitude (amperes, written to *out) at which n_faulty
 * open-switch modules still force the arm current unipolar. fault_type is 1
 * for a top-switch fault, 2 for a bottom-switch fault. */
mmcsim_status mmcsim_unipolarity_threshold(double u_dc, int n_sm, double f_c,
                                           double l_s, double m, double cos_phi,
                                           int n_faulty, int fault_type,
                                           double* out);

#ifdef __cplusplus
}
#endif

#endif /* MMCSIM_H */
