/* C interface to the Berezin-Toeplitz WKB library.
 *
 * All functions return a btw_status; on failure btw_last_error() holds a
 * thread-local message describing what went wrong. Strings returned through
 * out-parameters are owned by the caller and released with btw_free_string;
 * double arrays with btw_free_doubles. Handles are opaque and released with
 * their matching _free function. Configuration is passed as JSON text; see
 * the README for the schema.
 */
#ifndef BTWKB_H
#define BTWKB_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  BTW_OK = 0,
  BTW_EINVAL = 1,   /* bad arguments or malformed configuration */
  BTW_EMATH = 2,    /* numerical failure (degenerate minimum, resonance, ...) */
  BTW_EIO = 3,      /* filesystem failure */
  BTW_EINTERNAL = 4 /* unexpected error */
} btw_status;

const char* btw_version(void);
/* Message for the last failing call on this thread; empty string if none. */
const char* btw_last_error(void);

void btw_free_string(char* s);
void btw_free_doubles(double* p);

/* ---- asymptotic expansion at a well ---------------------------------- */

typedef struct btw_wkb btw_wkb;

/* config: {"family": {...}, "K": <int>, "D": <int, optional>} */
btw_status btw_wkb_build(const char* config_json, btw_wkb** out);
void btw_wkb_free(btw_wkb* w);

/* Eigenvalue correction lambda_k, 0 <= k <= K. */
btw_status btw_wkb_lambda(const btw_wkb* w, int k, double* out);
/* Summed eigenvalue series at finite N, truncated at rank kmax. */
btw_status btw_wkb_lambda_at(const btw_wkb* w, double N, int kmax, double* out);
/* Full report (eigenvalue series, defects, envelope fit) as JSON text. */
btw_status btw_wkb_report_json(const btw_wkb* w, char** out);

/* ---- finite-N quantization ------------------------------------------- */

/* Spectrum of the Toeplitz matrix of config["family"] at level N,
 * ascending. The caller receives the array and its length. */
btw_status btw_spectrum(const char* config_json, int N, double** eigs, int* len);

/* Residual of the embedded quasimode against the matrix at level N.
 * Any of the out-pointers may be NULL. config additionally honours
 * "K", "D", "kmax", "disk_radius". */
btw_status btw_quasimode_residual(const char* config_json, int N, double* residual,
                                  double* lambda_N, double* min_eig);

/* ---- experiment driver ------------------------------------------------ */

/* Run the experiment described by config ("experiment" selects wkb,
 * spectrum, residual-sweep, gap-sweep, count or profile), writing CSV,
 * JSON and SVG artifacts into out_dir. The report JSON is returned in
 * *report_json when non-NULL. */
btw_status btw_experiment_run(const char* config_json, const char* out_dir, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* BTWKB_H */
