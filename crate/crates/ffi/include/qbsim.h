#ifndef QBSIM_H
#define QBSIM_H

#include <stddef.h>
#include <stdint.h>

// Status codes. The non-zero values for config and numerical errors match the CLI exit codes.
typedef enum QbStatus {
  QB_STATUS_OK = 0,
  QB_STATUS_IO = 1,
  QB_STATUS_CONFIG = 2,
  QB_STATUS_NUMERICAL = 3,
  QB_STATUS_NULL_ARGUMENT = 4,
  QB_STATUS_BUFFER_TOO_SMALL = 5,
  QB_STATUS_INTERNAL = 6,
} QbStatus;

// Schrodinger model used by [`qb_evolve`].
typedef enum QbModel {
  QB_MODEL_EFFECTIVE = 0,
  QB_MODEL_FULL = 1,
} QbModel;

typedef enum QbColumn {
  QB_COLUMN_TIME = 0,
  QB_COLUMN_P_DARK = 1,
  QB_COLUMN_NORM = 2,
  QB_COLUMN_WORK = 3,
  QB_COLUMN_POWER = 4,
} QbColumn;

// System parameters.
typedef struct QbParams QbParams;

// Sampled trajectory with columns [`QbColumn`].
typedef struct QbSeries QbSeries;

// One atom-photon bound state. `above_band` is 1 above the band, 0 below it.
typedef struct QbBoundState {
  double energy_re;
  double energy_im;
  double residue_re;
  double residue_im;
  double amplitude_re;
  double amplitude_im;
  int above_band;
} QbBoundState;

typedef struct QbDecayFit {
  double intercept;
  double rate;
  double r_abs;
  double t_first;
  double t_last;
  size_t n_points;
} QbDecayFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread, or null. Owned by the library.
const char *qb_last_error(void);

// Library version as a static NUL-terminated string.
const char *qb_version(void);

// Parameters of a built-in figure preset (`"fig2"`, `"fig3a"`, ..., `"fig7"`).
//
// # Safety
// `figure` must be a NUL-terminated string and `out` a valid pointer.
enum QbStatus qb_params_preset(const char *figure, struct QbParams **out);

// Parameters from a scenario config document (`"schema_version": 1`).
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum QbStatus qb_params_from_json(const char *json, struct QbParams **out);

// Release parameters. Null is ignored.
//
// # Safety
// `params` must come from this library and not be used afterwards.
void qb_params_free(struct QbParams *params);

// Read a parameter by its config name; `"g"` and `"n_cavities"` are also accepted.
//
// # Safety
// Pointers must be valid; `name` NUL-terminated.
enum QbStatus qb_params_get(const struct QbParams *params, const char *name, double *value);

// Set a parameter by its config name and revalidate. `"g"` sets a dark-tuned total coupling;
// `"n_cavities"` must be an odd integer >= 3. On failure the parameters are unchanged. The dark
// condition is not enforced here; calls that need the dark state reject detuned couplings.
//
// # Safety
// Pointers must be valid; `name` NUL-terminated.
enum QbStatus qb_params_set(struct QbParams *params, const char *name, double value);

// Exact atom energies (three complex values) and the index of the dark state.
//
// # Safety
// `re` and `im` must point to 3 writable doubles; `dark_index` to one `size_t`.
enum QbStatus qb_atom_spectrum(const struct QbParams *params,
                               double *re,
                               double *im,
                               size_t *dark_index);

// Bound states for dark energy `e1`. Writes up to 2 states (above the band first) and their count.
//
// # Safety
// `states` must point to 2 writable [`QbBoundState`] values; `count` to one `size_t`.
enum QbStatus qb_bound_states(const struct QbParams *params,
                              double e1_re,
                              double e1_im,
                              struct QbBoundState *states,
                              size_t *count);

// Evolve on the grid `0, dt, ..., t_max` and record dark population, norm, ergotropy and power.
// `photon_site < 0` starts from the atom in level `m` instead of a photon.
//
// # Safety
// `out` must be a valid pointer; the series is released with [`qb_series_free`].
enum QbStatus qb_evolve(const struct QbParams *params,
                        enum QbModel model,
                        int64_t photon_site,
                        double t_max,
                        double dt,
                        struct QbSeries **out);

// Number of samples in a series (0 for null).
//
// # Safety
// `series` must be null or a live series.
size_t qb_series_len(const struct QbSeries *series);

// Copy one column into `buf`, which must hold at least [`qb_series_len`] doubles.
//
// # Safety
// `buf` must point to `capacity` writable doubles.
enum QbStatus qb_series_copy(const struct QbSeries *series,
                             enum QbColumn column,
                             double *buf,
                             size_t capacity);

// Release a series. Null is ignored.
//
// # Safety
// `series` must come from this library and not be used afterwards.
void qb_series_free(struct QbSeries *series);

// Fit `ln P = a - rate t` to the envelope peaks after `t_min`, or to every sample if `raw != 0`.
//
// # Safety
// `t` and `p` must point to `n` doubles; `out` to one [`QbDecayFit`].
enum QbStatus qb_fit_decay(const double *t,
                           const double *p,
                           size_t n,
                           double t_min,
                           int raw,
                           struct QbDecayFit *out);

// Write the data files of one figure into `out_dir`, as `qbsim reproduce` does.
//
// # Safety
// Both arguments must be NUL-terminated strings.
enum QbStatus qb_reproduce(const char *figure, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QBSIM_H */
