#ifndef QMHEAT_H
#define QMHEAT_H

/**
 * qmheat — heat exchange between a continuously measured qubit (or few-level
 * system) and its thermal baths.
 *
 * Units: hbar = kB = 1; energies in units of the qubit splitting Delta, times
 * in 1/Delta, currents in Delta^2.
 *
 * All functions return QMH_OK on success; on failure they return a status
 * code and leave a human-readable message in qmh_last_error() (thread-local).
 * Strings returned through char** out-parameters are heap-allocated and must
 * be released with qmh_string_free().
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qmh_status {
    QMH_OK = 0,
    QMH_ERR_INVALID = 1,     /* argument violates a contract */
    QMH_ERR_DOMAIN = 2,      /* value outside a function's domain */
    QMH_ERR_DEGENERATE = 3,  /* no unique steady state */
    QMH_ERR_NUMERIC = 4,     /* non-finite values or residual too large */
    QMH_ERR_UNCONVERGED = 5, /* quantity did not settle on the horizon */
    QMH_ERR_CONFIG = 6,      /* malformed scenario config */
    QMH_ERR_IO = 7           /* filesystem failure */
} qmh_status;

/** Message of the most recent failure on this thread ("" if none). */
const char* qmh_last_error(void);

/** Library version string. */
const char* qmh_version(void);

/** Releases a string returned by this library. NULL is ignored. */
void qmh_string_free(char* s);

/* ----------------------------------------------------------------------- */
/* Qubit model: H = (Delta/2) sigma_z, aggregated bath rates Gamma_+/-, and  */
/* continuous measurement of the pure state (theta, phi) at strength gamma. */
/* ----------------------------------------------------------------------- */

typedef struct qmh_qubit qmh_qubit;

/**
 * Creates a qubit model from aggregated rates. Requires delta > 0,
 * 0 <= gamma_minus <= gamma_plus, gamma >= 0, theta in [0, pi].
 */
qmh_status qmh_qubit_create(double delta, double gamma_plus, double gamma_minus, double gamma,
                            double theta, double phi, qmh_qubit** out);

void qmh_qubit_free(qmh_qubit* q);

/** Aggregated rates; any out-pointer may be NULL. */
qmh_status qmh_qubit_rates(const qmh_qubit* q, double* gamma_plus, double* gamma_minus,
                           double* gamma_tilde_plus);

/** Closed-form steady-state Bloch vector. */
qmh_status qmh_qubit_steady_state(const qmh_qubit* q, double* x, double* y, double* z);

/** Closed-form steady-state measurement heat current. */
qmh_status qmh_qubit_steady_current(const qmh_qubit* q, double* j);

/** Same current through the generic Lindblad engine (cross-check path). */
qmh_status qmh_qubit_steady_current_engine(const qmh_qubit* q, double* j);

/** Bounds 0 <= J_M <= Delta*gamma*Gamma_- / (4*Gamma_+ + 2*gamma). */
qmh_status qmh_qubit_current_bounds(const qmh_qubit* q, double* lo, double* hi);

/** Peak excess heat (equator measurement switched on in the bath steady state). */
qmh_status qmh_qubit_excess_heat_max(const qmh_qubit* q, double* q_ex);

/* ----------------------------------------------------------------------- */
/* Heat-current time series J_M(t) along an RK4 Bloch trajectory.           */
/* ----------------------------------------------------------------------- */

typedef struct qmh_series qmh_series;

/** Integrates from the Bloch state (x0, y0, z0) over [0, t_end] with step dt. */
qmh_status qmh_qubit_heat_series(const qmh_qubit* q, double x0, double y0, double z0, double t_end,
                                 double dt, qmh_series** out);

void qmh_series_free(qmh_series* s);

size_t qmh_series_length(const qmh_series* s);

/** Copies up to len samples into times/values (either may be NULL to skip). */
qmh_status qmh_series_copy(const qmh_series* s, double* times, double* values, size_t len);

/** Closed-form steady current the series relaxes toward. */
qmh_status qmh_series_steady_value(const qmh_series* s, double* j);

/**
 * Excess heat: Simpson quadrature of J_M(t) - J_M over the stored grid plus
 * an analytic exponential tail; tail_bound reports the tail-estimate bound.
 * Fails with QMH_ERR_UNCONVERGED when the series has not settled at t_end.
 */
qmh_status qmh_series_excess_heat(const qmh_series* s, double* value, double* tail_bound);

/* ----------------------------------------------------------------------- */
/* Scalar helpers.                                                          */
/* ----------------------------------------------------------------------- */

/** Ohmic spectral density I(omega) = 2*kappa*omega*exp(-omega/cutoff). */
qmh_status qmh_spectral_density(double omega, double kappa, double cutoff, double* out);

/** Bose-Einstein occupation 1/(exp(energy/temperature) - 1); 0 at T = 0. */
qmh_status qmh_bose_occupation(double energy, double temperature, double* out);

/* ----------------------------------------------------------------------- */
/* Three-level Lambda system with hot and cold baths.                       */
/* ----------------------------------------------------------------------- */

/**
 * Steady-state measurement current for each of the n measurement strengths
 * gammas[i] >= 0. Output arrays (length n) may individually be NULL.
 * Populations refer to the basis (|0>, |1>, |2>) with energies
 * (0, delta - delta_small, delta).
 */
qmh_status qmh_lambda_sweep(double delta, double delta_small, double temp_hot, double temp_cold,
                            double kappa_hot, double kappa_cold, double cutoff, double phi,
                            const double* gammas, size_t n, double* currents, double* rho00,
                            double* rho11, double* rho22);

/** Measurement-free inversion criterion: *out = 1 iff delta/T_h < delta_small/T_c. */
qmh_status qmh_lambda_inversion_predicted(double delta, double delta_small, double temp_hot,
                                          double temp_cold, int* out);

/* ----------------------------------------------------------------------- */
/* Scenario engine (the CLI is a thin wrapper over these two calls).        */
/* ----------------------------------------------------------------------- */

/**
 * Runs one scenario described by a JSON config; see the README for the
 * schema. *out_text receives the rendered CSV or JSON artifact. out_gnuplot
 * (optional, may be NULL) receives a gnuplot script that plots the CSV;
 * out_warnings (optional) receives newline-joined model warnings ("" if none).
 */
qmh_status qmh_scenario_run(const char* config_json, char** out_text, char** out_gnuplot,
                            char** out_warnings);

/**
 * Deterministic cross-check battery (closed forms vs the generic engine vs
 * quadrature). *out_report receives one line per check plus a summary line.
 * Returns QMH_OK when every check passes, QMH_ERR_NUMERIC otherwise.
 */
qmh_status qmh_selftest(char** out_report);

#ifdef __cplusplus
}
#endif

#endif /* QMHEAT_H */
