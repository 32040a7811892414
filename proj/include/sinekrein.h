/* sinekrein: finite sections, resolvents and Krein factorization of the
 * half-line sine-kernel operator  (S f)(x) = f(x) - mu int_0^xi h(x-t) f(t) dt,
 * h(x) = sin(pi x)/(pi x), 0 < mu < 1.
 *
 * C API: opaque handles, status codes, thread-local error messages. All
 * computations are deterministic for fixed inputs.
 */
#ifndef SINEKREIN_H
#define SINEKREIN_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sk_status {
    SK_OK = 0,
    SK_ERR_CONFIG = 1,     /* invalid parameter (mu outside (0,1), xi <= 0, ...) */
    SK_ERR_NUMERICAL = 2,  /* positive definiteness / numerical contract lost */
    SK_ERR_DIMENSION = 3,  /* array length mismatch */
    SK_ERR_STEP_SIZE = 4,  /* ODE step too large for the coefficient table */
    SK_ERR_BRANCH = 5,     /* branch endpoint of a boundary-value formula */
    SK_ERR_POLE = 6,       /* pole of a closed-form expression */
    SK_ERR_INVALID = 7,    /* null handle / bad argument */
    SK_ERR_INTERNAL = 8
} sk_status;

/* Message for the last failing call on this thread. */
const char* sk_last_error(void);

typedef struct sk_grid sk_grid;
typedef struct sk_section sk_section;
typedef struct sk_ladder sk_ladder;
typedef struct sk_trajectory sk_trajectory;
typedef struct sk_report sk_report;

/* ---- quadrature grids ---- */

sk_status sk_grid_create(double xi, int panels_per_unit, int order, sk_grid** out);
int sk_grid_size(const sk_grid* grid);
/* Arrays of length sk_grid_size(); any pointer may be NULL to skip. */
sk_status sk_grid_copy(const sk_grid* grid, double* nodes, double* weights, int* panel);
void sk_grid_destroy(sk_grid* grid);

double sk_sinc_kernel(double x);
/* M(x) = 1/2 - mu int_0^x sin(pi s)/(pi s) ds */
sk_status sk_m_function(double x, double mu, double* out);

/* ---- finite sections (0 < mu < 1) ---- */

sk_status sk_section_create(double mu, double xi, int panels_per_unit, int order,
                            sk_section** out);
int sk_section_size(const sk_section* sec);
sk_status sk_section_apply_inverse(const sk_section* sec, const double* f, int n, double* out);
/* Nystrom-extended resolvent value R_xi(x, t). */
sk_status sk_section_resolvent(const sk_section* sec, double x, double t, double* out);
sk_status sk_section_corners(const sk_section* sec, double* r_xi_xi, double* r_xi_0);
void sk_section_destroy(sk_section* sec);

/* ---- incremental corner ladder ----
 * One bordered Cholesky pass over [0, x_max] yields, per panel boundary x:
 * B(x) = R_x(x,0), R_x(x,x), q1(x), q2(x). */

sk_status sk_ladder_create(double mu, double x_max, int panels_per_unit, int order,
                           sk_ladder** out);
int sk_ladder_count(const sk_ladder* ladder);
/* Arrays of length sk_ladder_count(); any pointer may be NULL. */
sk_status sk_ladder_copy(const sk_ladder* ladder, double* x, double* b, double* diag,
                         double* q1, double* q2);
void sk_ladder_destroy(sk_ladder* ladder);

/* ---- closed-form spectral data (two-level spectral density) ---- */

sk_status sk_pi_closed(double mu, double z_re, double z_im, double* re, double* im);
/* Independent contour-quadrature evaluation (Im z > 0). */
sk_status sk_pi_quadrature(double mu, double z_re, double z_im, int panels, int order,
                           double* re, double* im);
sk_status sk_weyl_v(double mu, double z_re, double z_im, double* re, double* im);
sk_status sk_hat_pi_closed(double mu, double z_re, double z_im, double* re, double* im);

/* ---- Krein system trajectories ----
 * dP/dx = (iz/2) P - B(x) Ps,  dPs/dx = -B(x) P  (Ps the starred component);
 * init (1,1), or (1/2,-1/2) when hat != 0. step = 0 picks the default. */

sk_status sk_krein_integrate(const sk_ladder* ladder, double z_re, double z_im, double x_max,
                             int hat, double step, sk_trajectory** out);
int sk_trajectory_count(const sk_trajectory* traj);
sk_status sk_trajectory_copy(const sk_trajectory* traj, double* x, double* p_re, double* p_im,
                             double* ps_re, double* ps_im);
void sk_trajectory_destroy(sk_trajectory* traj);

/* ODE-side spectral estimators (dual coupling orientation; see README).
 * Requires Im z > 0. Any output pointer may be NULL. */
sk_status sk_spectral_estimates(const sk_ladder* ladder, double z_re, double z_im,
                                double x_max, double* pi_re, double* pi_im, double* v_re,
                                double* v_im, double* hat_pi_re, double* hat_pi_im,
                                double* hat_p_end_abs);

/* ---- composite reports (JSON-backed) ---- */

sk_status sk_quad_report(double xi, int panels_per_unit, int order, sk_report** out);
sk_status sk_resolvent_report(double mu, double xi, int panels_per_unit, int order,
                              const double* probe_x, const double* probe_t, int n_probes,
                              sk_report** out);
sk_status sk_factor_report(double mu, double xi, int panels_per_unit, int order,
                           sk_report** out);
sk_status sk_asymptotics_report(double mu, double t_min, double t_max, double dt, int order,
                                sk_report** out);
sk_status sk_krein_ode_report(double mu, double z_re, double z_im, double x_max, int hat,
                              double ladder_step, int order, sk_report** out);
sk_status sk_obstruction_report(double mu, const double* t_list, int n_t, const double* z_re,
                                const double* z_im, int n_z, sk_report** out);
sk_status sk_volterra_report(double mu, double xi, int panels_per_unit, int order,
                             sk_report** out);
/* config_json: JSON object mirroring the suite TOML (may be "{}"). */
sk_status sk_suite_run(const char* config_json, sk_report** out);

/* Serialized report; pointer owned by the report handle. */
const char* sk_report_json(const sk_report* report);
/* 1 = all checks passed, 0 = some failed, -1 = report carries no checks. */
int sk_report_pass(const sk_report* report);
void sk_report_destroy(sk_report* report);

#ifdef __cplusplus
}
#endif

#endif /* SINEKREIN_H */
