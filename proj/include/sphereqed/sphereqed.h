/* C interface to the sphereqed library. All functions return a status code;
 * on failure, sqed_last_error() describes the most recent error on the
 * calling thread. Output arrays are provided by the caller. */
#ifndef SPHEREQED_H
#define SPHEREQED_H

#include <stddef.h>

#if defined(_WIN32)
#define SQED_API __declspec(dllexport)
#elif defined(__GNUC__)
#define SQED_API __attribute__((visibility("default")))
#else
#define SQED_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  SQED_OK = 0,
  SQED_ERR_INVALID_ARGUMENT = 1,
  SQED_ERR_DOMAIN = 2,
  SQED_ERR_RANGE = 3,
  SQED_ERR_NO_CONVERGENCE = 4,
  SQED_ERR_BASIN_ESCAPE = 5,
  SQED_ERR_WRONG_HALF_PLANE = 6,
  SQED_ERR_NO_RESONANCE = 7,
  SQED_ERR_QUADRATURE = 8,
  SQED_ERR_INTERNAL = 9
} sqed_status;

typedef enum { SQED_TE = 0, SQED_TM = 1 } sqed_polarization;
typedef enum { SQED_WG = 0, SQED_SG = 1 } sqed_kind;
typedef enum { SQED_RADIAL = 0, SQED_TANGENTIAL = 1 } sqed_orientation;
typedef enum { SQED_BELOW_GAP = 0, SQED_IN_GAP = 1, SQED_ABOVE_GAP = 2 } sqed_regime;

/* Material plus sphere radius (lambda_ref units). */
typedef struct sqed_sphere sqed_sphere;

typedef struct {
  double omega_re;
  double omega_im; /* -delta */
  int pol;
  int l;
  int radial_order; /* 0 for SG */
  int kind;
  double delta_rad;
  double delta_abs;
  double q_tot;
  double q_rad;
  double q_abs;
  double residual;
} sqed_resonance;

typedef struct {
  double delta_r;      /* atom-surface distance, lambda_ref */
  double omega_a;      /* transition frequency, omega_ref */
  int orientation;     /* sqed_orientation */
  double a0_over_omega; /* free-space rate; time evolution only */
} sqed_atom;

typedef struct {
  double rate_ratio;
  double shift_ratio;
  int l_max_used;
  double tail_estimate;
  int converged;
} sqed_decay;

typedef struct {
  double bm_re, bm_im;
  double bn_re, bn_im;
  double cm_re, cm_im;
  double cn_re, cn_im;
} sqed_mie;

SQED_API const char *sqed_version(void);
SQED_API const char *sqed_status_string(sqed_status status);
SQED_API const char *sqed_last_error(void);

/* omega_t = 0 selects the metallic parameterization. */
SQED_API sqed_status sqed_sphere_create(double omega_p, double omega_t, double gamma, double radius,
                                        sqed_sphere **out);
SQED_API sqed_status sqed_sphere_lossless(const sqed_sphere *s, sqed_sphere **out);
SQED_API void sqed_sphere_destroy(sqed_sphere *s);

SQED_API sqed_status sqed_permittivity(const sqed_sphere *s, double omega, double *re, double *im);
SQED_API sqed_status sqed_refractive_index(const sqed_sphere *s, double omega, double *re,
                                           double *im);
SQED_API sqed_status sqed_band_gap(const sqed_sphere *s, double *lower, double *upper,
                                   double *sg_bound);
SQED_API sqed_status sqed_classify_regime(const sqed_sphere *s, double omega, int *regime);

SQED_API sqed_status sqed_mie_coefficients(const sqed_sphere *s, double omega, int l,
                                           sqed_mie *out);
SQED_API sqed_status sqed_characteristic(const sqed_sphere *s, double omega_re, double omega_im,
                                         int l, int pol, double *re, double *im);
SQED_API sqed_status sqed_fluctuation_prr(const sqed_sphere *s, double omega, double r,
                                          double *out);

SQED_API sqed_status sqed_find_wg(const sqed_sphere *s, int l, int radial_order, int pol,
                                  sqed_resonance *out);
SQED_API sqed_status sqed_find_sg(const sqed_sphere *s, int l, sqed_resonance *out);
SQED_API sqed_status sqed_q_abs_closed_form(double n_re, double n_im, double nu, int pol, int kind,
                                            double *out);
/* derivative: 0 nondispersive, 1 numerical. */
SQED_API sqed_status sqed_linewidth_taylor(const sqed_sphere *s, int l, int pol, double omega,
                                           int derivative, double *out);
SQED_API sqed_status sqed_count_roots(const sqed_sphere *s, int l, int pol, double re_min,
                                      double re_max, double im_min, double im_max, int *count);

SQED_API sqed_status sqed_decay_rate(const sqed_sphere *s, const sqed_atom *atom, sqed_decay *out);
SQED_API sqed_status sqed_near_surface(const sqed_sphere *s, const sqed_atom *atom,
                                       double *rate_perp, double *rate_par, double *shift_perp,
                                       double *shift_par);

/* values[k] = |F|^2 at (theta[k], phi[k]). */
SQED_API sqed_status sqed_pattern(const sqed_sphere *s, const sqed_atom *atom, double r, size_t n,
                                  const double *theta, const double *phi, double *values,
                                  int *l_max_used);
/* Writes at most cap indices; *count receives the total number of lobes. */
SQED_API sqed_status sqed_find_lobes(const double *values, size_t n, double rel_prominence,
                                     size_t *indices, size_t cap, size_t *count);
SQED_API sqed_status sqed_radiated_fraction(const sqed_sphere *s, const sqed_atom *atom,
                                            double *value, int *series_terms);
SQED_API sqed_status sqed_intensity_markov(const sqed_sphere *s, const sqed_atom *atom, double r,
                                           double theta, double phi, size_t n,
                                           const double *times, double *out);
/* delta <= 0 estimates the resonance half-width from A(omega). */
SQED_API sqed_status sqed_intensity_exact(const sqed_sphere *s, const sqed_atom *atom, double r,
                                          double theta, double phi, size_t n, const double *times,
                                          double delta, int threads, double *out);
SQED_API sqed_status sqed_estimate_linewidth(const sqed_sphere *s, const sqed_atom *atom,
                                             double *out);

#ifdef __cplusplus
}
#endif

#endif
